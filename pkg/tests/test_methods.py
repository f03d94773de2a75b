"""Constructor tests for the method catalog."""

import numpy as np
import pytest

from splitrk.integrator import step
from splitrk.methods import (
    FsrkSpec,
    REGISTRY,
    adi_gark3,
    adi_gark4,
    build_method,
    catalog_tableaus,
    douglas_modified_first,
    fsrk_from_gark,
    fsrk_to_gark,
    lod_backward_euler,
    strang,
    trapezoidal_splitting,
    yanenko_lod_cn,
    yanenko_parallel,
    yoshida4,
)
from splitrk.methods import _yoshida_coefficients
from splitrk.order_conditions import classical_order, rk_order
from splitrk.problems import dahlquist
from splitrk.rk import implicit_euler, implicit_midpoint, sdirk4, trapezoidal_rule
from splitrk.stability import stability_value
from splitrk.tableau import (
    assemble_structured,
    find_imim_permutation,
    is_internally_consistent,
    is_stiffly_accurate,
)


def amplification(tableau, rates):
    """One unit step on the split scalar problem y' = sum(lambda_m) y."""
    ode = dahlquist(rates)
    return step(tableau, ode, 0.0, np.array([1.0 + 0.0j]), 1.0)[0]


class TestLodBackwardEuler:
    def test_single_partition_is_implicit_euler(self):
        t = assemble_structured(lod_backward_euler(1))
        ie = implicit_euler()
        assert np.array_equal(t.blocks[0][0], ie.a)
        assert np.array_equal(t.weights[0], ie.b)

    def test_partition_count_validation(self):
        with pytest.raises(ValueError):
            lod_backward_euler(0)

    def test_three_sweeps_compose_scalar_backward_euler_solves(self):
        t = assemble_structured(lod_backward_euler(3))
        rates = np.array([-1.0, -2.0, -0.5])
        expected = np.prod(1.0 / (1.0 - rates))
        assert amplification(t, rates) == pytest.approx(expected, rel=1e-14)


class TestYanenko:
    def test_single_partition_is_the_trapezoidal_rule(self):
        t = yanenko_lod_cn(1)
        tr = trapezoidal_rule()
        assert np.array_equal(t.blocks[0][0], tr.a)
        assert classical_order(t) == 2

    def test_stiffly_accurate_directly_for_any_partition_count(self):
        for n in (1, 2, 3, 4):
            assert is_stiffly_accurate(yanenko_lod_cn(n))

    def test_stage_times_follow_the_sweep_nodes(self):
        t = yanenko_lod_cn(3)
        assert np.allclose(t.stage_times[0], [0.0, 0.5])
        assert np.allclose(t.stage_times[1], [0.5, 0.5])
        assert np.allclose(t.stage_times[2], [0.5, 1.0])


class TestYanenkoVariants:
    def test_symmetric_classifications(self):
        t = build_method("yanenko-symmetric", 2)
        assert classical_order(t) == 2
        assert not is_stiffly_accurate(t)
        assert is_stiffly_accurate(t, up_to_permutation=True)

    def test_parallel_sweeps_are_decoupled(self):
        t = yanenko_parallel(3)
        # reversed-sweep stages (3, 4) never reference forward-sweep stages of
        # later partitions, and vice versa
        for q in range(3):
            for m in range(q + 1, 3):
                assert not t.blocks[q][m][2:, :2].any()
                assert not t.blocks[m][q][:2, 2:].any()

    def test_parallel_single_partition_averages_to_the_trapezoidal_rule(self):
        t = yanenko_parallel(1)
        z = -0.8 + 0.4j
        expected = (1.0 + z / 2.0) / (1.0 - z / 2.0)
        assert amplification(t, [z]) == pytest.approx(expected, rel=1e-14)


class TestTrapezoidalSplitting:
    def test_order_and_consistency(self):
        t = trapezoidal_splitting(2)
        assert classical_order(t) == 2
        assert not is_internally_consistent(t)

    def test_single_partition_reduces_to_the_trapezoidal_rule(self):
        z = -1.3 + 0.2j
        expected = (1.0 + z / 2.0) / (1.0 - z / 2.0)
        assert amplification(trapezoidal_splitting(1), [z]) == pytest.approx(
            expected, rel=1e-14
        )


class TestDouglasFamily:
    def test_modified_first_is_stiffly_accurate(self):
        assert is_stiffly_accurate(douglas_modified_first(2, 0.5))

    def test_modified_last_is_not(self):
        t = build_method("douglas-mod-last", 2, theta=0.5)
        assert not is_stiffly_accurate(t)
        assert not is_stiffly_accurate(t, up_to_permutation=True)

    def test_modified_last_matches_douglas_when_nonstiff_term_vanishes(self):
        # the absent nonstiff partition maps to zero, so the correction drops out
        rates = np.array([-0.7, -1.1])
        plain = amplification(build_method("douglas", 2, theta=0.5), rates)
        padded = amplification(build_method("douglas-mod-last", 2, theta=0.5), rates)
        assert padded == pytest.approx(plain, rel=1e-14)

    def test_hv_is_stiffly_accurate(self):
        assert is_stiffly_accurate(build_method("hv", 2))


class TestStrang:
    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            strang(implicit_midpoint(), 0)

    def test_single_partition_composes_two_half_steps_of_the_base(self):
        t = strang(implicit_midpoint(), 1)
        z = -1.7 + 0.6j
        half = (1.0 + z / 4.0) / (1.0 - z / 4.0)
        assert amplification(t, [z]) == pytest.approx(half**2, rel=1e-13)

    def test_orders(self):
        assert classical_order(strang(implicit_midpoint(), 2)) == 2
        assert classical_order(strang(implicit_euler(), 2)) == 1
        assert classical_order(strang(implicit_midpoint(), 3)) == 2


class TestYoshida:
    def test_composition_weights_telescope_to_one(self):
        alphas, betas = _yoshida_coefficients()
        assert np.sum(alphas) == pytest.approx(1.0, abs=1e-15)
        assert np.sum(betas) == pytest.approx(1.0, abs=1e-15)

    def test_leading_substep_is_half_the_triple_jump_factor(self):
        alphas, _ = _yoshida_coefficients()
        theta = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
        assert theta == pytest.approx(1.35121, abs=5e-6)
        assert alphas[0] == pytest.approx(theta / 2.0, abs=1e-15)

    def test_two_partitions_only(self):
        with pytest.raises(ValueError):
            yoshida4(implicit_midpoint(), n_partitions=3)

    def test_order_four_with_order_four_bases(self):
        assert classical_order(yoshida4(sdirk4())) == 4

    def test_weights_match_composition_intervals(self):
        base = implicit_midpoint()
        t = yoshida4(base)
        alphas, betas = _yoshida_coefficients()
        assert np.allclose(t.weights[0], np.repeat(alphas, base.stages) * base.b[0])
        assert np.allclose(t.weights[1], np.repeat(betas, base.stages) * base.b[0])


class TestFsrkMapping:
    def lod_be_spec(self, n):
        dims = tuple(range(1, n + 1))
        a = np.tril(np.ones((n, n)))
        return FsrkSpec(
            stage_dims=dims,
            a_implicit=a,
            b_implicit=np.ones(n),
            abscissae=np.ones(n),
        )

    def test_recovers_lod_backward_euler(self):
        for n in (2, 3):
            t = fsrk_to_gark(self.lod_be_spec(n))
            ref = assemble_structured(lod_backward_euler(n))
            assert t == ref

    def test_single_stage_single_dimension_is_the_plain_dirk(self):
        spec = FsrkSpec(
            stage_dims=(1,),
            a_implicit=np.array([[0.5]]),
            b_implicit=np.array([1.0]),
            abscissae=np.array([0.5]),
        )
        t = fsrk_to_gark(spec)
        assert t.num_partitions == 1 and not t.has_nonstiff
        assert np.array_equal(t.blocks[0][0], [[0.5]])

    def test_stage_counts_partition_the_stages(self):
        spec = FsrkSpec(
            stage_dims=(1, 2, 1, 2),
            a_implicit=np.tril(np.full((4, 4), 0.25)),
            b_implicit=np.full(4, 0.25),
            abscissae=np.array([0.25, 0.5, 0.75, 1.0]),
        )
        t = fsrk_to_gark(spec)
        assert sum(t.stage_counts) == 4
        assert t.stage_counts == (2, 2)

    def test_round_trip_recovers_the_arrays(self):
        rng = np.random.default_rng(2)
        dims = (1, 2, 2, 1, 3)
        spec = FsrkSpec(
            stage_dims=dims,
            a_implicit=np.tril(rng.normal(size=(5, 5))),
            b_implicit=rng.normal(size=5),
            abscissae=rng.normal(size=5),
            a_nonstiff=np.tril(rng.normal(size=(5, 5)), k=-1),
            b_nonstiff=rng.normal(size=5),
        )
        t = fsrk_to_gark(spec)
        assert t.has_nonstiff and t.num_partitions == 4
        back = fsrk_from_gark(t, dims)
        assert np.array_equal(back.a_implicit, spec.a_implicit)
        assert np.array_equal(back.b_implicit, spec.b_implicit)
        assert np.array_equal(back.a_nonstiff, spec.a_nonstiff)

    def test_missing_dimension_rejected(self):
        spec = FsrkSpec(
            stage_dims=(1, 3),
            a_implicit=np.tril(np.ones((2, 2))),
            b_implicit=np.ones(2),
            abscissae=np.ones(2),
        )
        with pytest.raises(ValueError, match="no stage"):
            fsrk_to_gark(spec)

    def test_two_implicit_dimensions_on_one_stage_rejected(self):
        mats = {
            1: np.array([[0.5, 0.0], [0.0, 0.0]]),
            2: np.array([[0.3, 0.0], [0.1, 0.5]]),  # column 1 collides with dim 1
        }
        with pytest.raises(ValueError, match="two dimensions"):
            FsrkSpec.from_dimension_matrices(
                stage_dims=(1, 2),
                matrices=mats,
                weights={1: np.array([0.5, 0.0]), 2: np.array([0.0, 0.5])},
                abscissae=[0.5, 1.0],
            )


class TestNewHighOrderMethods:
    def test_order3_coefficients(self):
        st = adi_gark3()
        g = st.a_diag[1, 1]
        # gamma solves the defining cubic and matches the quoted seed
        assert 6 * g**3 - 18 * g**2 + 9 * g - 1 == pytest.approx(0.0, abs=1e-15)
        assert g == pytest.approx(0.43586652150845900, abs=1e-15)
        assert np.allclose(st.abscissae, [0.0, 2 * g, (g + 2.0) / 4.0, 1.0])
        assert np.array_equal(st.weights, st.a_diag[-1])  # stiffly accurate ESDIRK
        assert st.a_diag[0, 0] == 0.0

    def test_order4_coefficients(self):
        st = adi_gark4()
        r = np.sqrt(2.0)
        assert np.allclose(
            st.abscissae, [0.0, 0.5, (2.0 - r) / 4.0, 5.0 / 8.0, 26.0 / 25.0, 1.0]
        )
        assert np.all(np.diag(st.a_diag)[1:] == 0.25)
        assert rk_order(st.a_diag, st.weights) == 4
        assert rk_order(st.a_upper, st.weights) == 4
        assert np.allclose(st.a_upper.sum(axis=1), st.abscissae, atol=1e-12)
        assert np.allclose(st.a_diag.sum(axis=1), st.abscissae, atol=1e-12)

    def test_parallel_assembly_mirrors_the_explicit_block(self):
        st = adi_gark3(mode="parallel")
        assert np.array_equal(st.a_lower, st.a_upper)
        st = adi_gark3(mode="adi")
        assert np.array_equal(st.a_lower, st.a_diag)


class TestCatalogAndRegistry:
    def test_every_catalog_entry_is_valid(self):
        for name, t in catalog_tableaus(2):
            assert find_imim_permutation(t) is not None, name
            for q in range(t.num_partitions):
                assert np.isfinite(t.weights[q]).all()

    def test_catalog_with_three_partitions(self):
        names = [name for name, _ in catalog_tableaus(3)]
        assert "yoshida4" not in names
        assert "adi-gark3" in names

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError, match="unknown method"):
            build_method("nope")

    def test_fixed_partition_count_enforced(self):
        with pytest.raises(ValueError, match="exactly 2"):
            build_method("yoshida4", 3)

    def test_unknown_base_rejected(self):
        with pytest.raises(ValueError, match="unknown base"):
            build_method("strang", 2, base="rk99")

    def test_nominal_orders(self):
        assert REGISTRY["douglas"].nominal_order(2, {"theta": 0.5}) == 2
        assert REGISTRY["douglas"].nominal_order(2, {"theta": 0.5, "f0": True}) == 1
        assert REGISTRY["mcs"].nominal_order(2, {"theta": 0.5, "sigma": 0.5, "mu": 0.0}) == 2
        assert REGISTRY["hv"].nominal_order(2, {"mu": 0.25}) == 1
        assert REGISTRY["strang"].nominal_order(2, {"base": "implicit-euler"}) == 1
        assert REGISTRY["yoshida4"].nominal_order(2, {}) == 4
        assert REGISTRY["yanenko"].nominal_order(1, {}) == 2

    def test_stability_of_registry_lists_all_names(self):
        for required in ("lod-be", "adi-gark3", "adi-gark4", "yoshida4", "douglas"):
            assert required in REGISTRY


def test_strang_stability_matches_midpoint_composition_for_two_partitions():
    # equal arguments collapse the two-partition sweep to four half steps
    t = strang(implicit_midpoint(), 2)
    z = -0.9 + 0.1j
    value = stability_value(t, [z, z])
    half = (1.0 + z / 4.0) / (1.0 - z / 4.0)
    assert value == pytest.approx(half**4, rel=1e-13)
