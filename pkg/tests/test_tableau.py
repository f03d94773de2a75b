"""Tests for the partitioned tableau data model and structural analysis."""

import numpy as np
import pytest

from splitrk.methods import (
    adi_gark3,
    catalog_tableaus,
    douglas,
    lod_backward_euler,
    trapezoidal_splitting,
    yanenko_symmetric,
)
from splitrk.rk import gauss2
from splitrk.tableau import (
    AssemblyMode,
    GarkTableau,
    StagePermutation,
    StructuredTableau,
    assemble_structured,
    find_imim_permutation,
    is_internally_consistent,
    is_stiffly_accurate,
    permute,
    vec_permutation,
)


def two_partition_example():
    """A small asymmetric 2-partition tableau for permutation tests."""
    a11 = np.array([[0.0, 0.0], [0.3, 0.2]])
    a12 = np.array([[0.0, 0.0], [0.1, 0.0]])
    a21 = np.array([[0.0, 0.0], [0.4, 0.25]])
    a22 = np.array([[0.0, 0.0], [0.05, 0.35]])
    return GarkTableau(
        blocks=[[a11, a12], [a21, a22]],
        weights=[np.array([0.5, 0.5]), np.array([0.4, 0.6])],
    )


class TestGarkTableau:
    def test_block_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="shape"):
            GarkTableau(
                blocks=[[np.zeros((2, 2)), np.zeros((2, 3))],
                        [np.zeros((2, 2)), np.zeros((2, 2))]],
                weights=[np.ones(2) / 2, np.ones(2) / 2],
            )

    def test_stored_abscissae_must_match_row_sums(self):
        with pytest.raises(ValueError, match="row sums"):
            GarkTableau(
                blocks=[[np.array([[1.0]])]],
                weights=[np.array([1.0])],
                abscissae=[[np.array([0.5])]],
            )

    def test_abscissae_are_row_sums(self):
        t = two_partition_example()
        for q in range(2):
            for m in range(2):
                assert np.allclose(t.abscissae[q][m], t.blocks[q][m].sum(axis=1))

    def test_json_round_trip_is_exact(self, tmp_path):
        for name, t in catalog_tableaus(2):
            path = tmp_path / f"{name}.json"
            t.dump_json(path)
            back = GarkTableau.load_json(path)
            assert back == t, name

    def test_flat_ordering_is_partition_major(self):
        t = two_partition_example()
        a, b = t.flat
        assert a.shape == (4, 4)
        assert np.array_equal(a[:2, :2], t.blocks[0][0])
        assert np.array_equal(a[2:, :2], t.blocks[1][0])
        assert np.array_equal(b, [0.5, 0.5, 0.4, 0.6])


class TestAssembleStructured:
    def test_single_partition_keeps_only_the_diagonal_block(self):
        st = StructuredTableau(
            a_lower=[[0.5, 0.0], [0.3, 0.2]],
            a_diag=[[0.5, 0.0], [0.3, 0.2]],
            a_upper=[[0.0, 0.0], [0.4, 0.0]],
            weights=[0.5, 0.5],
            abscissae=[0.5, 0.5],
            num_partitions=1,
            mode=AssemblyMode.ADI,
        )
        t = assemble_structured(st)
        assert t.num_partitions == 1
        assert np.array_equal(t.blocks[0][0], st.a_diag)
        assert np.array_equal(t.weights[0], st.weights)

    def test_lod_backward_euler_block_pattern(self):
        t = assemble_structured(lod_backward_euler(3))
        for q in range(3):
            for m in range(3):
                expected = 1.0 if m <= q else 0.0
                assert t.blocks[q][m][0, 0] == expected
        assert is_stiffly_accurate(t)
        assert not is_internally_consistent(t)

    def test_douglas_nonstiff_prepend(self):
        t = assemble_structured(douglas(2, theta=0.5, f0=True))
        assert t.has_nonstiff and t.num_partitions == 3
        for q in (1, 2):
            assert np.array_equal(t.blocks[q][0], [[0.0], [1.0]])
        assert np.array_equal(t.blocks[0][0], [[0.0]])
        assert np.array_equal(t.weights[0], [1.0])

    def test_upper_triangularity_is_enforced(self):
        with pytest.raises(ValueError, match="strictly lower"):
            StructuredTableau(
                a_lower=[[1.0]],
                a_diag=[[1.0]],
                a_upper=[[0.5]],
                weights=[1.0],
                abscissae=[1.0],
                num_partitions=2,
            )

    def test_mode_equality_constraints(self):
        with pytest.raises(ValueError, match="ADI"):
            StructuredTableau(
                a_lower=[[0.5]],
                a_diag=[[1.0]],
                a_upper=[[0.0]],
                weights=[1.0],
                abscissae=[1.0],
                num_partitions=2,
                mode=AssemblyMode.ADI,
            )


class TestPermutation:
    def test_identity_leaves_tableau_unchanged(self):
        t = two_partition_example()
        ident = StagePermutation(tuple(t.stage_pairs))
        a_p, b_p = permute(t, ident)
        a, b = t.flat
        assert np.array_equal(a_p, a) and np.array_equal(b_p, b)

    def test_swap_then_inverse_recovers_original(self):
        t = two_partition_example()
        rng = np.random.default_rng(0)
        pairs = list(t.stage_pairs)
        for _ in range(10):
            order = tuple(rng.permutation(len(pairs)))
            perm = StagePermutation(tuple(pairs[k] for k in order))
            a_p, b_p = permute(t, perm)
            inv = np.argsort(np.array(order))
            a_back = a_p[np.ix_(inv, inv)]
            a, b = t.flat
            assert np.array_equal(a_back, a)
            assert np.array_equal(b_p[inv], b)

    def test_wrong_length_rejected(self):
        t = two_partition_example()
        with pytest.raises(ValueError, match="every global stage"):
            permute(t, StagePermutation(((0, 0), (0, 1), (1, 0))))

    def test_vec_permutation_interleaves_levels(self):
        t = assemble_structured(adi_gark3())
        perm = vec_permutation(t)
        assert perm.order[:4] == ((0, 0), (1, 0), (0, 1), (1, 1))
        a_p, _ = permute(t, perm)
        # level-major blocks mix the three coupling matrices entrywise
        st = adi_gark3()
        n = 2
        for i in range(4):
            for j in range(i + 1):
                block = a_p[i * n : (i + 1) * n, j * n : (j + 1) * n]
                expected = np.array(
                    [
                        [st.a_diag[i, j], st.a_upper[i, j]],
                        [st.a_lower[i, j], st.a_diag[i, j]],
                    ]
                )
                assert np.array_equal(block, expected)
            assert not a_p[i * n : (i + 1) * n, (i + 1) * n :].any()


class TestImimDetection:
    def test_lower_triangular_gives_identity_order(self):
        t = assemble_structured(lod_backward_euler(3))
        perm = find_imim_permutation(t)
        assert perm.order == tuple(t.stage_pairs)

    def test_adi_structure_gives_vec_order(self):
        t = assemble_structured(adi_gark3())
        perm = find_imim_permutation(t)
        assert perm.order == vec_permutation(t).order

    def test_dense_cross_coupling_has_no_ordering(self):
        g = gauss2()
        full = np.ones((2, 2)) * 0.25
        t = GarkTableau(
            blocks=[[g.a, full], [full, g.a]],
            weights=[g.b, g.b],
        )
        assert find_imim_permutation(t) is None

    def test_detected_order_is_lower_triangular(self):
        for name, t in catalog_tableaus(2):
            perm = find_imim_permutation(t)
            assert perm is not None, name
            a_p, _ = permute(t, perm)
            assert not np.triu(a_p, k=1).any(), name

    def test_symmetric_sweep_order_matches_computation_order(self):
        t = yanenko_symmetric(2)
        perm = find_imim_permutation(t)
        # forward sweep through partitions 1..N (stages 1,2), then backward
        assert perm.order == (
            (0, 0), (0, 1), (1, 0), (1, 1),
            (1, 2), (1, 3), (0, 2), (0, 3),
        )


class TestConsistencyAndStiffAccuracy:
    def test_internal_consistency_classifications(self):
        assert is_internally_consistent(assemble_structured(douglas(2, 0.5)))
        assert not is_internally_consistent(assemble_structured(lod_backward_euler(2)))

    def test_single_partition_is_always_consistent(self):
        st = lod_backward_euler(1)
        assert is_internally_consistent(assemble_structured(st))

    def test_tolerance_must_be_positive(self):
        t = assemble_structured(douglas(2, 0.5))
        with pytest.raises(ValueError):
            is_internally_consistent(t, tol=0.0)
        with pytest.raises(ValueError):
            is_stiffly_accurate(t, tol=-1.0)

    @pytest.mark.parametrize(
        "build, direct, permuted",
        [
            (lambda: assemble_structured(lod_backward_euler(2)), True, True),
            (lambda: yanenko_symmetric(2), False, True),
            (lambda: trapezoidal_splitting(2), False, True),
        ],
    )
    def test_classifications(self, build, direct, permuted):
        t = build()
        assert is_stiffly_accurate(t) == direct
        assert is_stiffly_accurate(t, up_to_permutation=True) == permuted

    def test_adi_assembly_stiffly_accurate_iff_weights_match_last_row(self):
        matching = douglas(2, 0.5)  # b equals the last row of the implicit block
        assert np.array_equal(matching.weights, matching.a_diag[-1])
        assert is_stiffly_accurate(assemble_structured(matching))
        off = StructuredTableau(
            a_lower=matching.a_lower,
            a_diag=matching.a_diag,
            a_upper=matching.a_upper,
            weights=[0.25, 0.75],
            abscissae=matching.abscissae,
            num_partitions=2,
            mode=AssemblyMode.ADI,
        )
        assert not is_stiffly_accurate(assemble_structured(off))
        assert not is_stiffly_accurate(assemble_structured(off), up_to_permutation=True)

    def test_structured_assembly_always_admits_an_ordering(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            s = int(rng.integers(1, 5))
            lower = np.tril(rng.normal(size=(s, s)))
            upper = np.tril(rng.normal(size=(s, s)), k=-1)
            st = StructuredTableau(
                a_lower=lower,
                a_diag=lower,
                a_upper=upper,
                weights=rng.normal(size=s),
                abscissae=lower.sum(axis=1),
                num_partitions=int(rng.integers(1, 4)),
                mode=AssemblyMode.ADI,
            )
            assert find_imim_permutation(assemble_structured(st)) is not None
