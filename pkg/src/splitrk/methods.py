"""Constructors for the catalog of splitting-based implicit integrators.

Each constructor returns either a :class:`StructuredTableau` (when the scheme
fits the triple-block form) or a fully assembled :class:`GarkTableau`.  The
module also provides the name-based registry the command line resolves
methods through, and the mapping from fractional-step (one implicit dimension
per stage) coefficient sets into the partitioned block form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .rk import BASE_METHODS, RkTableau, implicit_midpoint, sdirk4
from .tableau import (
    AssemblyMode,
    GarkTableau,
    NonstiffBlocks,
    StructuredTableau,
    assemble_structured,
)

__all__ = [
    "FsrkSpec",
    "MethodInfo",
    "REGISTRY",
    "adi_gark3",
    "adi_gark4",
    "build_method",
    "catalog_tableaus",
    "douglas",
    "douglas_modified_first",
    "douglas_modified_last",
    "fsrk_to_gark",
    "hundsdorfer_verwer",
    "lod_backward_euler",
    "modified_craig_sneyd",
    "strang",
    "trapezoidal_splitting",
    "yanenko_lod_cn",
    "yanenko_parallel",
    "yanenko_symmetric",
    "yoshida4",
]


def _check_partitions(n: int) -> None:
    if n < 1:
        raise ValueError("the partition count must be at least 1")


def _sweep_abscissae(n: int) -> np.ndarray:
    """The fractional-sweep nodes: 0, 1/2, ..., 1/2, 1 (n+1 values)."""
    c = np.full(n + 1, 0.5)
    c[0], c[n] = 0.0, 1.0
    return c


def _block_tableau(
    n: int,
    lower: np.ndarray,
    diag: np.ndarray,
    upper: np.ndarray,
    weights: np.ndarray,
    stage_times: Sequence[np.ndarray],
) -> GarkTableau:
    """Assemble the block-Toeplitz pattern: lower for m<q, diag for m=q, upper for m>q."""
    blocks = [
        [lower if m < q else diag if m == q else upper for m in range(n)]
        for q in range(n)
    ]
    return GarkTableau(
        blocks=blocks, weights=[weights] * n, stage_times=list(stage_times)
    )


# -- locally one-dimensional and stabilizing-correction schemes ---------------


def lod_backward_euler(n_partitions: int) -> StructuredTableau:
    """One implicit Euler sweep per partition; stiffly accurate, order 1."""
    _check_partitions(n_partitions)
    return StructuredTableau(
        a_lower=[[1.0]],
        a_diag=[[1.0]],
        a_upper=[[0.0]],
        weights=[1.0],
        abscissae=[1.0],
        num_partitions=n_partitions,
        mode=AssemblyMode.ADI,
    )


def yanenko_lod_cn(n_partitions: int) -> GarkTableau:
    """Sequential Crank-Nicolson sweeps; order 1 for more than one partition."""
    n = n_partitions
    _check_partitions(n)
    c = _sweep_abscissae(n)
    lower = np.full((2, 2), 0.5)
    diag = np.array([[0.0, 0.0], [0.5, 0.5]])
    upper = np.zeros((2, 2))
    times = [np.array([c[q - 1], c[q]]) for q in range(1, n + 1)]
    return _block_tableau(n, lower, diag, upper, np.array([0.5, 0.5]), times)


def yanenko_symmetric(n_partitions: int) -> GarkTableau:
    """Half-step sweep forward then backward with quarter weights; order 2."""
    n = n_partitions
    _check_partitions(n)
    c = _sweep_abscissae(n)
    lower = np.zeros((4, 4))
    lower[:, :2] = 0.25
    diag = np.zeros((4, 4))
    diag[1:, :2] = 0.25
    diag[3, 2:] = 0.25
    upper = np.zeros((4, 4))
    upper[2:, :] = 0.25
    times = [
        np.array(
            [
                c[q - 1] / 2.0,
                c[q] / 2.0,
                (1.0 + c[n - q]) / 2.0,
                (1.0 + c[n - q + 1]) / 2.0,
            ]
        )
        for q in range(1, n + 1)
    ]
    return _block_tableau(n, lower, diag, upper, np.full(4, 0.25), times)


def yanenko_parallel(n_partitions: int) -> GarkTableau:
    """Two independent full sweeps (forward and reversed), averaged; order 2."""
    n = n_partitions
    _check_partitions(n)
    c = _sweep_abscissae(n)
    lower = np.zeros((4, 4))
    lower[:2, :2] = 0.5
    diag = np.zeros((4, 4))
    diag[1, :2] = 0.5
    diag[3, 2:] = 0.5
    upper = np.zeros((4, 4))
    upper[2:, 2:] = 0.5
    times = [
        np.array([c[q - 1], c[q], c[n - q], c[n - q + 1]])
        for q in range(1, n + 1)
    ]
    return _block_tableau(n, lower, diag, upper, np.full(4, 0.25), times)


def trapezoidal_splitting(n_partitions: int) -> GarkTableau:
    """Half explicit Euler sweep forward, half implicit Euler sweep backward."""
    n = n_partitions
    _check_partitions(n)
    lower = np.array([[0.5, 0.0], [0.5, 0.0]])
    diag_and_upper = np.array([[0.0, 0.0], [0.5, 0.5]])
    times = [np.array([0.0, 1.0])] * n
    return _block_tableau(
        n, lower, diag_and_upper, diag_and_upper, np.array([0.5, 0.5]), times
    )


_DOUGLAS_TIMES = np.array([0.0, 1.0])


def _douglas_blocks(theta: float) -> tuple[np.ndarray, np.ndarray]:
    implicit = np.array([[0.0, 0.0], [1.0 - theta, theta]])
    explicit = np.array([[0.0, 0.0], [1.0, 0.0]])
    return implicit, explicit


def douglas(n_partitions: int, theta: float, f0: bool = False) -> StructuredTableau:
    """Explicit Euler predictor plus one stabilizing correction per partition.

    With ``f0`` a nonstiff partition is prepended that enters the predictor
    only.  Order 2 requires theta = 1/2 and no nonstiff term.
    """
    _check_partitions(n_partitions)
    implicit, explicit = _douglas_blocks(theta)
    f0_blocks = None
    if f0:
        f0_blocks = NonstiffBlocks(
            a00=[[0.0]],
            aq0=[[0.0], [1.0]],
            a0q=[[0.0, 0.0]],
            weights=[1.0],
            abscissae=[0.0],
        )
    return StructuredTableau(
        a_lower=implicit,
        a_diag=implicit,
        a_upper=explicit,
        weights=implicit[1],
        abscissae=_DOUGLAS_TIMES,
        num_partitions=n_partitions,
        mode=AssemblyMode.ADI,
        f0_blocks=f0_blocks,
    )


def douglas_modified_first(n_partitions: int, theta: float) -> GarkTableau:
    """Douglas variant correcting the nonstiff term right after the predictor."""
    _check_partitions(n_partitions)
    implicit, explicit = _douglas_blocks(theta)
    f0_blocks = NonstiffBlocks(
        a00=[[0.0, 0.0], [1.0, 0.0]],
        aq0=implicit,
        a0q=[[0.0, 0.0], [1.0, 0.0]],
        weights=implicit[1],
        abscissae=_DOUGLAS_TIMES,
    )
    st = StructuredTableau(
        a_lower=implicit,
        a_diag=implicit,
        a_upper=explicit,
        weights=implicit[1],
        abscissae=_DOUGLAS_TIMES,
        num_partitions=n_partitions,
        mode=AssemblyMode.ADI,
        f0_blocks=f0_blocks,
    )
    return assemble_structured(st)


def douglas_modified_last(n_partitions: int, theta: float) -> GarkTableau:
    """Douglas variant correcting the nonstiff term after the final sweep."""
    _check_partitions(n_partitions)
    implicit, explicit = _douglas_blocks(theta)
    f0_blocks = NonstiffBlocks(
        a00=[[0.0, 0.0], [1.0, 0.0]],
        aq0=[[0.0, 0.0], [1.0, 0.0]],
        a0q=implicit,
        weights=implicit[1],
        abscissae=_DOUGLAS_TIMES,
    )
    st = StructuredTableau(
        a_lower=implicit,
        a_diag=implicit,
        a_upper=explicit,
        weights=implicit[1],
        abscissae=_DOUGLAS_TIMES,
        num_partitions=n_partitions,
        mode=AssemblyMode.ADI,
        f0_blocks=f0_blocks,
    )
    return assemble_structured(st)


def modified_craig_sneyd(
    n_partitions: int, theta: float, sigma: float, mu: float
) -> GarkTableau:
    """Two correction sweeps with an intermediate mixed update.

    Order 2 requires sigma = theta and mu = 1/2 - theta; mu = 0 drops the
    mixed update back to the plain Craig-Sneyd scheme.
    """
    _check_partitions(n_partitions)
    implicit = np.array(
        [
            [0.0, 0.0, 0.0, 0.0],
            [1.0 - theta, theta, 0.0, 0.0],
            [1.0 - theta, theta, 0.0, 0.0],
            [1.0 - mu - theta, 0.0, mu, theta],
        ]
    )
    explicit = np.array(
        [
            [0.0, 0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [1.0 - theta, theta, 0.0, 0.0],
            [1.0 - mu, 0.0, mu, 0.0],
        ]
    )
    f0_blocks = NonstiffBlocks(
        a00=[[0.0, 0.0], [1.0, 0.0]],
        aq0=[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0 - sigma - mu, sigma + mu]],
        a0q=[[0.0, 0.0, 0.0, 0.0], [1.0 - theta, theta, 0.0, 0.0]],
        weights=[1.0 - sigma - mu, sigma + mu],
        abscissae=_DOUGLAS_TIMES,
    )
    st = StructuredTableau(
        a_lower=implicit,
        a_diag=implicit,
        a_upper=explicit,
        weights=implicit[3],
        abscissae=np.array([0.0, 1.0, 1.0, 1.0]),
        num_partitions=n_partitions,
        mode=AssemblyMode.ADI,
        f0_blocks=f0_blocks,
    )
    return assemble_structured(st)


def hundsdorfer_verwer(n_partitions: int, theta: float, mu: float) -> GarkTableau:
    """Two correction sweeps with the second centered on the first sweep's result.

    Stiffly accurate; order 2 requires mu = 1/2.
    """
    _check_partitions(n_partitions)
    implicit = np.array(
        [
            [0.0, 0.0, 0.0, 0.0],
            [1.0 - theta, theta, 0.0, 0.0],
            [1.0 - theta, theta, 0.0, 0.0],
            [1.0 - mu, 0.0, mu - theta, theta],
        ]
    )
    explicit = np.array(
        [
            [0.0, 0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [1.0 - theta, theta, 0.0, 0.0],
            [1.0 - mu, 0.0, mu, 0.0],
        ]
    )
    f0_blocks = NonstiffBlocks(
        a00=[[0.0, 0.0], [1.0, 0.0]],
        aq0=[[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [1.0 - mu, mu]],
        a0q=[[0.0, 0.0, 0.0, 0.0], [1.0 - theta, theta, 0.0, 0.0]],
        weights=[1.0 - mu, mu],
        abscissae=_DOUGLAS_TIMES,
    )
    st = StructuredTableau(
        a_lower=implicit,
        a_diag=implicit,
        a_upper=explicit,
        weights=implicit[3],
        abscissae=np.array([0.0, 1.0, 1.0, 1.0]),
        num_partitions=n_partitions,
        mode=AssemblyMode.ADI,
        f0_blocks=f0_blocks,
    )
    return assemble_structured(st)


# -- operator splitting compositions ------------------------------------------


def strang(base: RkTableau, n_partitions: int) -> GarkTableau:
    """Symmetric half-step sweep up and back down, each leg one base RK step."""
    n = n_partitions
    _check_partitions(n)
    s = base.stages
    half_a = 0.5 * base.a
    half_obt = 0.5 * np.outer(np.ones(s), base.b)
    zero = np.zeros((s, s))
    lower = np.block([[half_obt, zero], [half_obt, zero]])
    diag = np.block([[half_a, zero], [half_obt, half_a]])
    upper = np.block([[zero, zero], [half_obt, half_obt]])
    weights = np.concatenate([0.5 * base.b, 0.5 * base.b])
    times = [np.concatenate([0.5 * base.c, 0.5 * (1.0 + base.c)])] * n
    return _block_tableau(n, lower, diag, upper, weights, times)


# Composition coefficients for the order-4 triple-jump: three symmetric
# sub-steps of sizes t, 1-2t, t with t = 1/(2 - 2^(1/3)).
def _yoshida_coefficients() -> tuple[np.ndarray, np.ndarray]:
    cbrt2 = 2.0 ** (1.0 / 3.0)
    denom = 2.0 - cbrt2
    alphas = np.array(
        [
            1.0 / (2.0 * denom),
            (1.0 - cbrt2) / (2.0 * denom),
            (1.0 - cbrt2) / (2.0 * denom),
            1.0 / (2.0 * denom),
        ]
    )
    betas = np.array([1.0 / denom, -cbrt2 / denom, 1.0 / denom, 0.0])
    return alphas, betas


def yoshida4(base: RkTableau, n_partitions: int = 2) -> GarkTableau:
    """Fourth-order two-way composition of alternating sub-flows.

    The composition requires exactly two partitions and includes
    backward-in-time legs (one negative sub-step per partition).
    """
    if n_partitions != 2:
        raise ValueError("the fourth-order composition is defined for 2 partitions")
    alphas, betas = _yoshida_coefficients()
    levels = alphas.size
    s = base.stages
    obt = np.outer(np.ones(s), base.b)
    zero = np.zeros((s, s))

    def sweep_block(coeffs_own, coeffs_other, own_leads):
        # rows/cols are composition legs; the diagonal carries the base matrix
        own = np.block(
            [
                [
                    coeffs_own[k] * base.a
                    if k == l
                    else coeffs_own[k] * obt
                    if k < l
                    else zero
                    for k in range(levels)
                ]
                for l in range(levels)
            ]
        )
        cut = 1 if own_leads else 0
        other = np.block(
            [
                [
                    coeffs_other[k] * obt if k <= l - cut else zero
                    for k in range(levels)
                ]
                for l in range(levels)
            ]
        )
        return own, other

    a11, a12 = sweep_block(alphas, betas, own_leads=True)
    a22, a21 = sweep_block(betas, alphas, own_leads=False)
    b1 = np.concatenate([a * base.b for a in alphas])
    b2 = np.concatenate([b * base.b for b in betas])
    cum_a = np.concatenate([[0.0], np.cumsum(alphas)])
    cum_b = np.concatenate([[0.0], np.cumsum(betas)])
    t1 = np.concatenate([cum_a[l] + alphas[l] * base.c for l in range(levels)])
    t2 = np.concatenate([cum_b[l] + betas[l] * base.c for l in range(levels)])
    return GarkTableau(
        blocks=[[a11, a12], [a21, a22]],
        weights=[b1, b2],
        stage_times=[t1, t2],
    )


# -- fractional-step coefficient sets ------------------------------------------


@dataclass(frozen=True)
class FsrkSpec:
    """Coefficients of a fractional-step method: one implicit dimension per stage.

    ``stage_dims[j]`` names the dimension (1-based) solved implicitly at stage
    j; ``a_implicit[i, j]`` is that dimension's coefficient, so column j of the
    per-dimension matrices is nonzero only for its own dimension.  The nonstiff
    coefficients act strictly below the diagonal.
    """

    stage_dims: tuple[int, ...]
    a_implicit: np.ndarray
    b_implicit: np.ndarray
    abscissae: np.ndarray
    a_nonstiff: Optional[np.ndarray] = None
    b_nonstiff: Optional[np.ndarray] = None

    def __post_init__(self):
        s = len(self.stage_dims)
        a = np.array(self.a_implicit, dtype=float)
        b = np.array(self.b_implicit, dtype=float)
        c = np.array(self.abscissae, dtype=float)
        if a.shape != (s, s) or b.shape != (s,) or c.shape != (s,):
            raise ValueError("coefficient arrays must all cover the stage count")
        if np.any(np.triu(a, k=1) != 0.0):
            raise ValueError("implicit coefficients must be lower triangular")
        if min(self.stage_dims) < 1:
            raise ValueError("stage dimensions are 1-based")
        object.__setattr__(self, "a_implicit", a)
        object.__setattr__(self, "b_implicit", b)
        object.__setattr__(self, "abscissae", c)
        if (self.a_nonstiff is None) != (self.b_nonstiff is None):
            raise ValueError("nonstiff coefficients need both a and b arrays")
        if self.a_nonstiff is not None:
            a0 = np.array(self.a_nonstiff, dtype=float)
            b0 = np.array(self.b_nonstiff, dtype=float)
            if a0.shape != (s, s) or b0.shape != (s,):
                raise ValueError("nonstiff coefficient arrays must cover all stages")
            if np.any(np.triu(a0) != 0.0):
                raise ValueError("nonstiff coefficients must be strictly lower triangular")
            object.__setattr__(self, "a_nonstiff", a0)
            object.__setattr__(self, "b_nonstiff", b0)

    @classmethod
    def from_dimension_matrices(
        cls,
        stage_dims: Sequence[int],
        matrices: dict[int, np.ndarray],
        weights: dict[int, np.ndarray],
        abscissae: Sequence[float],
        a_nonstiff: Optional[np.ndarray] = None,
        b_nonstiff: Optional[np.ndarray] = None,
    ) -> "FsrkSpec":
        """Pack per-dimension arrays, rejecting stages implicit in two dimensions."""
        s = len(stage_dims)
        a = np.zeros((s, s))
        b = np.zeros(s)
        for j in range(s):
            for dim, mat in matrices.items():
                col = np.asarray(mat)[:, j]
                if dim != stage_dims[j] and np.any(col != 0.0):
                    raise ValueError(
                        f"stage {j + 1} carries implicit coefficients for two dimensions"
                    )
            a[:, j] = np.asarray(matrices[stage_dims[j]])[:, j]
            b[j] = np.asarray(weights[stage_dims[j]])[j]
        return cls(
            stage_dims=tuple(stage_dims),
            a_implicit=a,
            b_implicit=b,
            abscissae=np.asarray(abscissae, dtype=float),
            a_nonstiff=a_nonstiff,
            b_nonstiff=b_nonstiff,
        )

    @property
    def num_dimensions(self) -> int:
        return max(self.stage_dims)


def fsrk_to_gark(spec: FsrkSpec) -> GarkTableau:
    """Regroup fractional-step coefficients into per-dimension partitions.

    Stages are grouped by their implicit dimension; blocks are extracted by
    index selection.  When nonstiff coefficients are present they are
    prepended as partition 0 with every original stage.
    """
    n = spec.num_dimensions
    groups = [
        [j for j, d in enumerate(spec.stage_dims) if d == q] for q in range(1, n + 1)
    ]
    for q, idx in enumerate(groups, start=1):
        if not idx:
            raise ValueError(f"dimension {q} has no stage associated with it")
    blocks = [
        [spec.a_implicit[np.ix_(gi, gj)] for gj in groups] for gi in groups
    ]
    weights = [spec.b_implicit[gi] for gi in groups]
    times = [spec.abscissae[gi] for gi in groups]
    if spec.a_nonstiff is None:
        return GarkTableau(blocks=blocks, weights=weights, stage_times=times)
    a0 = spec.a_nonstiff
    blocks0 = [[a0] + [a0[:, gj] for gj in groups]]
    for gi, row in zip(groups, blocks):
        blocks0.append([a0[gi, :]] + row)
    weights0 = [spec.b_nonstiff] + weights
    times0 = [spec.abscissae] + times
    return GarkTableau(
        blocks=blocks0, weights=weights0, stage_times=times0, has_nonstiff=True
    )


def fsrk_from_gark(tableau: GarkTableau, stage_dims: Sequence[int]) -> FsrkSpec:
    """Flatten a grouped tableau back to fractional-step arrays (inverse mapping)."""
    n = tableau.num_partitions - (1 if tableau.has_nonstiff else 0)
    off = 1 if tableau.has_nonstiff else 0
    s = len(stage_dims)
    groups = [
        [j for j, d in enumerate(stage_dims) if d == q] for q in range(1, n + 1)
    ]
    a = np.zeros((s, s))
    b = np.zeros(s)
    c = np.zeros(s)
    for qi, gi in enumerate(groups):
        b[gi] = tableau.weights[qi + off]
        c[gi] = tableau.stage_times[qi + off]
        for qj, gj in enumerate(groups):
            a[np.ix_(gi, gj)] = tableau.blocks[qi + off][qj + off]
    a0 = b0 = None
    if tableau.has_nonstiff:
        a0 = np.array(tableau.blocks[0][0])
        b0 = np.array(tableau.weights[0])
    return FsrkSpec(
        stage_dims=tuple(stage_dims),
        a_implicit=a,
        b_implicit=b,
        abscissae=c,
        a_nonstiff=a0,
        b_nonstiff=b0,
    )


# -- new high-order alternating-direction methods ------------------------------


def _gamma_root() -> float:
    """Middle root of 6 g^3 - 18 g^2 + 9 g - 1, refined by Newton from 17 digits."""
    g = 0.43586652150845900
    for _ in range(50):
        step = (6.0 * g**3 - 18.0 * g**2 + 9.0 * g - 1.0) / (
            18.0 * g**2 - 36.0 * g + 9.0
        )
        g -= step
        if abs(step) < 1e-16:
            break
    return g


def adi_gark3(
    mode: AssemblyMode = AssemblyMode.ADI, n_partitions: int = 2
) -> StructuredTableau:
    """Four-stage order-3 scheme for sequential or level-parallel sweeps.

    The implicit component is a stiffly accurate ESDIRK method built on the
    middle root of 6 g^3 - 18 g^2 + 9 g - 1.
    """
    g = _gamma_root()
    implicit = np.array(
        [
            [0.0, 0.0, 0.0, 0.0],
            [g, g, 0.0, 0.0],
            [
                (215.0 * g + 424.0) / (2624.0 - 1536.0 * g),
                (264.0 - 841.0 * g) / (1536.0 * g + 448.0),
                g,
                0.0,
            ],
            [
                (2.0 * g + 1.0) / (4.0 * g + 8.0),
                (31.0 - 14.0 * g) / (352.0 - 900.0 * g),
                (320.0 * g + 224.0) / (575.0 - 477.0 * g),
                g,
            ],
        ]
    )
    explicit = np.array(
        [
            [0.0, 0.0, 0.0, 0.0],
            [2.0 * g, 0.0, 0.0, 0.0],
            [
                (12526987.0 * g + 655304.0) / (8876160.0 * g + 7175968.0),
                15.0 * (215.0 * g + 152.0) / (2144.0 * (92.0 * g - 9.0)),
                0.0,
                0.0,
            ],
            [
                (2370311.0 * g - 563481.0) / (134.0 * (17071.0 * g + 921.0)),
                (380783.0 - 137789.0 * g) / (134.0 * (17727.0 * g - 15511.0)),
                (1000.0 - 304.0 * g) / (1371.0 * g + 379.0),
                0.0,
            ],
        ]
    )
    c = np.array([0.0, 2.0 * g, (g + 2.0) / 4.0, 1.0])
    return _structured_pair(implicit, explicit, implicit[3], c, mode, n_partitions)


def adi_gark4(
    mode: AssemblyMode = AssemblyMode.ADI, n_partitions: int = 2
) -> StructuredTableau:
    """Six-stage order-4 scheme; all coupling conditions hold to round-off.

    Entries are evaluated from exact rational-plus-sqrt(2) expressions so the
    1/24 coupling identities survive in double precision.
    """
    r = math.sqrt(2.0)
    implicit = np.array(
        [
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.25, 0.25, 0.0, 0.0, 0.0, 0.0],
            [(1.0 - r) / 8.0, (1.0 - r) / 8.0, 0.25, 0.0, 0.0, 0.0],
            [
                (5.0 - 7.0 * r) / 64.0,
                (5.0 - 7.0 * r) / 64.0,
                7.0 * (r + 1.0) / 32.0,
                0.25,
                0.0,
                0.0,
            ],
            [
                (-54539.0 * r - 13796.0) / 125000.0,
                (-54539.0 * r - 13796.0) / 125000.0,
                (132109.0 * r + 506605.0) / 437500.0,
                166.0 * (376.0 * r - 97.0) / 109375.0,
                0.25,
                0.0,
            ],
            [
                (1181.0 - 987.0 * r) / 13782.0,
                (1181.0 - 987.0 * r) / 13782.0,
                47.0 * (1783.0 * r - 267.0) / 273343.0,
                16.0 * (-3525.0 * r + 22922.0) / 571953.0,
                15625.0 * (-376.0 * r - 97.0) / 90749876.0,
                0.25,
            ],
        ]
    )
    explicit = np.array(
        [
            [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            [0.5, 0.0, 0.0, 0.0, 0.0, 0.0],
            [4.0 / 7.0 - 1.0 / (2.0 * r), -1.0 / 14.0, 0.0, 0.0, 0.0, 0.0],
            [
                (192440351.0 * r + 245255777.0) / 1090446224.0,
                (1059385241.0 - 192440351.0 * r) / 1090446224.0,
                -4.0 / 7.0,
                0.0,
                0.0,
                0.0,
            ],
            [
                (3246103358815879.0 * r - 4074461458752694.0) / 1911688536450000.0,
                (15031561460125012.0 - 11088311262828073.0 * r) / 1911688536450000.0,
                (1307034650668699.0 * r - 1700986476469053.0) / 318614756075000.0,
                11.0 / 17.0,
                0.0,
                0.0,
            ],
            [
                (2357123976102849118.0 - 3355327406349634955.0 * r)
                / 1982691401525245488.0,
                (4815717108798877157.0 * r - 9817340273693398308.0)
                / 1982691401525245488.0,
                (3722435241465127195.0 - 759937254896120301.0 * r)
                / 991345700762622744.0,
                (7576400.0 * r + 387641523.0) / 385686973.0,
                625.0 * (376.0 * r + 97.0) / 22687469.0,
                0.0,
            ],
        ]
    )
    c = np.array([0.0, 0.5, (2.0 - r) / 4.0, 5.0 / 8.0, 26.0 / 25.0, 1.0])
    return _structured_pair(implicit, explicit, implicit[5], c, mode, n_partitions)


def _structured_pair(
    implicit: np.ndarray,
    explicit: np.ndarray,
    weights: np.ndarray,
    abscissae: np.ndarray,
    mode: AssemblyMode,
    n_partitions: int = 2,
) -> StructuredTableau:
    mode = AssemblyMode(mode)
    if mode is AssemblyMode.PARALLEL_ADI:
        lower = explicit
    else:
        lower = implicit
    return StructuredTableau(
        a_lower=lower,
        a_diag=implicit,
        a_upper=explicit,
        weights=weights,
        abscissae=abscissae,
        num_partitions=n_partitions,
        mode=mode,
    )


# -- name-based registry -------------------------------------------------------


@dataclass(frozen=True)
class MethodInfo:
    """Registry record: how to build a method and what order it should attain."""

    name: str
    summary: str
    build: Callable[..., GarkTableau]
    params: tuple[tuple[str, str, object], ...] = ()  # (name, kind, default)
    supports_mode: bool = False
    fixed_partitions: Optional[int] = None
    nominal_order: Callable[[int, dict], int] = lambda n, p: 1

    def tableau(self, n_partitions: int = 2, mode: str = "adi", **params) -> GarkTableau:
        if self.fixed_partitions is not None and n_partitions != self.fixed_partitions:
            raise ValueError(
                f"{self.name} is defined for exactly {self.fixed_partitions} partitions"
            )
        if self.supports_mode:
            return self.build(n_partitions, mode=AssemblyMode(mode), **params)
        return self.build(n_partitions, **params)


def _resolve_base(base) -> RkTableau:
    if isinstance(base, RkTableau):
        return base
    try:
        return BASE_METHODS[base]()
    except KeyError:
        raise ValueError(
            f"unknown base method {base!r}; choose from {sorted(BASE_METHODS)}"
        ) from None


def _base_order(base) -> int:
    from .order_conditions import rk_order

    t = _resolve_base(base)
    return rk_order(t.a, t.b)


REGISTRY: dict[str, MethodInfo] = {}


def _register(info: MethodInfo) -> None:
    REGISTRY[info.name] = info


_register(
    MethodInfo(
        name="lod-be",
        summary="sequential implicit Euler sweeps (locally one-dimensional)",
        build=lambda n: assemble_structured(lod_backward_euler(n)),
        nominal_order=lambda n, p: 1,
    )
)
_register(
    MethodInfo(
        name="yanenko",
        summary="sequential Crank-Nicolson sweeps",
        build=lambda n: yanenko_lod_cn(n),
        nominal_order=lambda n, p: 2 if n == 1 else 1,
    )
)
_register(
    MethodInfo(
        name="yanenko-symmetric",
        summary="forward-then-backward half sweeps of Crank-Nicolson type",
        build=lambda n: yanenko_symmetric(n),
        nominal_order=lambda n, p: 2,
    )
)
_register(
    MethodInfo(
        name="yanenko-parallel",
        summary="averaged forward and reversed Crank-Nicolson sweeps",
        build=lambda n: yanenko_parallel(n),
        nominal_order=lambda n, p: 2,
    )
)
_register(
    MethodInfo(
        name="trapezoidal",
        summary="explicit half sweep up, implicit half sweep down",
        build=lambda n: trapezoidal_splitting(n),
        nominal_order=lambda n, p: 2,
    )
)
_register(
    MethodInfo(
        name="douglas",
        summary="explicit predictor plus stabilizing corrections",
        build=lambda n, theta=0.5, f0=False: assemble_structured(douglas(n, theta, f0)),
        params=(("theta", "float", 0.5), ("f0", "bool", False)),
        nominal_order=lambda n, p: 2
        if p.get("theta", 0.5) == 0.5 and not p.get("f0", False)
        else 1,
    )
)
_register(
    MethodInfo(
        name="douglas-mod-first",
        summary="Douglas with an initial nonstiff correction stage",
        build=lambda n, theta=0.5: douglas_modified_first(n, theta),
        params=(("theta", "float", 0.5),),
        nominal_order=lambda n, p: 2 if p.get("theta", 0.5) == 0.5 else 1,
    )
)
_register(
    MethodInfo(
        name="douglas-mod-last",
        summary="Douglas with a final nonstiff correction stage",
        build=lambda n, theta=0.5: douglas_modified_last(n, theta),
        params=(("theta", "float", 0.5),),
        nominal_order=lambda n, p: 2 if p.get("theta", 0.5) == 0.5 else 1,
    )
)
_register(
    MethodInfo(
        name="mcs",
        summary="modified Craig-Sneyd double-sweep corrector",
        build=lambda n, theta=1.0 / 3.0, sigma=1.0 / 3.0, mu=1.0 / 6.0: modified_craig_sneyd(
            n, theta, sigma, mu
        ),
        params=(
            ("theta", "float", 1.0 / 3.0),
            ("sigma", "float", 1.0 / 3.0),
            ("mu", "float", 1.0 / 6.0),
        ),
        nominal_order=lambda n, p: 2
        if p.get("sigma", 1.0 / 3.0) == p.get("theta", 1.0 / 3.0)
        and p.get("mu", 1.0 / 6.0) == 0.5 - p.get("theta", 1.0 / 3.0)
        else 1,
    )
)
_register(
    MethodInfo(
        name="hv",
        summary="Hundsdorfer-Verwer double-sweep corrector",
        build=lambda n, theta=0.75, mu=0.5: hundsdorfer_verwer(n, theta, mu),
        params=(("theta", "float", 0.75), ("mu", "float", 0.5)),
        nominal_order=lambda n, p: 2 if p.get("mu", 0.5) == 0.5 else 1,
    )
)
_register(
    MethodInfo(
        name="strang",
        summary="symmetric sweep composition over a base RK method",
        build=lambda n, base="implicit-midpoint": strang(_resolve_base(base), n),
        params=(("base", "base", "implicit-midpoint"),),
        nominal_order=lambda n, p: min(2, _base_order(p.get("base", "implicit-midpoint"))),
    )
)
_register(
    MethodInfo(
        name="yoshida4",
        summary="order-4 triple-jump composition (two partitions)",
        build=lambda n, base="sdirk4": yoshida4(_resolve_base(base), n),
        params=(("base", "base", "sdirk4"),),
        fixed_partitions=2,
        nominal_order=lambda n, p: min(4, _base_order(p.get("base", "sdirk4"))),
    )
)
_register(
    MethodInfo(
        name="adi-gark3",
        summary="new four-stage order-3 alternating-direction scheme",
        build=lambda n, mode=AssemblyMode.ADI: assemble_structured(adi_gark3(mode, n)),
        supports_mode=True,
        nominal_order=lambda n, p: 3,
    )
)
_register(
    MethodInfo(
        name="adi-gark4",
        summary="new six-stage order-4 alternating-direction scheme",
        build=lambda n, mode=AssemblyMode.ADI: assemble_structured(adi_gark4(mode, n)),
        supports_mode=True,
        nominal_order=lambda n, p: 4,
    )
)


def build_method(
    name: str, n_partitions: int = 2, mode: str = "adi", **params
) -> GarkTableau:
    """Resolve a registry name into an assembled tableau."""
    try:
        info = REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown method {name!r}; see the registry listing") from None
    return info.tableau(n_partitions=n_partitions, mode=mode, **params)


def catalog_tableaus(n_partitions: int = 2) -> list[tuple[str, GarkTableau]]:
    """Canonical instantiation of every method, used by the test suites."""
    entries = [
        ("lod-be", build_method("lod-be", n_partitions)),
        ("yanenko", build_method("yanenko", n_partitions)),
        ("yanenko-symmetric", build_method("yanenko-symmetric", n_partitions)),
        ("yanenko-parallel", build_method("yanenko-parallel", n_partitions)),
        ("trapezoidal", build_method("trapezoidal", n_partitions)),
        ("douglas", build_method("douglas", n_partitions, theta=0.5)),
        ("douglas-f0", build_method("douglas", n_partitions, theta=0.5, f0=True)),
        ("douglas-mod-first", build_method("douglas-mod-first", n_partitions, theta=0.5)),
        ("douglas-mod-last", build_method("douglas-mod-last", n_partitions, theta=0.5)),
        ("mcs", build_method("mcs", n_partitions)),
        ("hv", build_method("hv", n_partitions)),
        ("strang", strang(implicit_midpoint(), n_partitions)),
    ]
    if n_partitions == 2:
        entries.append(("yoshida4", yoshida4(sdirk4())))
    entries += [
        ("adi-gark3", build_method("adi-gark3", n_partitions, mode="adi")),
        ("adi-gark3-parallel", build_method("adi-gark3", n_partitions, mode="parallel")),
        ("adi-gark4", build_method("adi-gark4", n_partitions, mode="adi")),
        ("adi-gark4-parallel", build_method("adi-gark4", n_partitions, mode="parallel")),
    ]
    return entries
