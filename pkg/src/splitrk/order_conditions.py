"""Order-condition residuals for partitioned tableaus, through classical order 4."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations_with_replacement, product

import numpy as np

from .tableau import AssemblyMode, GarkTableau, StructuredTableau, is_internally_consistent

__all__ = [
    "ConditionResidual",
    "CouplingResiduals",
    "classical_order",
    "coupling_residuals_special",
    "residuals_up_to",
    "rk_order",
]

# Residuals of satisfied conditions sit near round-off (~1e-16) while violated
# ones are O(1e-2) or larger, so this threshold separates them cleanly even for
# coefficients built from irrational roots held in double precision.
DEFAULT_ORDER_TOL = 1e-10


@dataclass(frozen=True)
class ConditionResidual:
    """One order condition evaluated for one tuple of partition indices."""

    order: int
    condition_id: str
    partition_indices: tuple[int, ...]
    residual: float


def _conditions(tableau: GarkTableau, max_order: int):
    """Yield (order, id, indices, value, target) for every condition of order <= max_order."""
    n = tableau.num_partitions
    parts = range(n)
    b = tableau.weights
    c = tableau.abscissae
    a = tableau.blocks

    if max_order >= 1:
        for s in parts:
            yield 1, "b.1", (s,), float(np.sum(b[s])), 1.0
    if max_order >= 2:
        for s, v in product(parts, parts):
            yield 2, "b.c", (s, v), float(b[s] @ c[s][v]), 0.5
    if max_order >= 3:
        # the elementwise product c^(s,v) * c^(s,u) is symmetric in (v, u)
        for s in parts:
            for v, u in combinations_with_replacement(parts, 2):
                yield 3, "b.cc", (s, v, u), float(b[s] @ (c[s][v] * c[s][u])), 1.0 / 3.0
        for s, v, u in product(parts, parts, parts):
            yield 3, "b.A.c", (s, v, u), float(b[s] @ (a[s][v] @ c[v][u])), 1.0 / 6.0
    if max_order >= 4:
        for s in parts:
            for lam, u, v in combinations_with_replacement(parts, 3):
                val = float(b[s] @ (c[s][lam] * c[s][u] * c[s][v]))
                yield 4, "b.ccc", (s, lam, u, v), val, 0.25
        for s, u, v, lam in product(parts, parts, parts, parts):
            val = float((b[s] * c[s][u]) @ (a[s][v] @ c[v][lam]))
            yield 4, "bc.A.c", (s, u, v, lam), val, 0.125
        for s, lam in product(parts, parts):
            for u, v in combinations_with_replacement(parts, 2):
                val = float(b[s] @ (a[s][lam] @ (c[lam][u] * c[lam][v])))
                yield 4, "b.A.cc", (s, lam, u, v), val, 1.0 / 12.0
        for s, lam, v, u in product(parts, parts, parts, parts):
            val = float(b[s] @ (a[s][lam] @ (a[lam][v] @ c[v][u])))
            yield 4, "b.A.A.c", (s, lam, v, u), val, 1.0 / 24.0


def residuals_up_to(tableau: GarkTableau, p: int) -> list[ConditionResidual]:
    """All condition residuals of orders 1..p over every tuple of partition indices."""
    if not 1 <= p <= 4:
        raise ValueError("order must be between 1 and 4")
    return [
        ConditionResidual(order, cid, idx, value - target)
        for order, cid, idx, value, target in _conditions(tableau, p)
    ]


def classical_order(tableau: GarkTableau, tol: float = DEFAULT_ORDER_TOL) -> int:
    """Largest p <= 4 whose conditions all hold within tol (0 if order 1 fails)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    worst = [0.0] * 5
    for order, _, _, value, target in _conditions(tableau, 4):
        worst[order] = max(worst[order], abs(value - target))
    p = 0
    while p < 4 and worst[p + 1] < tol:
        p += 1
    return p


@dataclass(frozen=True)
class CouplingResiduals:
    """The six triple-product coupling residuals against 1/24 for a structured tableau.

    Keys name the block pair in application order, e.g. ``"DU"`` is
    b^T A_diag A_upper c - 1/24.  ``redundant`` marks the conditions implied by
    the assembly mode's block equalities; ``internally_consistent`` flags
    whether the reduction to these six conditions was justified for the input.
    """

    residuals: dict[str, float]
    redundant: frozenset[str]
    internally_consistent: bool

    @property
    def independent(self) -> dict[str, float]:
        return {k: v for k, v in self.residuals.items() if k not in self.redundant}


def coupling_residuals_special(st: StructuredTableau) -> CouplingResiduals:
    """Evaluate the order-4 coupling conditions on the three coupling blocks."""
    b, c = st.weights, st.abscissae
    named = {"L": st.a_lower, "D": st.a_diag, "U": st.a_upper}
    residuals = {
        first + second: float(b @ (named[first] @ (named[second] @ c))) - 1.0 / 24.0
        for first, second in ("DU", "UD", "LU", "UL", "DL", "LD")
    }
    if st.mode in (AssemblyMode.ADI, AssemblyMode.PARALLEL_ADI):
        redundant = frozenset({"LU", "UL", "DL", "LD"})
    else:
        redundant = frozenset()
    from .tableau import assemble_structured

    consistent = is_internally_consistent(assemble_structured(st))
    return CouplingResiduals(residuals, redundant, consistent)


def rk_order(a: np.ndarray, b: np.ndarray, tol: float = DEFAULT_ORDER_TOL) -> int:
    """Classical order (capped at 4) of a single Runge-Kutta method (A, b)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or b.shape != (a.shape[0],):
        raise ValueError("need a square A and a matching weight vector")
    c = np.sum(a, axis=1)
    by_order = {
        1: [np.sum(b) - 1.0],
        2: [b @ c - 0.5],
        3: [b @ c**2 - 1.0 / 3.0, b @ (a @ c) - 1.0 / 6.0],
        4: [
            b @ c**3 - 0.25,
            (b * c) @ (a @ c) - 0.125,
            b @ (a @ c**2) - 1.0 / 12.0,
            b @ (a @ (a @ c)) - 1.0 / 24.0,
        ],
    }
    p = 0
    while p < 4 and all(abs(r) < tol for r in by_order[p + 1]):
        p += 1
    return p
