"""Manufactured heat-equation test problems and small synthetic ODEs.

Both heat problems live on the unit square/cube with Dirichlet data taken
from a closed-form solution that is quadratic in each coordinate, so second
order central differences reproduce the spatial derivatives exactly and the
measured error is purely temporal.  The discrete operator splits by
direction into batches of independent tridiagonal lines.
"""

from __future__ import annotations

import math
from functools import reduce
from typing import Sequence

import numpy as np

from .integrator import LinearPartition, PartitionedOde, TridiagonalFactorization

__all__ = [
    "HeatProblem",
    "LineDiffusionPartition",
    "dahlquist",
    "fit_order",
    "heat2d",
    "heat3d",
    "l2_error",
    "l2_error_raw",
]


class LineDiffusionPartition(LinearPartition):
    """Second-difference operator along one grid direction, plus its source share.

    The state is the flattened interior grid (C order); applying or inverting
    the operator reshapes so the owned axis is contiguous and treats every
    grid line as an independent tridiagonal system.  Sources here are
    separable, phi(t) = exp(t) * w, with w fixed at construction.
    """

    is_linear = True

    def __init__(self, shape: tuple[int, ...], axis: int, spacing: float,
                 source_profile: np.ndarray):
        self.shape = shape
        self.axis = axis
        self.spacing = spacing
        self._profile = source_profile
        self._factor_cache: dict[float, TridiagonalFactorization] = {}
        self._dense = None

    def operator(self, y: np.ndarray) -> np.ndarray:
        u = np.moveaxis(y.reshape(self.shape), self.axis, -1)
        out = -2.0 * u
        out[..., 1:] += u[..., :-1]
        out[..., :-1] += u[..., 1:]
        out /= self.spacing**2
        return np.moveaxis(out, -1, self.axis).reshape(-1)

    def source_at(self, t: float) -> np.ndarray:
        return math.exp(t) * self._profile

    def solve_shifted(self, coeff: float, rhs: np.ndarray) -> np.ndarray:
        fact = self._factor_cache.get(coeff)
        if fact is None:
            n = self.shape[self.axis]
            ratio = coeff / self.spacing**2
            fact = TridiagonalFactorization(
                np.full(n - 1, -ratio), np.full(n, 1.0 + 2.0 * ratio),
                np.full(n - 1, -ratio)
            )
            self._factor_cache[coeff] = fact
        lines = np.moveaxis(rhs.reshape(self.shape), self.axis, -1)
        out_shape = lines.shape
        solved = fact.solve(lines.reshape(-1, out_shape[-1]).T).T
        return np.moveaxis(solved.reshape(out_shape), -1, self.axis).reshape(-1)

    def dense_operator(self) -> np.ndarray:
        if self._dense is None:
            n = self.shape[self.axis]
            line = (
                np.diag(np.full(n - 1, 1.0), -1)
                - 2.0 * np.eye(n)
                + np.diag(np.full(n - 1, 1.0), 1)
            ) / self.spacing**2
            mats = [line if k == self.axis else np.eye(m)
                    for k, m in enumerate(self.shape)]
            self._dense = reduce(np.kron, mats)
        return self._dense


class HeatProblem:
    """Method-of-lines heat equation with a known solution, split by direction."""

    def __init__(self, dim: int, points: int, solution_profile, source_profile):
        if dim not in (2, 3):
            raise ValueError("supported spatial dimensions are 2 and 3")
        if points < 2:
            raise ValueError("need at least two interior grid points per direction")
        self.dim = dim
        self.points = points
        self.spacing = 1.0 / (points + 1)
        self.shape = (points,) * dim
        self.size = points**dim
        self._solution_profile = solution_profile
        interior = self.spacing * np.arange(1, points + 1)
        grids = np.meshgrid(*([interior] * dim), indexing="ij")
        self._u_profile = solution_profile(*grids).reshape(-1)
        full_source = source_profile(*grids).reshape(-1)
        self.partitions = [
            LineDiffusionPartition(
                self.shape,
                axis,
                self.spacing,
                full_source / dim + self._boundary_profile(solution_profile, grids, axis),
            )
            for axis in range(dim)
        ]

    def _boundary_profile(self, solution_profile, grids, axis: int) -> np.ndarray:
        """Dirichlet data entering the stencil of the first and last layer on one axis."""
        w = np.zeros(self.shape)
        lo = [g.take(indices=[0], axis=axis) for g in grids]
        hi = [g.take(indices=[-1], axis=axis) for g in grids]
        lo[axis] = np.zeros_like(lo[axis])
        hi[axis] = np.ones_like(hi[axis])
        index = [slice(None)] * self.dim
        index[axis] = 0
        w[tuple(index)] = solution_profile(*lo).squeeze(axis=axis)
        index[axis] = -1
        w[tuple(index)] += solution_profile(*hi).squeeze(axis=axis)
        return w.reshape(-1) / self.spacing**2

    def exact(self, t: float) -> np.ndarray:
        return math.exp(t) * self._u_profile

    def exact_at(self, t: float, *coords: float) -> float:
        """Closed-form solution at an arbitrary point (boundary included)."""
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates")
        return float(math.exp(t) * self._solution_profile(*coords))

    def exact_dt(self, t: float) -> np.ndarray:
        # both manufactured solutions carry a pure exp(t) time factor
        return math.exp(t) * self._u_profile

    def ode(self) -> PartitionedOde:
        return PartitionedOde(
            dim=self.size, partitions=self.partitions, exact=self.exact
        )

    def spatial_residual(self, t: float) -> float:
        """Max norm of (sum_m L_m u + sum_m phi_m - u_t) at the exact solution."""
        u = self.exact(t)
        total = np.zeros(self.size)
        for part in self.partitions:
            total += part.operator(u) + part.source_at(t)
        return float(np.max(np.abs(total - self.exact_dt(t))))


def _solution_2d(x, y):
    return (1.0 - x) * x * (1.0 - y) * y + (x + 1.0 / 3.0) ** 2 + (y + 1.0 / 4.0) ** 2


def _source_2d(x, y):
    return (
        (1.0 - x) * x * (1.0 - y) * y
        + ((x + 1.0 / 3.0) ** 2 + (y + 1.0 / 4.0) ** 2 - 4.0)
        + 2.0 * (1.0 - x) * x
        + 2.0 * (1.0 - y) * y
    )


def _solution_3d(x, y, z):
    return (1.0 - x) * x * (1.0 - y) * y * (1.0 - z) * z + (
        (x + 1.0 / 3.0) ** 2 + (y + 1.0 / 4.0) ** 2 + (z + 1.0 / 2.0) ** 2
    )


def _source_3d(x, y, z):
    return (
        (1.0 - x) * x * (1.0 - y) * y * (1.0 - z) * z
        + 2.0 * (1.0 - x) * x * (1.0 - y) * y
        + 2.0 * (1.0 - x) * x * (1.0 - z) * z
        + 2.0 * (1.0 - y) * y * (1.0 - z) * z
        - 6.0
        + ((x + 1.0 / 3.0) ** 2 + (y + 1.0 / 4.0) ** 2 + (z + 1.0 / 2.0) ** 2)
    )


def heat2d(points: int) -> HeatProblem:
    """Heat equation on the unit square with a quadratic-in-space solution."""
    return HeatProblem(2, points, _solution_2d, _source_2d)


def heat3d(points: int) -> HeatProblem:
    """Heat equation on the unit cube with a quadratic-in-space solution."""
    return HeatProblem(3, points, _solution_3d, _source_3d)


def dahlquist(rates: Sequence[complex]) -> PartitionedOde:
    """The scalar split linear test problem y' = sum_m lambda_m y."""
    parts = [LinearPartition(np.array([[lam]], dtype=complex)) for lam in rates]
    return PartitionedOde(dim=1, partitions=parts)


def l2_error(y: np.ndarray, problem: HeatProblem, t: float) -> float:
    """Root-mean-square distance to the exact solution at the mesh points."""
    y = np.asarray(y)
    if y.shape != (problem.size,):
        raise ValueError(
            f"state has length {y.size}, the grid has {problem.size} interior points"
        )
    return float(np.linalg.norm(y - problem.exact(t)) / math.sqrt(problem.size))


def l2_error_raw(y: np.ndarray, problem: HeatProblem, t: float) -> float:
    """Unweighted 2-norm companion of :func:`l2_error`."""
    return l2_error(y, problem, t) * math.sqrt(problem.size)


def fit_order(step_counts: Sequence[int], errors: Sequence[float]) -> float:
    """Least-squares slope of log(error) against log(1/steps)."""
    steps = np.asarray(step_counts, dtype=float)
    errs = np.asarray(errors, dtype=float)
    if steps.size < 2 or steps.size != errs.size:
        raise ValueError("need at least two (steps, error) pairs")
    if np.any(errs <= 0.0):
        raise ValueError("errors must be positive to fit a convergence order")
    return float(np.polyfit(np.log(1.0 / steps), np.log(errs), 1)[0])
