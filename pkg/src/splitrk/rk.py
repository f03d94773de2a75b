"""Plain Runge-Kutta tableaus used as building blocks for splitting schemes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class RkTableau:
    """A single Runge-Kutta method (A, b, c) with c defaulting to row sums of A."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"A must be square, got shape {a.shape}")
        if b.shape != (a.shape[0],):
            raise ValueError(f"b must have length {a.shape[0]}, got {b.shape}")
        c = np.sum(a, axis=1) if self.c is None else np.asarray(self.c, dtype=float)
        if c.shape != b.shape:
            raise ValueError("c must match the number of stages")
        for arr in (a, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def stages(self) -> int:
        return self.b.size


def implicit_euler() -> RkTableau:
    return RkTableau(a=[[1.0]], b=[1.0])


def implicit_midpoint() -> RkTableau:
    return RkTableau(a=[[0.5]], b=[1.0])


def trapezoidal_rule() -> RkTableau:
    return RkTableau(a=[[0.0, 0.0], [0.5, 0.5]], b=[0.5, 0.5])


def gauss2() -> RkTableau:
    """Two-stage Gauss-Legendre collocation, order 4 (fully implicit)."""
    r = np.sqrt(3.0) / 6.0
    return RkTableau(a=[[0.25, 0.25 - r], [0.25 + r, 0.25]], b=[0.5, 0.5])


def sdirk4() -> RkTableau:
    """Three-stage SDIRK of order 4 (Crouzeix), diagonally implicit."""
    g = 0.5 + np.cos(np.pi / 18.0) / np.sqrt(3.0)
    d = 1.0 / (6.0 * (2.0 * g - 1.0) ** 2)
    return RkTableau(
        a=[[g, 0.0, 0.0], [0.5 - g, g, 0.0], [2.0 * g, 1.0 - 4.0 * g, g]],
        b=[d, 1.0 - 2.0 * d, d],
    )


def classical_rk4() -> RkTableau:
    return RkTableau(
        a=[
            [0.0, 0.0, 0.0, 0.0],
            [0.5, 0.0, 0.0, 0.0],
            [0.0, 0.5, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
        ],
        b=[1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
    )


BASE_METHODS = {
    "implicit-euler": implicit_euler,
    "implicit-midpoint": implicit_midpoint,
    "trapezoidal-rule": trapezoidal_rule,
    "gauss2": gauss2,
    "sdirk4": sdirk4,
    "rk4": classical_rk4,
}
