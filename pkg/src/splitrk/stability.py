"""Linear stability: the multi-argument amplification factor and its stiff limits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence, Union

import numpy as np

from .tableau import (
    GarkTableau,
    StructuredTableau,
    assemble_structured,
    is_stiffly_accurate,
    permute,
    vec_permutation,
)

__all__ = [
    "RegionScan",
    "StabilitySample",
    "scan_region",
    "stability_value",
    "stiff_limit_esdirk",
    "stiff_limit_invertible",
]

# |R| at or below this counts as stable; the slack absorbs round-off exactly on
# the boundary of A-stable methods.
STABLE_THRESHOLD = 1.0 + 1e-12

# Beyond this magnitude the direct form of R suffers catastrophic cancellation,
# so stiffly accurate tableaus switch to the last-stage formula.
LARGE_ARGUMENT = 1e8


@dataclass(frozen=True)
class StabilitySample:
    """Amplification R(z) at one vector of per-partition arguments z = h*lambda."""

    z: tuple[complex, ...]
    value: complex


def _stage_arguments(tableau: GarkTableau, z: Sequence[complex]) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    if z.shape != (tableau.num_partitions,):
        raise ValueError(
            f"need one argument per partition, got {z.size} for"
            f" {tableau.num_partitions} partitions"
        )
    if not np.all(np.isfinite(z)):
        raise ValueError("stability arguments must be finite")
    return np.repeat(z, tableau.stage_counts)


def stability_value(tableau: GarkTableau, z: Sequence[complex]) -> complex:
    """R(z) = 1 + b^T Z (I - A Z)^{-1} 1 via one dense complex solve.

    For stiffly accurate tableaus with very large |z| the equivalent
    last-stage form is used, which is immune to the cancellation in 1 + b^T Z x.
    """
    a, b = tableau.flat
    zs = _stage_arguments(tableau, z)
    m = np.eye(tableau.total_stages, dtype=complex) - a * zs[np.newaxis, :]
    try:
        x = np.linalg.solve(m, np.ones(tableau.total_stages, dtype=complex))
    except np.linalg.LinAlgError:
        raise np.linalg.LinAlgError(
            "singular staged system: the stage equations have no unique solution"
        ) from None
    if np.max(np.abs(zs)) > LARGE_ARGUMENT and is_stiffly_accurate(tableau):
        return complex(x[-1])
    return complex(1.0 + (b * zs) @ x)


def stiff_limit_invertible(tableau: GarkTableau) -> complex:
    """The limit value 1 - b^T A^{-1} 1 for stiffly accurate, invertible tableaus."""
    a, b = tableau.flat
    if not is_stiffly_accurate(tableau):
        raise ValueError("the invertible-limit formula requires stiff accuracy")
    try:
        x = np.linalg.solve(a, np.ones(tableau.total_stages))
    except np.linalg.LinAlgError:
        raise np.linalg.LinAlgError("the flattened coefficient matrix is singular") from None
    return complex(1.0 - b @ x)


def stiff_limit_esdirk(st: StructuredTableau) -> float:
    """Equal-argument stiff limit for structured tableaus with an explicit first stage.

    Works on the level-interleaved ordering: with the first stage level
    explicit, the limit is -e_last^T T^{-1} C 1 where T is the trailing block
    and C couples the trailing stages back to level one.  Any nonstiff
    partition is excluded; the limit is taken in the stiff arguments only.
    """
    if st.a_diag[0, 0] != 0.0 or np.any(st.a_lower[0, :] != 0.0):
        raise ValueError("the reduction requires an explicit first stage")
    stiff_only = StructuredTableau(
        a_lower=st.a_lower,
        a_diag=st.a_diag,
        a_upper=st.a_upper,
        weights=st.weights,
        abscissae=st.abscissae,
        num_partitions=st.num_partitions,
        mode=st.mode,
    )
    tableau = assemble_structured(stiff_only)
    perm = vec_permutation(tableau)
    a_p, _ = permute(tableau, perm)
    n = tableau.num_partitions
    trailing = a_p[n:, n:]
    coupling = a_p[n:, :n]
    try:
        x = np.linalg.solve(trailing, coupling @ np.ones(n))
    except np.linalg.LinAlgError:
        raise np.linalg.LinAlgError("the trailing stage block is singular") from None
    return float(-x[-1])


@dataclass(frozen=True)
class RegionScan:
    """|R| sampled on a rectangular grid in the complex plane."""

    re: np.ndarray
    im: np.ndarray
    magnitude: np.ndarray  # shape (im.size, re.size)
    coupling: Union[str, int]

    @property
    def stable(self) -> np.ndarray:
        return self.magnitude <= STABLE_THRESHOLD

    def samples(self) -> Iterator[StabilitySample]:
        for j, y in enumerate(self.im):
            for k, x in enumerate(self.re):
                yield StabilitySample(
                    z=(complex(x, y),), value=complex(self.magnitude[j, k])
                )


def _coupling_weights(tableau: GarkTableau, coupling: Union[str, int]) -> np.ndarray:
    n = tableau.num_partitions
    if coupling == "equal":
        return np.ones(n)
    axis = int(coupling)
    if not 0 <= axis < n:
        raise ValueError(f"coupling axis {axis} out of range for {n} partitions")
    w = np.zeros(n)
    w[axis] = 1.0
    return w


def scan_region(
    tableau: GarkTableau,
    re_range: tuple[float, float],
    im_range: tuple[float, float],
    resolution: Union[int, tuple[int, int]],
    coupling: Union[str, int] = "equal",
) -> RegionScan:
    """Sample |R| over a grid; 'equal' sets every partition argument to z.

    An integer coupling applies z to that partition only, holding the others
    at zero.  Grid points where the staged system is singular report inf.
    """
    if isinstance(resolution, int):
        res_re = res_im = resolution
    else:
        res_re, res_im = resolution
    if res_re < 2 or res_im < 2:
        raise ValueError("resolution must be at least 2 per axis")
    weights = _coupling_weights(tableau, coupling)
    re = np.linspace(re_range[0], re_range[1], res_re)
    im = np.linspace(im_range[0], im_range[1], res_im)
    zz = (re[np.newaxis, :] + 1j * im[:, np.newaxis]).ravel()
    per_stage = np.repeat(weights, tableau.stage_counts)
    a, b = tableau.flat
    s = tableau.total_stages
    zs = zz[:, np.newaxis] * per_stage[np.newaxis, :]
    systems = np.eye(s, dtype=complex)[np.newaxis, :, :] - a[np.newaxis, :, :] * zs[
        :, np.newaxis, :
    ]
    ones = np.ones(s, dtype=complex)
    try:
        x = np.linalg.solve(systems, np.broadcast_to(ones, (zz.size, s)))
        values = 1.0 + np.einsum("ks,ks->k", zs * b[np.newaxis, :], x)
    except np.linalg.LinAlgError:
        values = np.empty(zz.size, dtype=complex)
        for k in range(zz.size):
            try:
                values[k] = stability_value(tableau, zz[k] * weights)
            except np.linalg.LinAlgError:
                values[k] = np.inf
    magnitude = np.abs(values).reshape(im.size, re.size)
    return RegionScan(re=re, im=im, magnitude=magnitude, coupling=coupling)
