"""Partitioned Butcher tableaus with per-pair coupling blocks.

A tableau for an N-way additively partitioned Runge-Kutta method stores one
coefficient block per (partition, partition) pair, one weight vector per
partition, and the per-pair abscissae (row sums of each block).  Methods whose
stages can be reordered into a lower triangular coefficient matrix decouple
the implicit solves; detecting and producing such an ordering is the job of
:func:`find_imim_permutation`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "AssemblyMode",
    "GarkTableau",
    "NonstiffBlocks",
    "StagePermutation",
    "StructuredTableau",
    "assemble_structured",
    "find_imim_permutation",
    "is_internally_consistent",
    "is_stiffly_accurate",
    "permute",
    "vec_permutation",
]

# Entries below this fraction of the largest coefficient are treated as zero
# when building the stage dependency graph.
RELATIVE_ZERO = 1e-14


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class StagePermutation:
    """An ordering of the global stages, as (partition, stage) index pairs."""

    order: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.order)

    def inverse_of(self, tableau: "GarkTableau") -> np.ndarray:
        """Positions of each flattened stage in this ordering."""
        forward = np.array(
            [tableau.global_index(q, i) for q, i in self.order], dtype=int
        )
        inv = np.empty_like(forward)
        inv[forward] = np.arange(forward.size)
        return inv

    def matrix(self, tableau: "GarkTableau") -> np.ndarray:
        """The permutation matrix P with (P A P^T) reordering the stages."""
        s = tableau.total_stages
        p = np.zeros((s, s))
        for k, (q, i) in enumerate(self.order):
            p[k, tableau.global_index(q, i)] = 1.0
        return p


class GarkTableau:
    """N-way partitioned tableau: blocks A^(q,m), weights b^(q), abscissae c^(q,m).

    The abscissae are stored redundantly and checked against the block row
    sums, so that hand-entered coefficient errors surface at construction.
    ``stage_times`` holds the per-partition evaluation abscissae actually used
    when stepping non-autonomous problems; several classical splitting schemes
    declare times that differ from every per-pair row sum.  When a nonstiff
    partition is present it occupies index 0.

    Instances are immutable and safe to share across threads.
    """

    def __init__(
        self,
        blocks: Sequence[Sequence[np.ndarray]],
        weights: Sequence[np.ndarray],
        stage_times: Optional[Sequence[np.ndarray]] = None,
        abscissae: Optional[Sequence[Sequence[np.ndarray]]] = None,
        has_nonstiff: bool = False,
        tol: float = 1e-12,
    ):
        n = len(blocks)
        if n < 1 or any(len(row) != n for row in blocks):
            raise ValueError("blocks must form a square N x N grid")
        if len(weights) != n:
            raise ValueError("one weight vector per partition is required")
        self.weights = tuple(_freeze(w) for w in weights)
        counts = tuple(w.size for w in self.weights)
        grid = []
        for q in range(n):
            row = []
            for m in range(n):
                a = _freeze(blocks[q][m])
                if a.shape != (counts[q], counts[m]):
                    raise ValueError(
                        f"block ({q},{m}) must have shape {(counts[q], counts[m])},"
                        f" got {a.shape}"
                    )
                row.append(a)
            grid.append(tuple(row))
        self.blocks = tuple(grid)
        row_sums = tuple(
            tuple(np.sum(self.blocks[q][m], axis=1) for m in range(n)) for q in range(n)
        )
        if abscissae is None:
            self.abscissae = tuple(tuple(_freeze(c) for c in row) for row in row_sums)
        else:
            stored = []
            for q in range(n):
                row = []
                for m in range(n):
                    c = _freeze(abscissae[q][m])
                    if c.shape != (counts[q],) or not np.allclose(
                        c, row_sums[q][m], atol=tol, rtol=0.0
                    ):
                        raise ValueError(
                            f"abscissae ({q},{m}) disagree with block row sums"
                        )
                    row.append(c)
                stored.append(tuple(row))
            self.abscissae = tuple(stored)
        if stage_times is None:
            # Sensible default: the diagonal-block abscissae.  For internally
            # consistent methods every choice of m gives the same vector.
            self.stage_times = tuple(self.abscissae[q][q] for q in range(n))
        else:
            if len(stage_times) != n:
                raise ValueError("one stage-time vector per partition is required")
            self.stage_times = tuple(_freeze(t) for t in stage_times)
            for q, t in enumerate(self.stage_times):
                if t.shape != (counts[q],):
                    raise ValueError(f"stage_times[{q}] must have length {counts[q]}")
        self.has_nonstiff = bool(has_nonstiff)

    @property
    def num_partitions(self) -> int:
        return len(self.weights)

    @cached_property
    def stage_counts(self) -> tuple[int, ...]:
        return tuple(w.size for w in self.weights)

    @cached_property
    def total_stages(self) -> int:
        return sum(self.stage_counts)

    @cached_property
    def partition_offsets(self) -> tuple[int, ...]:
        offs, acc = [], 0
        for s in self.stage_counts:
            offs.append(acc)
            acc += s
        return tuple(offs)

    def global_index(self, partition: int, stage: int) -> int:
        return self.partition_offsets[partition] + stage

    @cached_property
    def stage_pairs(self) -> tuple[tuple[int, int], ...]:
        """All (partition, stage) pairs in flattened (partition-major) order."""
        return tuple(
            (q, i) for q in range(self.num_partitions) for i in range(self.stage_counts[q])
        )

    @cached_property
    def flat(self) -> tuple[np.ndarray, np.ndarray]:
        """The flattened (A, b) with stages ordered partition-major."""
        a = np.block([[self.blocks[q][m] for m in range(self.num_partitions)]
                      for q in range(self.num_partitions)])
        b = np.concatenate(self.weights)
        return a, b

    @cached_property
    def flat_stage_times(self) -> np.ndarray:
        return np.concatenate(self.stage_times)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GarkTableau):
            return NotImplemented
        return (
            self.stage_counts == other.stage_counts
            and self.has_nonstiff == other.has_nonstiff
            and all(
                np.array_equal(self.blocks[q][m], other.blocks[q][m])
                for q in range(self.num_partitions)
                for m in range(self.num_partitions)
            )
            and all(np.array_equal(a, b) for a, b in zip(self.weights, other.weights))
            and all(
                np.array_equal(a, b) for a, b in zip(self.stage_times, other.stage_times)
            )
        )

    # -- serialization ----------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "num_partitions": self.num_partitions,
            "stage_counts": list(self.stage_counts),
            "blocks": {
                f"{q},{m}": self.blocks[q][m].tolist()
                for q in range(self.num_partitions)
                for m in range(self.num_partitions)
            },
            "weights": [w.tolist() for w in self.weights],
            "stage_times": [t.tolist() for t in self.stage_times],
            "has_nonstiff": self.has_nonstiff,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "GarkTableau":
        n = int(data["num_partitions"])
        blocks = [[data["blocks"][f"{q},{m}"] for m in range(n)] for q in range(n)]
        return cls(
            blocks=blocks,
            weights=data["weights"],
            stage_times=data.get("stage_times"),
            has_nonstiff=bool(data.get("has_nonstiff", False)),
        )

    def dump_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def load_json(cls, path) -> "GarkTableau":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


class AssemblyMode(str, Enum):
    """How the lower/diagonal/upper coupling blocks of a structured tableau relate."""

    ADI = "adi"            # sequential sweeps: lower block equals the diagonal block
    PARALLEL_ADI = "parallel"  # level-parallel sweeps: lower block equals the upper block
    GENERAL = "general"


@dataclass(frozen=True)
class NonstiffBlocks:
    """Coefficients for a nonstiff partition prepended at index 0."""

    a00: np.ndarray          # nonstiff-on-nonstiff block
    aq0: np.ndarray          # nonstiff columns of every stiff partition row
    a0q: np.ndarray          # stiff columns of the nonstiff partition row
    weights: np.ndarray
    abscissae: np.ndarray

    def __post_init__(self):
        a00 = _freeze(self.a00)
        aq0 = _freeze(self.aq0)
        a0q = _freeze(self.a0q)
        w = _freeze(self.weights)
        c = _freeze(self.abscissae)
        s0 = w.size
        if a00.shape != (s0, s0):
            raise ValueError("a00 must be square with one row per nonstiff stage")
        if aq0.shape[1] != s0 or a0q.shape[0] != s0:
            raise ValueError("nonstiff coupling blocks have mismatched stage counts")
        if c.shape != (s0,):
            raise ValueError("nonstiff abscissae must match the stage count")
        for name, val in (("a00", a00), ("aq0", aq0), ("a0q", a0q), ("weights", w),
                          ("abscissae", c)):
            object.__setattr__(self, name, val)

    @property
    def stages(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class StructuredTableau:
    """Triple-block form (A_lower, A_diag, A_upper, b): one block per relation q vs m.

    The assembled tableau uses A_lower for m < q, A_diag for m = q and A_upper
    for m > q, with the same weights b in every partition.  A_upper must be
    strictly lower triangular and the other two lower triangular, so stages can
    always be swept level by level.  Note the abscissae are a declared vector:
    for some classical schemes (LOD backward Euler) the three blocks have
    different row sums by design, which the assembled tableau reports through
    :func:`is_internally_consistent`.
    """

    a_lower: np.ndarray
    a_diag: np.ndarray
    a_upper: np.ndarray
    weights: np.ndarray
    abscissae: np.ndarray
    num_partitions: int
    mode: AssemblyMode = AssemblyMode.GENERAL
    f0_blocks: Optional[NonstiffBlocks] = None

    def __post_init__(self):
        al = _freeze(self.a_lower)
        ad = _freeze(self.a_diag)
        au = _freeze(self.a_upper)
        b = _freeze(self.weights)
        c = _freeze(self.abscissae)
        s = b.size
        for name, a in (("a_lower", al), ("a_diag", ad), ("a_upper", au)):
            if a.shape != (s, s):
                raise ValueError(f"{name} must be {s}x{s} to match the weights")
        if c.shape != (s,):
            raise ValueError("abscissae must have one entry per stage")
        if self.num_partitions < 1:
            raise ValueError("at least one partition is required")
        if np.any(np.triu(au) != 0.0):
            raise ValueError("a_upper must be strictly lower triangular")
        if np.any(np.triu(ad, k=1) != 0.0) or np.any(np.triu(al, k=1) != 0.0):
            raise ValueError("a_diag and a_lower must be lower triangular")
        mode = AssemblyMode(self.mode)
        if mode is AssemblyMode.ADI and not np.array_equal(al, ad):
            raise ValueError("ADI assembly requires a_lower == a_diag")
        if mode is AssemblyMode.PARALLEL_ADI and not np.array_equal(al, au):
            raise ValueError("parallel assembly requires a_lower == a_upper")
        for name, val in (("a_lower", al), ("a_diag", ad), ("a_upper", au),
                          ("weights", b), ("abscissae", c)):
            object.__setattr__(self, name, val)
        object.__setattr__(self, "mode", mode)

    @property
    def stages(self) -> int:
        return self.weights.size


def assemble_structured(st: StructuredTableau) -> GarkTableau:
    """Expand a structured tableau into its full N-way block form."""
    n = st.num_partitions
    blocks: list[list[np.ndarray]] = []
    weights: list[np.ndarray] = []
    times: list[np.ndarray] = []
    if st.f0_blocks is not None:
        f0 = st.f0_blocks
        blocks.append([f0.a00] + [f0.a0q] * n)
        weights.append(f0.weights)
        times.append(f0.abscissae)
        lead: list[np.ndarray] = [f0.aq0]
    else:
        lead = []
    for q in range(n):
        row = list(lead)
        for m in range(n):
            if m < q:
                row.append(st.a_lower)
            elif m == q:
                row.append(st.a_diag)
            else:
                row.append(st.a_upper)
        blocks.append(row)
        weights.append(st.weights)
        times.append(st.abscissae)
    return GarkTableau(
        blocks=blocks,
        weights=weights,
        stage_times=times,
        has_nonstiff=st.f0_blocks is not None,
    )


def permute(
    tableau: GarkTableau, perm: StagePermutation
) -> tuple[np.ndarray, np.ndarray]:
    """Reorder the flattened tableau: returns (P A P^T, P b)."""
    a, b = tableau.flat
    idx = [tableau.global_index(q, i) for q, i in perm.order]
    if sorted(idx) != list(range(tableau.total_stages)):
        raise ValueError("permutation must cover every global stage exactly once")
    idx = np.asarray(idx)
    return a[np.ix_(idx, idx)], b[idx]


def vec_permutation(tableau: GarkTableau) -> StagePermutation:
    """Interleaved stage order: all partitions of level 1, then level 2, ..."""
    counts = set(tableau.stage_counts)
    if len(counts) != 1:
        raise ValueError("vec permutation requires equal stage counts per partition")
    s = counts.pop()
    order = [(q, i) for i in range(s) for q in range(tableau.num_partitions)]
    return StagePermutation(tuple(order))


def find_imim_permutation(tableau: GarkTableau) -> Optional[StagePermutation]:
    """A stage order making the flattened tableau lower triangular, if one exists.

    Stage j must precede stage i whenever A[i, j] is nonzero (diagonal entries
    are self-contained implicit solves and do not constrain the order).  Ties
    among simultaneously ready stages break by ascending (stage, partition), so
    structured tableaus yield the interleaved level-major order.
    """
    a, _ = tableau.flat
    s = tableau.total_stages
    scale = np.max(np.abs(a))
    thresh = RELATIVE_ZERO * scale if scale > 0 else 0.0
    depends = np.abs(a) > thresh
    np.fill_diagonal(depends, False)
    remaining = np.sum(depends, axis=1)
    pairs = tableau.stage_pairs
    done = np.zeros(s, dtype=bool)
    order: list[tuple[int, int]] = []
    for _ in range(s):
        ready = [
            k for k in range(s) if not done[k] and remaining[k] == 0
        ]
        if not ready:
            return None  # a multi-stage cycle: stages are mutually implicit
        k = min(ready, key=lambda k: (pairs[k][1], pairs[k][0]))
        done[k] = True
        order.append(pairs[k])
        remaining -= depends[:, k]
    return StagePermutation(tuple(order))


def is_internally_consistent(tableau: GarkTableau, tol: float = 1e-12) -> bool:
    """True when every partition sees identical abscissae across all couplings."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    for q in range(tableau.num_partitions):
        ref = tableau.abscissae[q][0]
        for m in range(1, tableau.num_partitions):
            if not np.allclose(tableau.abscissae[q][m], ref, atol=tol, rtol=0.0):
                return False
    return True


def _matches_last_row(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    return bool(np.allclose(b, a[-1, :], atol=tol, rtol=0.0))


def is_stiffly_accurate(
    tableau: GarkTableau, tol: float = 1e-12, up_to_permutation: bool = False
) -> bool:
    """Whether the weights replicate the final stage row (optionally after reordering)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = tableau.flat
    if _matches_last_row(a, b, tol):
        return True
    if not up_to_permutation:
        return False
    perm = find_imim_permutation(tableau)
    if perm is None:
        return False
    a_p, b_p = permute(tableau, perm)
    return _matches_last_row(a_p, b_p, tol)
