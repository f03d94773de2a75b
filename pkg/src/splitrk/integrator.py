"""Time stepping of partitioned ODEs with stage sweeps in a decoupling order.

A step executes stages in an order that makes the coefficient matrix lower
triangular, so each implicit stage involves exactly one unknown stage vector.
Linear partitions solve one shifted system per implicit stage (with cached
factorizations when the shift repeats); nonlinear partitions run Newton.
A dense simultaneous solve of all stage equations is provided as a
verification oracle for linear problems.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .tableau import GarkTableau, StagePermutation, find_imim_permutation, permute

__all__ = [
    "FunctionPartition",
    "IntegrationResult",
    "LinearPartition",
    "NewtonError",
    "PartitionedOde",
    "StepDiagnostics",
    "Stepper",
    "StepperConfig",
    "TridiagonalFactorization",
    "dense_staged_oracle_step",
    "integrate",
    "step",
    "thomas_solve",
]


class NewtonError(RuntimeError):
    """An implicit stage solve failed to converge."""


# -- tridiagonal solves --------------------------------------------------------


class TridiagonalFactorization:
    """No-pivot LU of a tridiagonal matrix, reusable across right-hand sides.

    Intended for the diagonally dominant systems (I - coeff * stencil) arising
    from one-dimensional diffusion lines; the factorization is the expensive
    part only relative to the O(n) sweeps, so caching it pays off when the same
    shift recurs across stages and steps.
    """

    def __init__(self, lower: np.ndarray, diag: np.ndarray, upper: np.ndarray):
        lower = np.asarray(lower, dtype=float)
        diag = np.asarray(diag, dtype=float)
        upper = np.asarray(upper, dtype=float)
        n = diag.size
        if lower.size != n - 1 or upper.size != n - 1:
            raise ValueError("off-diagonals must have one entry fewer than the diagonal")
        pivots = np.empty(n)
        mults = np.empty(max(n - 1, 0))
        pivots[0] = diag[0]
        for i in range(1, n):
            if pivots[i - 1] == 0.0:
                raise np.linalg.LinAlgError("zero pivot encountered in tridiagonal solve")
            mults[i - 1] = lower[i - 1] / pivots[i - 1]
            pivots[i] = diag[i] - mults[i - 1] * upper[i - 1]
        if pivots[-1] == 0.0:
            raise np.linalg.LinAlgError("zero pivot encountered in tridiagonal solve")
        self.n = n
        self._pivots = pivots
        self._mults = mults
        self._upper = upper

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solve for one vector (n,) or a batch of columns (n, k)."""
        x = np.array(rhs, dtype=np.result_type(rhs, float))
        if x.shape[0] != self.n:
            raise ValueError("right-hand side does not match the system size")
        for i in range(1, self.n):
            x[i] -= self._mults[i - 1] * x[i - 1]
        x[-1] /= self._pivots[-1]
        for i in range(self.n - 2, -1, -1):
            x[i] = (x[i] - self._upper[i] * x[i + 1]) / self._pivots[i]
        return x


def thomas_solve(
    lower: np.ndarray, diag: np.ndarray, upper: np.ndarray, rhs: np.ndarray
) -> np.ndarray:
    """One-shot tridiagonal solve without pivoting."""
    return TridiagonalFactorization(lower, diag, upper).solve(rhs)


# -- right-hand-side partitions -------------------------------------------------


class LinearPartition:
    """Partition of the form f(t, y) = L y + phi(t) with constant L."""

    is_linear = True

    def __init__(self, matrix: np.ndarray, source: Optional[Callable] = None):
        self._matrix = np.asarray(matrix)
        self._source = source
        self._shift_cache: dict[float, np.ndarray] = {}

    def operator(self, y: np.ndarray) -> np.ndarray:
        return self._matrix @ y

    def source_at(self, t: float) -> Optional[np.ndarray]:
        return None if self._source is None else np.asarray(self._source(t))

    def __call__(self, t: float, y: np.ndarray) -> np.ndarray:
        out = self.operator(y)
        phi = self.source_at(t)
        return out if phi is None else out + phi

    def jacobian(self, t: float, y: np.ndarray) -> np.ndarray:
        return self.dense_operator()

    def dense_operator(self) -> np.ndarray:
        return self._matrix

    def solve_shifted_dense(self, coeff: float, rhs: np.ndarray) -> np.ndarray:
        mat = self._shift_cache.get(coeff)
        if mat is None:
            l = self.dense_operator()
            mat = np.eye(l.shape[0], dtype=l.dtype) - coeff * l
            self._shift_cache[coeff] = mat
        return np.linalg.solve(mat, rhs)

    # Structured subclasses override this with a cheaper solve.
    solve_shifted = solve_shifted_dense


class FunctionPartition:
    """General partition given by a callable f(t, y) and optionally its Jacobian."""

    is_linear = False

    def __init__(self, f: Callable, jacobian: Optional[Callable] = None):
        self._f = f
        self._jacobian = jacobian

    def __call__(self, t: float, y: np.ndarray) -> np.ndarray:
        return np.asarray(self._f(t, y))

    def jacobian(self, t: float, y: np.ndarray) -> np.ndarray:
        if self._jacobian is None:
            raise ValueError("an implicit nonlinear stage needs a Jacobian evaluator")
        return np.asarray(self._jacobian(t, y))


class _ZeroPartition(LinearPartition):
    """Stand-in for an absent nonstiff term."""

    def __init__(self, dim: int):
        self._dim = dim
        self._shift_cache = {}
        self._source = None

    def operator(self, y):
        return np.zeros_like(y)

    def __call__(self, t, y):
        return np.zeros_like(y)

    def dense_operator(self):
        return np.zeros((self._dim, self._dim))

    def solve_shifted(self, coeff, rhs):
        return np.array(rhs)

    solve_shifted_dense = solve_shifted


@dataclass
class PartitionedOde:
    """An additively split right-hand side, plus optional nonstiff and exact parts.

    ``partitions`` holds the stiff terms; ``nonstiff`` (if any) is the term a
    tableau's prepended partition 0 applies to.  ``exact`` is used only for
    error measurement.
    """

    dim: int
    partitions: Sequence
    nonstiff: Optional[object] = None
    exact: Optional[Callable[[float], np.ndarray]] = None


def _map_partitions(tableau: GarkTableau, ode: PartitionedOde) -> list:
    stiff = list(ode.partitions)
    if tableau.has_nonstiff:
        if tableau.num_partitions != len(stiff) + 1:
            raise ValueError(
                f"tableau couples {tableau.num_partitions - 1} stiff partitions,"
                f" the problem provides {len(stiff)}"
            )
        lead = ode.nonstiff if ode.nonstiff is not None else _ZeroPartition(ode.dim)
        return [lead] + stiff
    if tableau.num_partitions != len(stiff):
        raise ValueError(
            f"tableau couples {tableau.num_partitions} partitions,"
            f" the problem provides {len(stiff)}"
        )
    return stiff


# -- stepping -------------------------------------------------------------------


@dataclass
class StepperConfig:
    newton_tol: float = 1e-12
    newton_max_iters: int = 50
    linear_solver: str = "tridiagonal-per-line"  # or "dense"
    parallel_stages: bool = False

    def __post_init__(self):
        if self.newton_tol <= 0 or self.newton_max_iters < 1:
            raise ValueError("invalid Newton settings")
        if self.linear_solver not in ("dense", "tridiagonal-per-line"):
            raise ValueError("linear_solver must be 'dense' or 'tridiagonal-per-line'")


@dataclass
class StepDiagnostics:
    newton_iterations: list[int] = field(default_factory=list)

    @property
    def total_newton_iterations(self) -> int:
        return sum(self.newton_iterations)


@dataclass
class IntegrationResult:
    y: np.ndarray
    t: float
    diagnostics: list[StepDiagnostics]


class Stepper:
    """Sweeps the stages of one tableau over one problem, reusing factorizations.

    An instance is confined to a single thread; create separate instances for
    concurrent integrations.
    """

    def __init__(
        self,
        tableau: GarkTableau,
        ode: PartitionedOde,
        config: Optional[StepperConfig] = None,
        permutation: Optional[StagePermutation] = None,
    ):
        self.tableau = tableau
        self.ode = ode
        self.config = config or StepperConfig()
        if permutation is None:
            permutation = find_imim_permutation(tableau)
            if permutation is None:
                raise ValueError(
                    "the tableau admits no decoupling stage order; stages are"
                    " mutually implicit"
                )
        self.permutation = permutation
        self._a, self._b = permute(tableau, permutation)
        if np.any(np.triu(self._a, k=1) != 0.0):
            raise ValueError("the supplied stage order does not decouple the tableau")
        order = permutation.order
        self._partition_of = np.array([q for q, _ in order], dtype=int)
        self._time_of = np.array(
            [tableau.stage_times[q][i] for q, i in order], dtype=float
        )
        self._parts = _map_partitions(tableau, ode)
        self._groups = self._independent_groups()
        self.last_diagnostics: Optional[StepDiagnostics] = None

    def _independent_groups(self) -> list[list[int]]:
        """Consecutive runs of stages with no coupling inside the run."""
        s = self._a.shape[0]
        groups: list[list[int]] = []
        current: list[int] = []
        for k in range(s):
            if current and np.any(self._a[k, current[0] : k] != 0.0):
                groups.append(current)
                current = []
            current.append(k)
        if current:
            groups.append(current)
        return groups

    def _solve_stage(self, k: int, rhs: np.ndarray, t: float, h: float):
        """Returns (f value at the solved stage, Newton iterations used)."""
        part = self._parts[self._partition_of[k]]
        kappa = h * self._a[k, k]
        t_stage = t + self._time_of[k] * h
        iters = 0
        if kappa == 0.0:
            y_stage = rhs
        elif getattr(part, "is_linear", False):
            phi = part.source_at(t_stage)
            b = rhs if phi is None else rhs + kappa * phi
            if self.config.linear_solver == "dense":
                y_stage = part.solve_shifted_dense(kappa, b)
            else:
                y_stage = part.solve_shifted(kappa, b)
        else:
            y_stage, iters = self._newton(part, kappa, rhs, t_stage)
        return part(t_stage, y_stage), iters

    def _newton(self, part, kappa: float, rhs: np.ndarray, t_stage: float):
        cfg = self.config
        y = np.array(rhs, dtype=np.result_type(rhs, float))
        eye = np.eye(y.size)
        for it in range(1, cfg.newton_max_iters + 1):
            residual = y - kappa * part(t_stage, y) - rhs
            scale = 1.0 + np.max(np.abs(y))
            if np.max(np.abs(residual)) <= cfg.newton_tol * scale:
                return y, it - 1
            jac = part.jacobian(t_stage, y)
            try:
                delta = np.linalg.solve(eye - kappa * jac, residual)
            except np.linalg.LinAlgError:
                raise np.linalg.LinAlgError("singular stage matrix in Newton solve") from None
            y = y - delta
        raise NewtonError(
            f"stage solve did not reach {cfg.newton_tol:g} in"
            f" {cfg.newton_max_iters} iterations"
        )

    def step(self, t: float, y: np.ndarray, h: float) -> np.ndarray:
        """Advance one step of size h from (t, y)."""
        if h == 0.0:
            raise ValueError("the step size must be nonzero")
        y = np.asarray(y)
        s = self._a.shape[0]
        f_vals = np.empty((s, y.size), dtype=np.result_type(y, float))
        diag: list[int] = []
        run_parallel = self.config.parallel_stages
        for group in self._groups:
            start = group[0]
            if start:
                rhs_block = y[np.newaxis, :] + h * (self._a[group, :start] @ f_vals[:start])
            else:
                rhs_block = np.broadcast_to(y, (len(group), y.size))
            if run_parallel and len(group) > 1:
                with ThreadPoolExecutor(max_workers=len(group)) as pool:
                    results = list(
                        pool.map(
                            self._solve_stage,
                            group,
                            rhs_block,
                            [t] * len(group),
                            [h] * len(group),
                        )
                    )
            else:
                results = [
                    self._solve_stage(k, rhs_block[idx], t, h)
                    for idx, k in enumerate(group)
                ]
            for k, (fval, iters) in zip(group, results):
                f_vals[k] = fval
                diag.append(iters)
        self.last_diagnostics = StepDiagnostics(newton_iterations=diag)
        return y + h * (self._b @ f_vals)

    def integrate(
        self, t0: float, t_end: float, y0: np.ndarray, n_steps: int
    ) -> IntegrationResult:
        """Take n_steps equal steps from t0 to t_end."""
        if n_steps < 1:
            raise ValueError("at least one step is required")
        h = (t_end - t0) / n_steps
        y = np.array(y0)
        diagnostics: list[StepDiagnostics] = []
        for k in range(n_steps):
            y = self.step(t0 + k * h, y, h)
            diagnostics.append(self.last_diagnostics)
        return IntegrationResult(y=y, t=t0 + n_steps * h, diagnostics=diagnostics)


def step(
    tableau: GarkTableau,
    ode: PartitionedOde,
    t: float,
    y: np.ndarray,
    h: float,
    config: Optional[StepperConfig] = None,
    permutation: Optional[StagePermutation] = None,
) -> np.ndarray:
    """One step of the permuted stage sweep."""
    return Stepper(tableau, ode, config, permutation).step(t, y, h)


def integrate(
    tableau: GarkTableau,
    ode: PartitionedOde,
    t0: float,
    t_end: float,
    y0: np.ndarray,
    n_steps: int,
    config: Optional[StepperConfig] = None,
) -> IntegrationResult:
    """Fixed-step integration from t0 to t_end, collecting per-step diagnostics."""
    return Stepper(tableau, ode, config).integrate(t0, t_end, y0, n_steps)


def dense_staged_oracle_step(
    tableau: GarkTableau,
    ode: PartitionedOde,
    t: float,
    y: np.ndarray,
    h: float,
) -> np.ndarray:
    """Solve every stage equation simultaneously as one dense linear system.

    Verification oracle: requires every partition in linear form.  The result
    must agree with the sweeping step to round-off on linear problems.
    """
    parts = _map_partitions(tableau, ode)
    if not all(getattr(p, "is_linear", False) for p in parts):
        raise ValueError("the staged oracle requires linear partitions")
    y = np.asarray(y)
    n = y.size
    s = tableau.total_stages
    pairs = tableau.stage_pairs
    operators = [p.dense_operator() for p in parts]
    dtype = np.result_type(y, float, *[op.dtype for op in operators])
    big = np.zeros((s * n, s * n), dtype=dtype)
    rhs = np.tile(y.astype(dtype), s)
    stage_times = [
        t + np.asarray(tableau.stage_times[q]) * h for q in range(tableau.num_partitions)
    ]
    sources = [
        [parts[m].source_at(stage_times[m][j]) for j in range(tableau.stage_counts[m])]
        for m in range(tableau.num_partitions)
    ]
    for r, (q, i) in enumerate(pairs):
        big[r * n : (r + 1) * n, r * n : (r + 1) * n] += np.eye(n, dtype=dtype)
        for col, (m, j) in enumerate(pairs):
            a = tableau.blocks[q][m][i, j]
            if a == 0.0:
                continue
            big[r * n : (r + 1) * n, col * n : (col + 1) * n] -= (h * a) * operators[m]
            if sources[m][j] is not None:
                rhs[r * n : (r + 1) * n] += (h * a) * sources[m][j]
    try:
        stages = np.linalg.solve(big, rhs)
    except np.linalg.LinAlgError:
        raise np.linalg.LinAlgError("singular staged system in the dense oracle") from None
    y_next = y.astype(dtype, copy=True)
    for col, (m, j) in enumerate(pairs):
        y_stage = stages[col * n : (col + 1) * n]
        fval = operators[m] @ y_stage
        if sources[m][j] is not None:
            fval = fval + sources[m][j]
        y_next = y_next + h * tableau.weights[m][j] * fval
    return y_next
