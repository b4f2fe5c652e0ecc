"""Fixed-step HBVM(k, s) integration of FDEPCA problems.

Each step solves for the block of Fourier coefficients ``gamma`` (s x m)

    gamma = PtO f(e (x) y_left + h Is gamma, delay)

by fixed-point iteration, then advances with ``y_right = y_left + h gamma[0]``.
The local polynomial ``u(c h) = y_left + h sum_j int_0^c P_j gamma[j]`` is the
dense output of the step.

The delayed argument ``y(tau floor(t / tau))`` (``tau`` is the problem's
``delay_unit``, 1 for the usual ``y(floor t)``) only ever needs the solution
on the lattice ``j tau``. Those values are cached as they are reached, keyed
by ``j``. With an aligned mesh (``h = tau / nu``) the floor is constant over
every step. With a general ``h`` a lattice point may fall inside a step,
where the vector field jumps. Two treatments are available:

``"split"`` (default)
    The step is cut at the lattice point into two substeps, each integrated
    with the same HBVM(k, s); the mesh ``t_n = n h`` is unchanged. The vector
    field is smooth on every substep, so the order 2s is retained.
``"interior"``
    One polynomial spans the step; stages past the lattice point read the
    delayed value from the current iterate of that polynomial, updated at
    every fixed-point iteration. The jump inside the quadrature limits the
    accuracy of that step to roughly ``O(h * jump)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Union

import numpy as np

from hbvm_fdepca import _kernels
from hbvm_fdepca.errors import EvaluationError, InvalidParameterError, StepFailure
from hbvm_fdepca.legendre import eval_integrated_basis
from hbvm_fdepca.problem import FdepcaProblem
from hbvm_fdepca.tableau import HbvmTableau, build_tableau

# relative distance below which a time is snapped to a lattice point
TIME_EPS = 1e-12
BREAKPOINT_MODES = ("split", "interior")


@dataclass(frozen=True)
class AlignedStep:
    """Step ``h = tau / nu``: every lattice point ``j tau`` is a mesh point."""

    nu: int


@dataclass(frozen=True)
class GeneralStep:
    """Arbitrary step ``0 < h <= tau``."""

    h: float


StepSpec = Union[AlignedStep, GeneralStep]


@dataclass(frozen=True)
class Mesh:
    """A step specification resolved against a delay unit."""

    h: float
    n_steps: int
    t_end: float
    unit: float
    nu: Optional[int] = None

    @property
    def aligned(self) -> bool:
        return self.nu is not None

    def step_times(self, n: int) -> tuple[float, float]:
        """Left endpoint and length of step ``n`` (0-based)."""
        if self.aligned:
            return n * self.unit / self.nu, self.h
        t_left = n * self.h
        if n == self.n_steps - 1:
            return t_left, self.t_end - t_left
        return t_left, self.h

    def mesh_time(self, n: int) -> float:
        """``t_n``; equals ``t_end`` for the last point."""
        if n == self.n_steps:
            return self.t_end
        return self.step_times(n)[0]


@dataclass(frozen=True)
class SolveConfig:
    """Parameters of a fixed-step run.

    ``sample_every`` sets the stride of stored mesh endpoints. With
    ``keep_records=False`` the per-step coefficient blocks are not stored,
    only the sampled endpoints and the lattice cache. ``breakpoints``
    selects how a lattice point strictly inside a general-mode step is
    handled (see the module docstring).
    """

    k: int
    s: int
    step: StepSpec
    t_end: float
    fp_tol: float = 1e-14
    fp_max_iter: int = 100
    sample_every: int = 1
    keep_records: bool = True
    breakpoints: str = "split"

    def __post_init__(self):
        if not 1 <= self.s <= self.k:
            raise InvalidParameterError(f"s must satisfy 1 ≤ s ≤ k (got k={self.k}, s={self.s})")
        if not self.t_end > 0:
            raise InvalidParameterError(f"t_end must be positive, got {self.t_end}")
        if self.sample_every < 1:
            raise InvalidParameterError("sample_every must be >= 1")
        if self.fp_max_iter < 1:
            raise InvalidParameterError("fp_max_iter must be >= 1")
        if self.breakpoints not in BREAKPOINT_MODES:
            raise InvalidParameterError(f"breakpoints must be one of {BREAKPOINT_MODES}, got {self.breakpoints!r}")
        if isinstance(self.step, AlignedStep):
            if int(self.step.nu) != self.step.nu or self.step.nu < 1:
                raise InvalidParameterError(f"nu must be a positive integer, got {self.step.nu}")
        elif isinstance(self.step, GeneralStep):
            if not self.step.h > 0:
                raise InvalidParameterError(f"step size must be positive, got {self.step.h}")
        else:
            raise InvalidParameterError(f"unknown step specification {self.step!r}")

    @property
    def aligned(self) -> bool:
        return isinstance(self.step, AlignedStep)

    def mesh(self, unit: float = 1.0) -> Mesh:
        """Resolve the step specification for delay unit ``unit``."""
        if isinstance(self.step, AlignedStep):
            nu = int(self.step.nu)
            n = self.t_end * nu / unit
            if abs(n - round(n)) > 1e-9 * max(1.0, n):
                raise InvalidParameterError(
                    f"aligned mode needs t_end * nu / unit integer, got {self.t_end} * {nu} / {unit}"
                )
            return Mesh(h=unit / nu, n_steps=int(round(n)), t_end=self.t_end, unit=unit, nu=nu)
        h = self.step.h
        if h > unit * (1 + TIME_EPS):
            raise InvalidParameterError(f"step size must not exceed the delay unit {unit}, got {h}")
        n = self.t_end / h
        # a horizon that is a multiple of h up to roundoff gets no sliver step
        n_steps = int(round(n)) if abs(n - round(n)) <= 1e-9 * max(1.0, n) else int(math.ceil(n))
        return Mesh(h=h, n_steps=n_steps, t_end=self.t_end, unit=unit)


@dataclass(frozen=True)
class StepRecord:
    t_left: float
    h: float
    y_left: np.ndarray
    gamma: np.ndarray
    y_right: np.ndarray

    @property
    def t_right(self) -> float:
        return self.t_left + self.h


class StageSolution(NamedTuple):
    gamma: np.ndarray
    iterations: int
    residual: float


def dense_eval(record: StepRecord, c: float, h: Optional[float] = None) -> np.ndarray:
    """Evaluate the step polynomial at ``t_left + c h``."""
    if not 0.0 <= c <= 1.0:
        raise InvalidParameterError(f"c must lie in [0, 1], got {c}")
    h = record.h if h is None else h
    if c == 0.0:
        return record.y_left.copy()
    s = record.gamma.shape[0]
    w = eval_integrated_basis(s - 1, c)
    return record.y_left + h * (w @ record.gamma)


def solve_stage_system(
    tableau: HbvmTableau,
    problem: FdepcaProblem,
    y_left: np.ndarray,
    h: float,
    delay: Union[np.ndarray, Callable[[np.ndarray], np.ndarray]],
    tol: float = 1e-14,
    max_iter: int = 100,
) -> StageSolution:
    """Fixed-point solve of the s-block coefficient system of one step.

    Parameters
    ----------
    delay
        Delayed states used by the k stages: an array broadcastable to
        ``(k, m)``, or a callable mapping the current ``gamma`` iterate to
        such an array (row i is the delayed value for stage i).

    Starts from ``gamma = 0`` and stops when the update's max-norm drops
    below ``tol * (1 + max|gamma|)``. Problems with a compiled field and a
    fixed delay array run the loop in compiled code.
    """
    if problem.jit_field is not None and problem.delay_term is not None and not callable(delay):
        return _solve_compiled(tableau, problem, y_left, h, delay, tol, max_iter)
    return _solve_numpy(tableau, problem, y_left, h, delay, tol, max_iter)


def _solve_numpy(tableau, problem, y_left, h, delay, tol, max_iter) -> StageSolution:
    PtO = tableau.PtO
    rhs = problem.rhs
    y_left = np.asarray(y_left, dtype=float)
    hIs = h * tableau.Is
    gamma = np.zeros((tableau.s, y_left.shape[-1]))
    dynamic = callable(delay)
    yd = None if dynamic else np.broadcast_to(delay, (tableau.k, y_left.shape[-1]))
    res = math.inf
    for it in range(1, max_iter + 1):
        if dynamic:
            yd = delay(gamma)
        F = rhs(y_left + hIs @ gamma, yd)
        if not np.isfinite(F).all():
            raise EvaluationError(f"non-finite vector field value at iteration {it}")
        new = PtO @ F
        res = float(np.abs(new - gamma).max())
        gamma = new
        if res < tol * (1.0 + float(np.abs(gamma).max())):
            return StageSolution(gamma, it, res)
    raise StepFailure(
        f"fixed-point iteration did not converge in {max_iter} iterations (residual {res:.3e})",
        residual=res,
        iterations=max_iter,
    )


def _solve_compiled(tableau, problem, y_left, h, delay, tol, max_iter) -> StageSolution:
    y_left = np.ascontiguousarray(y_left, dtype=float)
    shape = (tableau.k, y_left.shape[-1])
    D = np.ascontiguousarray(np.broadcast_to(problem.delay_term(np.asarray(delay, dtype=float)), shape))
    gamma, it, res, status = _kernels.fixed_point(
        problem.jit_field, y_left, h * tableau.Is, tableau.PtO, D, tol, max_iter
    )
    if status == _kernels.STATUS_NONFINITE:
        raise EvaluationError(f"non-finite vector field value at iteration {it}")
    if status == _kernels.STATUS_MAXITER:
        raise StepFailure(
            f"fixed-point iteration did not converge in {max_iter} iterations (residual {res:.3e})",
            residual=res,
            iterations=max_iter,
        )
    return StageSolution(gamma, it, res)


class Trajectory:
    """Result of an integration.

    Stores one :class:`StepRecord` per polynomial piece (a general-mode step
    split at a lattice point contributes two), the mesh endpoints sampled
    every ``sample_every`` steps, and the lattice cache.

    Attributes
    ----------
    delay_cache : dict[int, ndarray]
        Solution values at the lattice times ``j * mesh.unit`` reached so far.
    n_steps : int
        Number of completed mesh steps.
    iterations : list[int]
        Fixed-point iterations used by each piece.
    """

    def __init__(self, problem: FdepcaProblem, config: SolveConfig):
        self.problem = problem
        self.config = config
        self.mesh = mesh = config.mesh(problem.delay_unit)
        n, m, s = mesh.n_steps, problem.m, config.s
        self.n_steps = 0
        self.n_records = 0
        self.delay_cache: dict[int, np.ndarray] = {0: problem.y0.copy()}
        self.iterations: list[int] = []
        self._y_current = problem.y0.copy()
        self._t_current = 0.0
        if config.keep_records:
            n_rec = n + int(math.ceil(config.t_end / mesh.unit)) + 1
            self._t_left = np.empty(n_rec)
            self._h = np.empty(n_rec)
            self._y_left = np.empty((n_rec, m))
            self._gamma = np.empty((n_rec, s, m))
            self._y_right = np.empty((n_rec, m))
        n_samples = n // config.sample_every + 2
        self._sample_t = np.empty(n_samples)
        self._sample_y = np.empty((n_samples, m))
        self._sample_n = np.empty(n_samples, dtype=np.int64)
        self._sample_t[0] = 0.0
        self._sample_y[0] = problem.y0
        self._sample_n[0] = 0
        self._n_samples = 1

    def __len__(self) -> int:
        return self.n_records

    @property
    def has_records(self) -> bool:
        return self.config.keep_records

    @property
    def complete(self) -> bool:
        return self.n_steps == self.mesh.n_steps

    def _need_records(self):
        if not self.has_records:
            raise InvalidParameterError("trajectory was computed with keep_records=False")

    def record(self, i: int) -> StepRecord:
        self._need_records()
        if i < 0:
            i += self.n_records
        if not 0 <= i < self.n_records:
            raise IndexError(i)
        return StepRecord(
            t_left=float(self._t_left[i]),
            h=float(self._h[i]),
            y_left=self._y_left[i],
            gamma=self._gamma[i],
            y_right=self._y_right[i],
        )

    @property
    def records(self) -> list[StepRecord]:
        return [self.record(i) for i in range(self.n_records)]

    @property
    def t_final(self) -> float:
        return self._t_current

    @property
    def y_final(self) -> np.ndarray:
        return self._y_current.copy()

    @property
    def times(self) -> np.ndarray:
        """Sampled mesh times, starting with t = 0."""
        return self._sample_t[: self._n_samples].copy()

    @property
    def states(self) -> np.ndarray:
        """Sampled mesh states, matching :attr:`times`."""
        return self._sample_y[: self._n_samples].copy()

    @property
    def step_indices(self) -> np.ndarray:
        """Mesh index n of every sample (``times[i]`` is ``t_n``)."""
        return self._sample_n[: self._n_samples].copy()

    @property
    def gammas(self) -> np.ndarray:
        """Coefficient blocks of all pieces, shape ``(n_records, s, m)``."""
        self._need_records()
        return self._gamma[: self.n_records]

    def find_record(self, t: float) -> int:
        """Index of the piece whose closed interval contains ``t``."""
        self._need_records()
        i = int(np.searchsorted(self._t_left[: self.n_records], t, side="right")) - 1
        return min(max(i, 0), self.n_records - 1)

    def eval(self, t: float) -> np.ndarray:
        """Dense output at time ``t`` inside the computed horizon."""
        if not -TIME_EPS <= t <= self._t_current * (1 + TIME_EPS):
            raise InvalidParameterError(f"t={t} outside computed horizon [0, {self._t_current}]")
        if self.n_records == 0:
            return self.problem.y0.copy()
        rec = self.record(self.find_record(t))
        c = min(max((t - rec.t_left) / rec.h, 0.0), 1.0)
        return dense_eval(rec, c)

    def _add_record(self, rec: StepRecord, iterations: int):
        i = self.n_records
        if self.config.keep_records:
            self._t_left[i] = rec.t_left
            self._h[i] = rec.h
            self._y_left[i] = rec.y_left
            self._gamma[i] = rec.gamma
            self._y_right[i] = rec.y_right
        self.iterations.append(iterations)
        self.n_records = i + 1
        self._t_current = rec.t_right
        self._y_current = rec.y_right

    def _close_step(self):
        self.n_steps += 1
        self._t_current = self.mesh.mesh_time(self.n_steps)
        if self.n_steps % self.config.sample_every == 0 or self.complete:
            j = self._n_samples
            self._sample_t[j] = self._t_current
            self._sample_y[j] = self._y_current
            self._sample_n[j] = self.n_steps
            self._n_samples = j + 1


def lattice_index(t: float, unit: float = 1.0) -> int:
    """``floor(t / unit)``, snapping values within roundoff of a lattice point."""
    x = t / unit
    return int(math.floor(x + TIME_EPS * max(1.0, abs(x))))


def delay_value(
    traj: Trajectory,
    t: float,
    current: Optional[StepRecord] = None,
) -> np.ndarray:
    """Return the delayed state ``u(tau floor(t / tau))``.

    Cached lattice values are used when available. Otherwise the lattice
    point must lie strictly inside ``current`` (an in-progress step,
    possibly holding an unconverged ``gamma``), whose polynomial is
    evaluated there.
    """
    unit = traj.mesh.unit
    j = lattice_index(t, unit)
    if j < 0:
        raise InvalidParameterError(f"floor of t={t} is negative")
    if j in traj.delay_cache:
        return traj.delay_cache[j]
    tj = j * unit
    if current is not None and current.t_left < tj < current.t_right:
        return dense_eval(current, (tj - current.t_left) / current.h)
    raise RuntimeError(f"delayed value at t={tj} is neither cached nor inside the current step")


def _interior_delay(tableau: HbvmTableau, base: np.ndarray, y_left: np.ndarray, h: float, c_star: float):
    """Per-stage delay for a step with a lattice point at scaled position ``c_star``."""
    after = tableau.c >= c_star
    if not after.any():
        return base
    w = h * eval_integrated_basis(tableau.s - 1, c_star)
    buf = np.empty((tableau.k, y_left.shape[-1]))
    buf[~after] = base

    def delay(gamma):
        buf[after] = y_left + w @ gamma
        return buf

    return delay


def _piece(traj, tableau, problem, config, t_left, h, y_left, delay) -> StepRecord:
    sol = solve_stage_system(
        tableau, problem, y_left, h, delay, tol=config.fp_tol, max_iter=config.fp_max_iter
    )
    rec = StepRecord(t_left=t_left, h=h, y_left=y_left, gamma=sol.gamma, y_right=y_left + h * sol.gamma[0])
    traj._add_record(rec, sol.iterations)
    return rec


def step(traj: Trajectory, tableau: HbvmTableau, problem: FdepcaProblem, config: SolveConfig) -> StepRecord:
    """Advance ``traj`` by one mesh step; return the record ending at the new mesh point."""
    mesh = traj.mesh
    n = traj.n_steps
    t_left, h = mesh.step_times(n)
    y_left = traj._y_current
    if mesh.aligned:
        rec = _piece(traj, tableau, problem, config, t_left, h, y_left, traj.delay_cache[n // mesh.nu])
        if (n + 1) % mesh.nu == 0:
            traj.delay_cache[(n + 1) // mesh.nu] = rec.y_right
        traj._close_step()
        return rec

    unit = mesh.unit
    t_right = t_left + h
    j0 = lattice_index(t_left, unit)
    j1 = j0 + 1
    t1 = j1 * unit
    base = traj.delay_cache[j0]
    if t1 < t_right - TIME_EPS * max(1.0, t_right):
        if config.breakpoints == "split":
            first = _piece(traj, tableau, problem, config, t_left, t1 - t_left, y_left, base)
            traj.delay_cache[j1] = first.y_right
            rec = _piece(traj, tableau, problem, config, t1, t_right - t1, first.y_right, first.y_right)
        else:
            c_star = (t1 - t_left) / h
            delay = _interior_delay(tableau, base, y_left, h, c_star)
            rec = _piece(traj, tableau, problem, config, t_left, h, y_left, delay)
            traj.delay_cache[j1] = dense_eval(rec, c_star)
    else:
        rec = _piece(traj, tableau, problem, config, t_left, h, y_left, base)
        if lattice_index(t_right, unit) == j1:
            traj.delay_cache[j1] = rec.y_right
    traj._close_step()
    return rec


def integrate(problem: FdepcaProblem, config: SolveConfig) -> Trajectory:
    """Integrate ``problem`` over ``[0, config.t_end]``.

    On failure the exception carries the partial result as ``exc.trajectory``.
    """
    tableau = build_tableau(config.k, config.s)
    traj = Trajectory(problem, config)
    try:
        for _ in range(traj.mesh.n_steps):
            step(traj, tableau, problem, config)
    except (StepFailure, EvaluationError) as exc:
        exc.trajectory = traj
        raise
    return traj
