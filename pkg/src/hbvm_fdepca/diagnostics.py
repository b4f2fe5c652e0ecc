"""Post-processing of trajectories: last-point errors, order estimates,
Hamiltonian drift, stroboscopic sampling and coefficient decay."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from hbvm_fdepca.errors import (
    EvaluationError,
    HorizonMismatchError,
    InvalidParameterError,
    StepFailure,
    UndefinedOrderError,
)
from hbvm_fdepca.integrator import (
    TIME_EPS,
    AlignedStep,
    GeneralStep,
    SolveConfig,
    StepSpec,
    Trajectory,
    integrate,
)
from hbvm_fdepca.problem import FdepcaProblem, hamiltonian


@dataclass(frozen=True)
class ConvergenceRow:
    """One row of a step-halving table; ``p`` is None on the first row."""

    h: float
    eps: float
    p: Optional[float] = None


@dataclass(frozen=True)
class DriftSeries:
    times: np.ndarray
    H: np.ndarray
    dH: np.ndarray

    @property
    def max_dH(self) -> float:
        return float(self.dH.max()) if self.dH.size else 0.0


class ConvergenceTableError(RuntimeError):
    """A run of a convergence sweep failed; ``rows`` holds what was computed."""

    def __init__(self, message: str, rows: list[ConvergenceRow], cause: Exception):
        super().__init__(message)
        self.rows = rows
        self.cause = cause


def last_point_error(run_h: Trajectory, run_h2: Trajectory) -> float:
    """``max |u_N(h/2) - u_N(h)|`` over the components of the final states."""
    t1, t2 = run_h.t_final, run_h2.t_final
    if abs(t1 - t2) > 1e-12 * max(1.0, abs(t1)):
        raise HorizonMismatchError(f"trajectories end at different times: {t1} vs {t2}")
    return float(np.abs(run_h2.y_final - run_h.y_final).max())


def convergence_order(eps_h: float, eps_h2: float) -> float:
    """``log2(eps_h / eps_h2)``."""
    if not (eps_h > 0 and eps_h2 > 0):
        raise UndefinedOrderError(f"order undefined for errors {eps_h}, {eps_h2}")
    return math.log2(eps_h / eps_h2)


def halve(step: StepSpec) -> StepSpec:
    if isinstance(step, AlignedStep):
        return AlignedStep(2 * step.nu)
    return GeneralStep(step.h / 2)


def step_size(step: StepSpec, unit: float = 1.0) -> float:
    return unit / step.nu if isinstance(step, AlignedStep) else step.h


def convergence_table(
    problem: FdepcaProblem,
    k: int,
    s: int,
    h0: StepSpec,
    levels: int,
    t_end: float,
    max_workers: Optional[int] = None,
    **config_kw,
) -> list[ConvergenceRow]:
    """Last-point errors and orders over ``levels`` halvings of ``h0``.

    Runs ``levels + 1`` integrations at ``h0, h0/2, ...`` (concurrently
    when ``max_workers`` allows) and returns ``levels`` rows; row ``i``
    holds ``eps(h0 / 2**i)`` and, from the second row on, the order
    estimate against the previous row.

    Raises
    ------
    ConvergenceTableError
        If any run fails; the rows computable before the failing level
        are attached.
    """
    if levels < 2:
        raise InvalidParameterError(f"levels must be >= 2, got {levels}")
    configs = [SolveConfig(k, s, h0, t_end, keep_records=False, **config_kw)]
    for _ in range(levels):
        configs.append(replace(configs[-1], step=halve(configs[-1].step)))

    def run(cfg):
        try:
            return integrate(problem, cfg)
        except (StepFailure, EvaluationError) as exc:
            return exc

    workers = max_workers if max_workers is not None else min(len(configs), 4)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(run, configs))
    else:
        runs = [run(cfg) for cfg in configs]

    rows: list[ConvergenceRow] = []
    for i in range(levels):
        for r in (runs[i], runs[i + 1]):
            if isinstance(r, Exception):
                raise ConvergenceTableError(f"run failed at level {i}: {r}", rows, r)
        eps = last_point_error(runs[i], runs[i + 1])
        p = convergence_order(rows[-1].eps, eps) if rows else None
        rows.append(ConvergenceRow(h=step_size(configs[i].step, problem.delay_unit), eps=eps, p=p))
    return rows


def hamiltonian_series(traj: Trajectory, problem: FdepcaProblem) -> DriftSeries:
    """H at the sampled mesh endpoints and its consecutive jumps."""
    H = np.asarray(hamiltonian(problem, traj.states), dtype=float)
    return DriftSeries(times=traj.times, H=H, dH=np.abs(np.diff(H)))


def stroboscopic_sample(traj: Trajectory, period: float) -> tuple[np.ndarray, np.ndarray]:
    """States at ``t = j * period``, ``j = 1, 2, ...`` within the horizon.

    When ``period`` is an integer multiple of the mesh step, the stored
    mesh endpoints are returned unchanged; otherwise each point is the
    dense output of the containing piece.

    Returns
    -------
    times, states : arrays of shape ``(n,)`` and ``(n, m)``
    """
    if not period > 0:
        raise InvalidParameterError(f"period must be positive, got {period}")
    horizon = traj.t_final
    if period > horizon * (1 + TIME_EPS):
        raise InvalidParameterError(f"period {period} exceeds horizon {horizon}")
    n_periods = int(math.floor(horizon / period * (1 + TIME_EPS)))
    mesh = traj.mesh
    ratio = period / mesh.h
    r = int(round(ratio))
    if abs(ratio - r) < 1e-9 * max(1.0, ratio):
        wanted = r * np.arange(1, n_periods + 1)
        idx = np.searchsorted(traj.step_indices, wanted)
        ok = idx < len(traj.step_indices)
        ok[ok] = traj.step_indices[idx[ok]] == wanted[ok]
        if ok.all():
            return traj.times[idx], traj.states[idx]
    if not traj.has_records:
        raise InvalidParameterError(
            "period is not a multiple of the sampled mesh stride and the trajectory has no records"
        )
    times = period * np.arange(1, n_periods + 1)
    times[-1] = min(times[-1], horizon)
    states = np.array([traj.eval(t) for t in times]).reshape(len(times), traj.problem.m)
    return times, states


def coefficient_decay_report(traj: Trajectory) -> np.ndarray:
    """Euclidean norms of the coefficient blocks, shape ``(n_records, s)``."""
    return np.linalg.norm(traj.gammas, axis=-1)


def spectral_cutoff(norms: np.ndarray, rel: float = 1e-15) -> np.ndarray:
    """First index j per row with ``norms[j] < rel * max(norms)``, or s if none."""
    norms = np.atleast_2d(norms)
    below = norms < rel * norms.max(axis=1, keepdims=True)
    return np.where(below.any(axis=1), below.argmax(axis=1), norms.shape[1])


def sweep_steps(h0: StepSpec, levels: int) -> Sequence[StepSpec]:
    out = [h0]
    for _ in range(levels):
        out.append(halve(out[-1]))
    return out
