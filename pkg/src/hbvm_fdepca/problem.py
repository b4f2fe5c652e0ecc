"""Autonomous FDEPCA problems ``y' = f(y(t), y(floor(t)))``.

Built-in problems are scalar-q Hamiltonian delay systems

    (q', p') = J grad H(q, p) + alpha * J grad H(q(floor t), p(floor t)),

with ``J = [[0, 1], [-1, 0]]``, stored as a state vector ``y = (q, p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from hbvm_fdepca import _kernels
from hbvm_fdepca.errors import InvalidParameterError, UnsupportedOperationError

# Period of the problem3 orbit, used to build its step sizes.
PROBLEM3_PERIOD = 3.131990057003955

Rhs = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class FdepcaProblem:
    """An FDEPCA initial value problem.

    ``rhs(y, y_delay)`` must accept arrays of shape ``(..., m)`` and return
    the same shape; the integrator evaluates all stages in one call.

    Optionally the field may be declared additive, ``rhs(y, yd) =
    F(y) + delay_term(yd)``, with ``F`` given as a numba-compiled
    ``jit_field(Y, out)`` acting on ``(k, m)`` arrays. The integrator then
    runs the stage iteration in compiled code.
    """

    name: str
    m: int
    rhs: Rhs = field(repr=False)
    y0: np.ndarray
    hamiltonian: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    alpha: Optional[float] = None
    jit_field: Optional[Callable] = field(default=None, repr=False)
    delay_term: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, repr=False)
    delay_unit: float = 1.0

    def __post_init__(self):
        if not self.delay_unit > 0:
            raise InvalidParameterError(f"delay_unit must be positive, got {self.delay_unit}")
        y0 = np.array(self.y0, dtype=float).reshape(-1)
        if y0.size != self.m:
            raise InvalidParameterError(f"y0 has length {y0.size}, expected m={self.m}")
        y0.setflags(write=False)
        object.__setattr__(self, "y0", y0)


def _symplectic(g: np.ndarray) -> np.ndarray:
    out = np.empty_like(g)
    out[..., 0] = g[..., 1]
    out[..., 1] = -g[..., 0]
    return out


def _hamiltonian_rhs(grad: Callable[[np.ndarray], np.ndarray], alpha: float) -> Rhs:
    def rhs(y, yd):
        return _symplectic(grad(y) + alpha * grad(yd))

    return rhs


def _hamiltonian_delay_term(grad: Callable[[np.ndarray], np.ndarray], alpha: float):
    def delay_term(yd):
        return alpha * _symplectic(grad(yd))

    return delay_term


def hamiltonian_problem(
    name: str,
    H: Callable[[np.ndarray], np.ndarray],
    grad: Callable[[np.ndarray], np.ndarray],
    alpha: float,
    y0,
    jit_field: Optional[Callable] = None,
    delay_unit: float = 1.0,
) -> FdepcaProblem:
    """Scalar (q, p) Hamiltonian delay problem with coupling ``alpha``.

    ``H`` and ``grad`` act on arrays with trailing axis ``(q, p)``; ``grad``
    returns ``(dH/dq, dH/dp)`` along the same axis. ``jit_field``, when
    given, is a compiled ``J grad H`` (see :class:`FdepcaProblem`).
    """
    return FdepcaProblem(
        name=name,
        m=2,
        rhs=_hamiltonian_rhs(grad, alpha),
        y0=y0,
        hamiltonian=H,
        gradient=grad,
        alpha=float(alpha),
        jit_field=jit_field,
        delay_term=_hamiltonian_delay_term(grad, alpha),
        delay_unit=float(delay_unit),
    )


# problem1: quartic oscillator
def _h1(y):
    q, p = y[..., 0], y[..., 1]
    return 0.25 * (q**4 + p**4)


def _g1(y):
    return y**3


# problem2: nonlinear pendulum
def _h2(y):
    q, p = y[..., 0], y[..., 1]
    return 0.5 * p * p - np.cos(q)


def _g2(y):
    out = np.empty_like(y)
    out[..., 0] = np.sin(y[..., 0])
    out[..., 1] = y[..., 1]
    return out


# problem3: Cassini ovals
def _h3(y):
    q, p = y[..., 0], y[..., 1]
    r2 = q * q + p * p
    return r2 * r2 - 10.0 * (q * q - p * p)


def _g3(y):
    q, p = y[..., 0], y[..., 1]
    r2 = q * q + p * p
    out = np.empty_like(y)
    out[..., 0] = 4.0 * q * r2 - 20.0 * q
    out[..., 1] = 4.0 * p * r2 + 20.0 * p
    return out


_BUILTINS = {
    "problem1": (_h1, _g1, _kernels.field_quartic, 1e-2, (math.sqrt(2.0), 0.0)),
    "problem2": (_h2, _g2, _kernels.field_pendulum, -1e-5, (0.0, 1.99999)),
    "problem3": (_h3, _g3, _kernels.field_cassini, 1e-5, (0.0, 1e-6)),
}

BUILTIN_NAMES = tuple(_BUILTINS)


def builtin(name: str, alpha: Optional[float] = None, y0=None, delay_unit: float = 1.0) -> FdepcaProblem:
    """Return one of ``problem1``, ``problem2``, ``problem3`` with optional overrides.

    ``delay_unit`` replaces the delayed argument ``y(floor t)`` by
    ``y(tau floor(t / tau))`` with ``tau = delay_unit``.
    """
    try:
        H, grad, jit_field, alpha_default, y0_default = _BUILTINS[name]
    except KeyError:
        raise InvalidParameterError(
            f"unknown problem {name!r}; choose from {', '.join(BUILTIN_NAMES)}"
        ) from None
    return hamiltonian_problem(
        name,
        H,
        grad,
        alpha_default if alpha is None else alpha,
        y0_default if y0 is None else y0,
        jit_field=jit_field,
        delay_unit=delay_unit,
    )


def _as_state(problem: FdepcaProblem, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape[-1:] != (problem.m,):
        raise InvalidParameterError(f"state must have trailing dimension {problem.m}, got {y.shape}")
    return y


def eval_rhs(problem: FdepcaProblem, y, y_delay) -> np.ndarray:
    """Evaluate the vector field with dimension checks."""
    return problem.rhs(_as_state(problem, y), _as_state(problem, y_delay))


def hamiltonian(problem: FdepcaProblem, y):
    """Evaluate ``H`` at ``y`` (vectorized over leading axes)."""
    if problem.hamiltonian is None:
        raise UnsupportedOperationError(f"problem {problem.name!r} has no Hamiltonian")
    out = problem.hamiltonian(_as_state(problem, y))
    return float(out) if np.ndim(out) == 0 else out
