"""Gauss-Legendre rules on [0, 1]."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from hbvm_fdepca.errors import InvalidParameterError

MAX_NODES = 64


@dataclass(frozen=True)
class QuadratureRule:
    """k-point rule with abscissae ``c`` (ascending, in (0, 1)) and weights ``b``."""

    k: int
    c: np.ndarray
    b: np.ndarray

    @property
    def order(self) -> int:
        return 2 * self.k


def _newton_roots(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Roots of L_k on [-1, 1] and the corresponding Gauss weights."""
    i = np.arange(1, k + 1)
    x = np.cos(np.pi * (i - 0.25) / (k + 0.5))
    for _ in range(100):
        p0 = np.ones_like(x)
        p1 = x.copy()
        for j in range(1, k):
            p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
        # p1 = L_k(x), p0 = L_{k-1}(x)
        dp = k * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    p0 = np.ones_like(x)
    p1 = x.copy()
    for j in range(1, k):
        p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
    dp = k * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    return x, w


@lru_cache(maxsize=None)
def _cached(k: int) -> QuadratureRule:
    if k == 1:
        x, w = np.zeros(1), np.full(1, 2.0)
    else:
        x, w = _newton_roots(k)
    order = np.argsort(x)
    x, w = x[order], w[order]
    # symmetrize to kill the last-ulp asymmetry of the Newton iterates
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    c = 0.5 * (1.0 + x)
    b = 0.5 * w
    c.setflags(write=False)
    b.setflags(write=False)
    return QuadratureRule(k=k, c=c, b=b)


def gauss_legendre(k: int) -> QuadratureRule:
    """Return the k-point Gauss-Legendre rule on [0, 1] (order 2k).

    Nodes come from Newton's method on the Legendre polynomial started at
    Chebyshev-like angles, then mapped affinely from [-1, 1].
    """
    if not isinstance(k, (int, np.integer)) or not 1 <= k <= MAX_NODES:
        raise InvalidParameterError(f"k must be an integer in [1, {MAX_NODES}], got {k!r}")
    return _cached(int(k))


def apply_rule(rule: QuadratureRule, samples) -> np.ndarray:
    """Weighted sum ``sum_i b_i * samples[i]``."""
    samples = np.asarray(samples, dtype=float)
    if samples.shape[:1] != (rule.k,):
        raise InvalidParameterError(
            f"expected {rule.k} samples, got {samples.shape[0] if samples.ndim else 'a scalar'}"
        )
    return np.tensordot(rule.b, samples, axes=1)
