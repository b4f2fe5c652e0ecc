"""HBVM(k, s) coefficient matrices and the equivalent Butcher tableau."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from hbvm_fdepca.errors import InvalidParameterError
from hbvm_fdepca.legendre import eval_basis, eval_integrated_basis
from hbvm_fdepca.quadrature import MAX_NODES, QuadratureRule, gauss_legendre


@dataclass(frozen=True)
class HbvmTableau:
    """Matrices defining HBVM(k, s) on the k-point Gauss-Legendre rule.

    Attributes
    ----------
    Ps : (k, s) array
        ``Ps[i, j] = P_j(c_i)``.
    Is : (k, s) array
        ``Is[i, j] = int_0^{c_i} P_j``.
    PtO : (s, k) array
        ``Ps.T @ diag(b)``; maps stage values of f to the Fourier
        coefficient block.
    A : (k, k) array
        Butcher matrix ``Is @ PtO``. Only used for dumps and tests; the
        stage solver works with the factored form.
    """

    k: int
    s: int
    rule: QuadratureRule
    Ps: np.ndarray = field(repr=False)
    Is: np.ndarray = field(repr=False)
    PtO: np.ndarray = field(repr=False)
    A: np.ndarray = field(repr=False)

    @property
    def c(self) -> np.ndarray:
        return self.rule.c

    @property
    def b(self) -> np.ndarray:
        return self.rule.b

    @property
    def omega(self) -> np.ndarray:
        return np.diag(self.rule.b)


@lru_cache(maxsize=None)
def _build(k: int, s: int) -> HbvmTableau:
    rule = gauss_legendre(k)
    Ps = eval_basis(s - 1, rule.c).T.copy()
    Is = eval_integrated_basis(s - 1, rule.c).T.copy()
    PtO = Ps.T * rule.b
    A = Is @ PtO
    for arr in (Ps, Is, PtO, A):
        arr.setflags(write=False)
    return HbvmTableau(k=k, s=s, rule=rule, Ps=Ps, Is=Is, PtO=PtO, A=A)


def build_tableau(k: int, s: int) -> HbvmTableau:
    """Return the HBVM(k, s) tableau; requires ``1 <= s <= k <= 64``."""
    if not 1 <= k <= MAX_NODES:
        raise InvalidParameterError(f"k must lie in [1, {MAX_NODES}], got {k}")
    if not 1 <= s <= k:
        raise InvalidParameterError(f"s must satisfy 1 ≤ s ≤ k (got k={k}, s={s})")
    return _build(int(k), int(s))


def _lagrange(nodes: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Cardinal polynomials on ``nodes`` evaluated at ``x``: shape (len(x), len(nodes))."""
    x = np.asarray(x, dtype=float)[:, None]
    out = np.ones((x.shape[0], nodes.size))
    for j, cj in enumerate(nodes):
        for m, cm in enumerate(nodes):
            if m != j:
                out[:, j] *= (x[:, 0] - cm) / (cj - cm)
    return out


def gauss_collocation_matrix(s: int) -> np.ndarray:
    """Butcher matrix of the s-stage Gauss collocation method.

    Entries ``int_0^{c_i} l_j`` with ``l_j`` the Lagrange cardinals on the
    Gauss nodes. Each integral is done with an s-point Gauss rule mapped to
    [0, c_i], exact since the cardinals have degree s - 1.
    """
    if not 1 <= s <= MAX_NODES:
        raise InvalidParameterError(f"s must lie in [1, {MAX_NODES}], got {s}")
    rule = gauss_legendre(s)
    nodes = rule.c
    out = np.empty((s, s))
    for i, ci in enumerate(nodes):
        vals = _lagrange(nodes, ci * nodes)
        out[i] = ci * (rule.b @ vals)
    return out
