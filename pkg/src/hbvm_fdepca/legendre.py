"""Shifted Legendre basis on [0, 1], orthonormal w.r.t. the L2 inner product.

``P_j(c) = sqrt(2j + 1) * L_j(2c - 1)`` where ``L_j`` is the classical
Legendre polynomial, so that ``int_0^1 P_i P_j = delta_ij``.
"""

from __future__ import annotations

import numpy as np

from hbvm_fdepca.errors import InvalidParameterError

MAX_DEGREE = 64


def _check_degree(j_max: int) -> None:
    if not 0 <= j_max <= MAX_DEGREE:
        raise InvalidParameterError(f"j_max must lie in [0, {MAX_DEGREE}], got {j_max}")


def _check_argument(c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    if not np.all((c >= 0.0) & (c <= 1.0)):
        raise InvalidParameterError("c must lie in [0, 1]")
    return c


def _classical(n: int, c):
    """Classical Legendre values ``L_0..L_n`` at ``x = 2c - 1``.

    The leading axis indexes the degree; trailing axes follow ``c``.
    """
    x = 2.0 * np.asarray(c, dtype=float) - 1.0
    out = np.empty((n + 1,) + x.shape)
    out[0] = 1.0
    if n >= 1:
        out[1] = x
    for j in range(1, n):
        out[j + 1] = ((2 * j + 1) * x * out[j] - j * out[j - 1]) / (j + 1)
    return out


def eval_basis(j_max: int, c) -> np.ndarray:
    """Return ``[P_0(c), ..., P_{j_max}(c)]``.

    ``c`` may be a scalar or an array; the result has shape
    ``(j_max + 1,) + np.shape(c)``.
    """
    _check_degree(j_max)
    c = _check_argument(c)
    scale = np.sqrt(2.0 * np.arange(j_max + 1) + 1.0)
    vals = _classical(j_max, c)
    return vals * scale.reshape((-1,) + (1,) * (vals.ndim - 1))


def eval_integrated_basis(j_max: int, c) -> np.ndarray:
    """Return ``[int_0^c P_0, ..., int_0^c P_{j_max}]``.

    Uses ``int_{-1}^x L_j = (L_{j+1}(x) - L_{j-1}(x)) / (2j + 1)`` for
    ``j >= 1``, which after the change of variable gives
    ``int_0^c P_j = (L_{j+1} - L_{j-1}) / (2 sqrt(2j + 1))``.
    """
    _check_degree(j_max)
    c = _check_argument(c)
    leg = _classical(j_max + 1, c)
    out = np.empty((j_max + 1,) + c.shape)
    out[0] = c
    for j in range(1, j_max + 1):
        out[j] = (leg[j + 1] - leg[j - 1]) / (2.0 * np.sqrt(2.0 * j + 1.0))
    return out
