"""Compiled inner loops for problems that provide a numba field.

A compiled field has signature ``field(Y, out)`` with ``Y`` and ``out`` of
shape ``(k, m)``; it writes the delay-free part of the vector field.
"""

from __future__ import annotations

import numpy as np
from numba import njit

STATUS_OK = 0
STATUS_MAXITER = 1
STATUS_NONFINITE = 2


@njit(cache=True)
def fixed_point(field, y_left, hIs, PtO, D, tol, max_iter):
    """Same iteration as the numpy stage solver, with ``f(Y) = field(Y) + D``."""
    k, s = hIs.shape
    m = y_left.shape[0]
    gamma = np.zeros((s, m))
    new = np.empty((s, m))
    Y = np.empty((k, m))
    F = np.empty((k, m))
    res = np.inf
    for it in range(1, max_iter + 1):
        for i in range(k):
            for a in range(m):
                acc = y_left[a]
                for j in range(s):
                    acc += hIs[i, j] * gamma[j, a]
                Y[i, a] = acc
        field(Y, F)
        for i in range(k):
            for a in range(m):
                F[i, a] += D[i, a]
                if not np.isfinite(F[i, a]):
                    return gamma, it, res, STATUS_NONFINITE
        res = 0.0
        gmax = 0.0
        for j in range(s):
            for a in range(m):
                acc = 0.0
                for i in range(k):
                    acc += PtO[j, i] * F[i, a]
                d = abs(acc - gamma[j, a])
                if d > res:
                    res = d
                if abs(acc) > gmax:
                    gmax = abs(acc)
                new[j, a] = acc
        gamma[:, :] = new
        if res < tol * (1.0 + gmax):
            return gamma, it, res, STATUS_OK
    return gamma, max_iter, res, STATUS_MAXITER


# J grad H for the built-in problems, rows are (q, p) states.


@njit(cache=True)
def field_quartic(Y, out):
    for i in range(Y.shape[0]):
        q = Y[i, 0]
        p = Y[i, 1]
        out[i, 0] = p * p * p
        out[i, 1] = -q * q * q


@njit(cache=True)
def field_pendulum(Y, out):
    for i in range(Y.shape[0]):
        out[i, 0] = Y[i, 1]
        out[i, 1] = -np.sin(Y[i, 0])


@njit(cache=True)
def field_cassini(Y, out):
    for i in range(Y.shape[0]):
        q = Y[i, 0]
        p = Y[i, 1]
        r2 = q * q + p * p
        out[i, 0] = (4.0 * r2 + 20.0) * p
        out[i, 1] = (20.0 - 4.0 * r2) * q
