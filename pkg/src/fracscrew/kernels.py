"""Hot numerical kernels with numba and pure-numpy implementations.

Every public kernel ``foo`` dispatches to ``_foo_nb`` (compiled) or
``_foo_np`` (vectorised numpy).  Both are always importable so the benchmark
and the tests can compare them directly.
"""

from __future__ import annotations

import numpy as np

from ._accel import HAVE_NUMBA, njit

# ---------------------------------------------------------------------------
# Batched weighted two-point problems in y
# ---------------------------------------------------------------------------


def _dtn_np(theta, kd, ko, md, mo):
    n = theta.shape[0]
    ny = kd.shape[0] - 1
    prof = np.zeros((n, ny + 1))
    prof[:, 0] = 1.0
    if ny == 1:
        g = kd[0] + theta * md[0]
        return g, prof
    m = ny - 1
    # interior rows 1..ny-1, unknowns v_1..v_{ny-1}
    diag = kd[1:ny][None, :] + theta[:, None] * md[1:ny][None, :]
    off = ko[1:ny - 1][None, :] + theta[:, None] * mo[1:ny - 1][None, :]
    rhs = np.zeros((n, m))
    rhs[:, 0] = -(ko[0] + theta * mo[0])
    cp = np.empty((n, m))
    dp = np.empty((n, m))
    cp[:, 0] = (off[:, 0] / diag[:, 0]) if m > 1 else 0.0
    dp[:, 0] = rhs[:, 0] / diag[:, 0]
    for j in range(1, m):
        den = diag[:, j] - off[:, j - 1] * cp[:, j - 1]
        if j < m - 1:
            cp[:, j] = off[:, j] / den
        dp[:, j] = (rhs[:, j] - off[:, j - 1] * dp[:, j - 1]) / den
    x = np.empty((n, m))
    x[:, m - 1] = dp[:, m - 1]
    for j in range(m - 2, -1, -1):
        x[:, j] = dp[:, j] - cp[:, j] * x[:, j + 1]
    prof[:, 1:ny] = x
    g = kd[0] + theta * md[0] + (ko[0] + theta * mo[0]) * x[:, 0]
    return g, prof


@njit
def _dtn_nb(theta, kd, ko, md, mo):
    n = theta.shape[0]
    ny = kd.shape[0] - 1
    prof = np.zeros((n, ny + 1))
    g = np.empty(n)
    m = ny - 1
    cp = np.empty(max(m, 1))
    dp = np.empty(max(m, 1))
    for q in range(n):
        t = theta[q]
        prof[q, 0] = 1.0
        if m == 0:
            g[q] = kd[0] + t * md[0]
            continue
        d0 = kd[1] + t * md[1]
        if m > 1:
            cp[0] = (ko[1] + t * mo[1]) / d0
        dp[0] = -(ko[0] + t * mo[0]) / d0
        for j in range(1, m):
            lo = ko[j] + t * mo[j]
            den = kd[j + 1] + t * md[j + 1] - lo * cp[j - 1]
            if j < m - 1:
                cp[j] = (ko[j + 1] + t * mo[j + 1]) / den
            dp[j] = (-lo * dp[j - 1]) / den
        prof[q, m] = dp[m - 1]
        for j in range(m - 2, -1, -1):
            prof[q, j + 1] = dp[j] - cp[j] * prof[q, j + 2]
        g[q] = kd[0] + t * md[0] + (ko[0] + t * mo[0]) * prof[q, 1]
    return g, prof


def dtn_profiles(theta, kd, ko, md, mo, use_numba=None):
    """Solve ``min v^T (K + theta M) v`` with ``v_0 = 1`` and ``v_end = 0``.

    ``K`` and ``M`` are symmetric tridiagonal (diagonal ``kd``/``md`` of length
    ``ny+1``, off-diagonal ``ko``/``mo`` of length ``ny``), one solve per entry
    of ``theta``.  Returns the minimal values ``g`` (the discrete
    Dirichlet-to-Neumann symbol) and the optimal profiles, shape
    ``(len(theta), ny+1)``.
    """
    theta = np.ascontiguousarray(theta, dtype=float)
    args = tuple(np.ascontiguousarray(a, dtype=float) for a in (kd, ko, md, mo))
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba:
        return _dtn_nb(theta, *args)
    return _dtn_np(theta, *args)


# ---------------------------------------------------------------------------
# Symmetric tridiagonal matrix applied along one axis of a 3D array
# ---------------------------------------------------------------------------


def _tri_axis_np(x, d, o, axis):
    x = np.moveaxis(x, axis, 0)
    y = d.reshape((-1, 1, 1)) * x
    y[:-1] += o.reshape((-1, 1, 1)) * x[1:]
    y[1:] += o.reshape((-1, 1, 1)) * x[:-1]
    return np.moveaxis(y, 0, axis)


@njit
def _tri_axis_nb(x, d, o, axis):
    n0, n1, n2 = x.shape
    y = np.empty_like(x)
    if axis == 0:
        for i in range(n0):
            for j in range(n1):
                for k in range(n2):
                    v = d[i] * x[i, j, k]
                    if i > 0:
                        v += o[i - 1] * x[i - 1, j, k]
                    if i < n0 - 1:
                        v += o[i] * x[i + 1, j, k]
                    y[i, j, k] = v
    elif axis == 1:
        for i in range(n0):
            for j in range(n1):
                for k in range(n2):
                    v = d[j] * x[i, j, k]
                    if j > 0:
                        v += o[j - 1] * x[i, j - 1, k]
                    if j < n1 - 1:
                        v += o[j] * x[i, j + 1, k]
                    y[i, j, k] = v
    else:
        for i in range(n0):
            for j in range(n1):
                for k in range(n2):
                    v = d[k] * x[i, j, k]
                    if k > 0:
                        v += o[k - 1] * x[i, j, k - 1]
                    if k < n2 - 1:
                        v += o[k] * x[i, j, k + 1]
                    y[i, j, k] = v
    return y


def tri_axis(x, d, o, axis, use_numba=None):
    """Apply the symmetric tridiagonal matrix ``(d, o)`` along ``axis`` of ``x``."""
    x = np.ascontiguousarray(x, dtype=float)
    if use_numba is None:
        use_numba = HAVE_NUMBA
    if use_numba:
        return _tri_axis_nb(x, np.ascontiguousarray(d, float), np.ascontiguousarray(o, float), int(axis))
    return _tri_axis_np(x, d, o, axis)


# ---------------------------------------------------------------------------
# Trilinear interpolation on a tensor grid
# ---------------------------------------------------------------------------


def _locate_np(nodes, x):
    i = np.searchsorted(nodes, x, side="right") - 1
    i = np.clip(i, 0, nodes.shape[0] - 2)
    t = (x - nodes[i]) / (nodes[i + 1] - nodes[i])
    return i, t


def _trilinear_np(values, g0, g1, g2, p0, p1, p2):
    i, a = _locate_np(g0, p0)
    j, b = _locate_np(g1, p1)
    k, c = _locate_np(g2, p2)
    out = np.zeros(p0.shape)
    for di, wa in ((0, 1 - a), (1, a)):
        for dj, wb in ((0, 1 - b), (1, b)):
            for dk, wc in ((0, 1 - c), (1, c)):
                out += wa * wb * wc * values[i + di, j + dj, k + dk]
    return out


@njit
def _trilinear_nb(values, g0, g1, g2, p0, p1, p2):
    n = p0.shape[0]
    out = np.empty(n)
    for q in range(n):
        i = min(max(np.searchsorted(g0, p0[q], side="right") - 1, 0), g0.shape[0] - 2)
        j = min(max(np.searchsorted(g1, p1[q], side="right") - 1, 0), g1.shape[0] - 2)
        k = min(max(np.searchsorted(g2, p2[q], side="right") - 1, 0), g2.shape[0] - 2)
        a = (p0[q] - g0[i]) / (g0[i + 1] - g0[i])
        b = (p1[q] - g1[j]) / (g1[j + 1] - g1[j])
        c = (p2[q] - g2[k]) / (g2[k + 1] - g2[k])
        v = 0.0
        for di in range(2):
            wa = a if di else 1.0 - a
            for dj in range(2):
                wb = b if dj else 1.0 - b
                for dk in range(2):
                    wc = c if dk else 1.0 - c
                    v += wa * wb * wc * values[i + di, j + dj, k + dk]
        out[q] = v
    return out


def trilinear(values, g0, g1, g2, p0, p1, p2, use_numba=None):
    """Trilinear interpolation of ``values`` (tensor grid ``g0 x g1 x g2``)."""
    p0, p1, p2 = (np.ascontiguousarray(np.ravel(p), dtype=float) for p in (p0, p1, p2))
    if use_numba is None:
        use_numba = HAVE_NUMBA
    fn = _trilinear_nb if use_numba else _trilinear_np
    return fn(np.ascontiguousarray(values, float), np.asarray(g0, float), np.asarray(g1, float),
              np.asarray(g2, float), p0, p1, p2)
