"""Tensor grids and weighted P1 element matrices.

All energies are exact integrals of the piecewise (bi/tri)linear interpolant
of the nodal values.  One-dimensional element matrices are assembled with the
weight integrated exactly on cells touching the origin and with 16-point
Gauss-Legendre elsewhere (the weights are analytic away from 0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


class GridError(ValueError):
    pass


def cell_moments(nodes: np.ndarray, power: float) -> np.ndarray:
    """``m[c, k] = int_cell y^power t^k dy`` for k = 0, 1, 2, with ``t`` the local coordinate."""
    a = nodes[:-1]
    h = np.diff(nodes)
    m = np.empty((a.shape[0], 3))
    y = a[:, None] + h[:, None] * _GL_X[None, :]
    w = h[:, None] * _GL_W[None, :] * y**power
    for k in range(3):
        m[:, k] = (w * _GL_X[None, :] ** k).sum(axis=1)
    if nodes[0] == 0.0:
        h0 = h[0]
        for k in range(3):
            den = power + k + 1.0
            m[0, k] = h0 ** (power + 1.0) / den if den > 0 else np.inf
    return m


def p1_matrices(nodes: np.ndarray, power: float = 0.0):
    """Weighted P1 stiffness and mass on ``nodes``, weight ``y^power``.

    Returns ``(kd, ko, md, mo)``: diagonals and off-diagonals of the symmetric
    tridiagonal stiffness ``int w u' v'`` and mass ``int w u v``.
    """
    nodes = np.asarray(nodes, dtype=float)
    h = np.diff(nodes)
    m = cell_moments(nodes, power)
    n = nodes.shape[0]
    kd = np.zeros(n)
    md = np.zeros(n)
    with np.errstate(invalid="ignore"):
        kc = m[:, 0] / h**2
        mll = m[:, 0] - 2.0 * m[:, 1] + m[:, 2]
        mlr = m[:, 1] - m[:, 2]
        mrr = m[:, 2]
    kd[:-1] += kc
    kd[1:] += kc
    md[:-1] += mll
    md[1:] += mrr
    return kd, -kc, md, mlr


def lumped(nodes: np.ndarray, power: float = 0.0) -> np.ndarray:
    """Row sums of the weighted mass matrix: ``int w phi_i``."""
    m = cell_moments(np.asarray(nodes, float), power)
    out = np.zeros(len(nodes))
    out[:-1] += m[:, 0] - m[:, 1]
    out[1:] += m[:, 1]
    return out


def weighted_mass(a: float, b: float, power: float) -> float:
    """``int_a^b y^power dy`` in closed form."""
    e = power + 1.0
    return (b**e - a**e) / e


def grading_exponent(alpha: float) -> float:
    return max(1.0, 1.0 / (2.0 * alpha))


def graded_nodes(L: float, n: int, p: float) -> np.ndarray:
    y = L * (np.arange(n + 1) / n) ** p
    y[-1] = L
    return y


def sine_eigs(ns: int, h: float):
    """Eigenvalues of the uniform P1 stiffness and mass for the discrete sine modes 1..ns-1."""
    k = np.arange(1, ns)
    c = np.cos(k * math.pi / ns)
    tau = 2.0 / h * (1.0 - c)
    sigma = h / 3.0 * (2.0 + c)
    return tau, sigma


@dataclass(frozen=True)
class StripGrid:
    """``[0, lam] x [0, L]`` with ``ns`` uniform s-intervals and ``ny`` graded y-intervals."""

    lam: float
    ns: int
    ny: int
    L: float
    alpha: float
    p: float | None = None
    y_nodes: tuple | None = None

    def __post_init__(self):
        if self.lam <= 0 or self.L <= 0:
            raise GridError("lam and L must be positive")
        if self.ns < 2 or self.ny < 1:
            raise GridError("need ns >= 2 and ny >= 1")
        if not 0 < self.alpha < 1:
            raise GridError("alpha must lie in (0, 1)")

    @classmethod
    def default(cls, lam, alpha, ns=128, ny=128, L=None):
        return cls(lam=lam, ns=ns, ny=ny, L=12.0 * lam / math.pi if L is None else L, alpha=alpha)

    @property
    def beta(self) -> float:
        return 1.0 - 2.0 * self.alpha

    @property
    def h(self) -> float:
        return self.lam / self.ns

    @cached_property
    def s(self) -> np.ndarray:
        return np.linspace(0.0, self.lam, self.ns + 1)

    @cached_property
    def y(self) -> np.ndarray:
        if self.y_nodes is not None:
            y = np.asarray(self.y_nodes, float)
            if y[0] != 0 or np.any(np.diff(y) <= 0) or len(y) != self.ny + 1:
                raise GridError("explicit y nodes must start at 0 and increase")
            return y
        p = grading_exponent(self.alpha) if self.p is None else self.p
        return graded_nodes(self.L, self.ny, p)

    @cached_property
    def ymats(self):
        return p1_matrices(self.y, self.beta)

    @cached_property
    def smats(self):
        return p1_matrices(self.s, 0.0)

    @cached_property
    def trace_weights(self) -> np.ndarray:
        return lumped(self.s, 0.0)

    @cached_property
    def modes(self):
        """(tau, sigma, nu) for the discrete sine modes."""
        tau, sigma = sine_eigs(self.ns, self.h)
        return tau, sigma, tau / sigma

    def cell_masses(self) -> np.ndarray:
        """``int y^(1-2a) dy`` over each y-cell."""
        return weighted_mass(self.y[:-1], self.y[1:], self.beta)

    def with_y(self, y_nodes) -> "StripGrid":
        y = np.asarray(y_nodes, float)
        return StripGrid(self.lam, self.ns, len(y) - 1, float(y[-1]), self.alpha, y_nodes=tuple(y))


@dataclass(frozen=True)
class CylGrid:
    """``[0, R] x [0, lam] x [0, L]`` in (r, s, y); r uniform, y graded."""

    R: float
    lam: float
    L: float
    nr: int
    ns: int
    ny: int
    alpha: float
    p: float | None = None
    y_nodes: tuple | None = None
    r_nodes: tuple | None = None

    def __post_init__(self):
        if min(self.R, self.lam, self.L) <= 0:
            raise GridError("R, lam, L must be positive")
        if self.nr < 2 or self.ns < 2 or self.ny < 1:
            raise GridError("grid too small")

    @classmethod
    def default(cls, lam, alpha, R=None, L=None, nr=96, ns=64, ny=96):
        R = 8.0 * lam / math.pi if R is None else R
        L = 12.0 * lam / math.pi if L is None else L
        return cls(R=R, lam=lam, L=L, nr=nr, ns=ns, ny=ny, alpha=alpha)

    @property
    def beta(self) -> float:
        return 1.0 - 2.0 * self.alpha

    @property
    def h(self) -> float:
        return self.lam / self.ns

    @property
    def ang(self) -> float:
        """Coefficient of the angular stiffness ``lam^2 / pi^2``."""
        return (self.lam / math.pi) ** 2

    @cached_property
    def r(self) -> np.ndarray:
        if self.r_nodes is not None:
            return np.asarray(self.r_nodes, float)
        return np.linspace(0.0, self.R, self.nr + 1)

    @cached_property
    def s(self) -> np.ndarray:
        return np.linspace(0.0, self.lam, self.ns + 1)

    @cached_property
    def y(self) -> np.ndarray:
        if self.y_nodes is not None:
            return np.asarray(self.y_nodes, float)
        p = grading_exponent(self.alpha) if self.p is None else self.p
        return graded_nodes(self.L, self.ny, p)

    @cached_property
    def strip(self) -> StripGrid:
        return StripGrid(self.lam, self.ns, self.ny, self.L, self.alpha, p=self.p,
                         y_nodes=None if self.y_nodes is None else tuple(self.y_nodes))

    @cached_property
    def rmats(self):
        """(K_r, A_r, B_r) as (diag, off) pairs: weights r, r and 1/r."""
        kd, ko, ad, ao = p1_matrices(self.r, 1.0)
        _, _, bd, bo = p1_matrices(self.r, -1.0)
        return (kd, ko), (ad, ao), (bd, bo)

    @cached_property
    def trace_weights(self) -> np.ndarray:
        """Lumped ``r dr ds`` weights on the y = 0 face, shape (nr+1, ns+1)."""
        return np.outer(lumped(self.r, 1.0), lumped(self.s, 0.0))

    @property
    def shape(self):
        return (self.nr + 1, self.ns + 1, self.ny + 1)
