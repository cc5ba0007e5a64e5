"""Fractional interaction ``L(A, B)`` and perimeter for unions of boxes and balls.

``L(A, B) = int_A int_B |x - y|^(-n-2a) dy dx = int K(z) g(z) dz`` with the
cross-covariogram ``g(z) = |A cap (B - z)|``.  For boxes ``g`` is a product of
piecewise linear overlaps, so along every ray ``z = t w`` the radial integral
``int t^(-1-2a) g(t w) dt`` is a sum of exact power integrals; in 1D nothing
else is needed, in 3D the directions are integrated by octant-wise
Gauss-Legendre in ``(cos theta, psi)``.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .geometry import Ball

INF = math.inf


class PerimeterError(ValueError):
    pass


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(x) for x in self.lo)
        hi = tuple(float(x) for x in self.hi)
        if len(lo) != len(hi) or any(a >= b for a, b in zip(lo, hi)):
            raise PerimeterError(f"degenerate box {lo} x {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return len(self.lo)

    @property
    def volume(self):
        return math.prod(b - a for a, b in zip(self.lo, self.hi))

    def contains(self, pts):
        p = np.atleast_2d(np.asarray(pts, float))
        return np.all((p > np.array(self.lo)) & (p < np.array(self.hi)), axis=1)

    def scaled(self, s):
        return Box(tuple(s * a for a in self.lo), tuple(s * b for b in self.hi))


@dataclass(frozen=True)
class BoxUnion:
    """Union of boxes with disjoint interiors (may be empty)."""

    boxes: tuple = ()
    dim: int = 3

    def contains(self, pts):
        p = np.atleast_2d(np.asarray(pts, float))
        out = np.zeros(p.shape[0], bool)
        for b in self.boxes:
            out |= b.contains(p)
        return out

    def scaled(self, s):
        return BoxUnion(tuple(b.scaled(s) for b in self.boxes), self.dim)

    @property
    def empty(self):
        return not self.boxes


def half_space(dim=3, offset=0.0) -> BoxUnion:
    """``{x_n < offset}``."""
    lo = (-INF,) * dim
    hi = (INF,) * (dim - 1) + (offset,)
    return BoxUnion((Box(lo, hi),), dim)


def _intersect(a: Box, b: Box):
    lo = tuple(max(x, y) for x, y in zip(a.lo, b.lo))
    hi = tuple(min(x, y) for x, y in zip(a.hi, b.hi))
    return None if any(x >= y for x, y in zip(lo, hi)) else Box(lo, hi)


def _merge(boxes):
    boxes = list(boxes)
    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(len(boxes)), 2):
            a, b = boxes[i], boxes[j]
            diff = [k for k in range(a.dim) if (a.lo[k], a.hi[k]) != (b.lo[k], b.hi[k])]
            if len(diff) == 1:
                k = diff[0]
                if a.hi[k] == b.lo[k] or b.hi[k] == a.lo[k]:
                    lo = list(a.lo)
                    hi = list(a.hi)
                    lo[k], hi[k] = min(a.lo[k], b.lo[k]), max(a.hi[k], b.hi[k])
                    boxes[i] = Box(tuple(lo), tuple(hi))
                    del boxes[j]
                    changed = True
                    break
    return tuple(boxes)


def decompose(E: BoxUnion, window: Box):
    """Cells of the arrangement of ``E`` and ``window``: returns ``(E cap W, E^c, E minus W, W minus E)``."""
    n = E.dim
    cuts = []
    for k in range(n):
        c = {-INF, INF, window.lo[k], window.hi[k]}
        for b in E.boxes:
            c |= {b.lo[k], b.hi[k]}
        cuts.append(sorted(c))
    groups = {"EW": [], "Ec": [], "E-W": [], "W-E": []}
    for idx in itertools.product(*(range(len(c) - 1) for c in cuts)):
        lo = tuple(cuts[k][i] for k, i in enumerate(idx))
        hi = tuple(cuts[k][i + 1] for k, i in enumerate(idx))
        rep = np.array([_rep(a, b) for a, b in zip(lo, hi)])
        cell = Box(lo, hi)
        inE = bool(E.contains(rep)[0])
        inW = bool(window.contains(rep)[0])
        if inE and inW:
            groups["EW"].append(cell)
        if not inE:
            groups["Ec"].append(cell)
        if inE and not inW:
            groups["E-W"].append(cell)
        if inW and not inE:
            groups["W-E"].append(cell)
    return tuple(BoxUnion(_merge(groups[k]), n) for k in ("EW", "Ec", "E-W", "W-E"))


def _rep(a, b):
    if a == -INF and b == INF:
        return 0.0
    if a == -INF:
        return b - 1.0
    if b == INF:
        return a + 1.0
    return 0.5 * (a + b)


# ---------------------------------------------------------------------------
# Exact radial integrals
# ---------------------------------------------------------------------------


def _pow_int(c, k, u, v, e):
    """``c int_u^v t^(k+e) dt`` elementwise, zero where ``c == 0``."""
    p = k + e + 1.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        vu = np.where(np.isinf(v), 0.0, np.abs(v) ** p)
        uu = np.where(u == 0, 0.0, np.abs(u) ** p)
        out = c * (vu - uu) / p
    return np.where(c == 0, 0.0, out)


def _overlap_linear(a1, a2, b1, b2, w, t):
    """Slope/intercept in ``t`` of ``|[a1,a2] cap [b1 - t w, b2 - t w]|`` near ``t``."""
    z = t * w
    up_fixed = a2 <= b2 - z
    lo_fixed = a1 >= b1 - z
    pu = np.where(up_fixed, a2, b2)
    qu = np.where(up_fixed, 0.0, -w)
    pl = np.where(lo_fixed, a1, b1)
    ql = np.where(lo_fixed, 0.0, -w)
    with np.errstate(invalid="ignore"):
        val = np.where(up_fixed, a2, b2 - z) - np.where(lo_fixed, a1, b1 - z)
    pos = val > 0
    p = np.where(pos, pu - pl, 0.0)
    q = np.where(pos, qu - ql, 0.0)
    return np.nan_to_num(p, nan=0.0, posinf=0.0, neginf=0.0), q


def ray_integrals(A: Box, B: Box, w: np.ndarray, alpha: float) -> np.ndarray:
    """``int_0^inf t^(-1-2a) g(t w) dt`` for directions ``w`` (rows, unit length)."""
    n = A.dim
    e = -1.0 - 2 * alpha
    cand = []
    for k in range(n):
        wk = w[:, k]
        for c in (B.lo[k] - A.hi[k], B.lo[k] - A.lo[k], B.hi[k] - A.hi[k], B.hi[k] - A.lo[k]):
            if math.isfinite(c):
                with np.errstate(divide="ignore", invalid="ignore"):
                    t = np.where(wk != 0, c / wk, -1.0)
                cand.append(np.where(t > 0, t, 0.0))
    T = np.sort(np.column_stack([np.zeros(len(w))] + cand), axis=1)
    T = np.concatenate([T, np.full((len(w), 1), INF)], axis=1)
    total = np.zeros(len(w))
    for j in range(T.shape[1] - 1):
        u, v = T[:, j], T[:, j + 1]
        live = v > u
        if not np.any(live):
            continue
        mid = np.where(np.isinf(v), 2 * u + 1.0, 0.5 * (u + v))
        coef = np.zeros((len(w), n + 1))
        coef[:, 0] = 1.0
        for k in range(n):
            p, q = _overlap_linear(A.lo[k], A.hi[k], B.lo[k], B.hi[k], w[:, k], mid)
            new = np.zeros_like(coef)
            new[:, : n + 1] += coef * p[:, None]
            new[:, 1:] += coef[:, :-1] * q[:, None]
            coef = new
        coef[~live] = 0.0
        tail = np.isinf(v) & live
        if np.any(tail & np.any(np.abs(coef[:, 1:]) > 0, axis=1)):
            raise PerimeterError("interaction diverges at infinity (both sets unbounded in some direction)")
        head = (u == 0) & live
        if np.any(head & (np.abs(coef[:, 0]) > 1e-14)):
            raise PerimeterError("sets overlap: interaction is infinite")
        for k in range(n + 1):
            if k == 0:
                c0 = np.where(head, 0.0, coef[:, 0])
                total += _pow_int(c0, 0, u, v, e)
            else:
                total += _pow_int(coef[:, k], k, u, v, e)
    return total


@dataclass(frozen=True)
class AngularQuadrature:
    panels: int = 16
    order: int = 8

    def coarser(self):
        return AngularQuadrature(max(2, self.panels // 2), self.order)


def _sphere_rule(quad: AngularQuadrature):
    gx, gw = np.polynomial.legendre.leggauss(quad.order)
    gx, gw = 0.5 * (gx + 1), 0.5 * gw
    m = quad.panels
    u = ((np.arange(m)[:, None] + gx[None, :]) / m).ravel()
    wu = np.tile(gw / m, m)
    dirs, wts = [], []
    for zs in (1.0, -1.0):
        for quadrant in range(4):
            psi = 0.5 * math.pi * (quadrant + u)
            ct = zs * u
            CT, PS = np.meshgrid(ct, psi, indexing="ij")
            W = np.outer(wu, wu * 0.5 * math.pi)
            st = np.sqrt(1 - CT**2)
            dirs.append(np.column_stack([(st * np.cos(PS)).ravel(), (st * np.sin(PS)).ravel(), CT.ravel()]))
            wts.append(W.ravel())
    return np.concatenate(dirs), np.concatenate(wts)


def _box_pair(A: Box, B: Box, alpha, quad):
    if A.dim == 1:
        # both directions of the line
        w = np.array([[1.0], [-1.0]])
        return float(np.sum(ray_integrals(A, B, w, alpha)))
    if A.dim != 3:
        raise PerimeterError("only dimensions 1 and 3 are supported")
    w, wt = _sphere_rule(quad)
    return float(np.sum(wt * ray_integrals(A, B, w, alpha)))


@dataclass
class InteractionResult:
    value: float
    error: float
    pairs: int
    wall_time: float


def _check_disjoint(A: BoxUnion, B: BoxUnion):
    for a in A.boxes:
        for b in B.boxes:
            if _intersect(a, b) is not None:
                raise PerimeterError("sets overlap: interaction is infinite")


def interaction_L(A, B, alpha, quad: AngularQuadrature | None = None) -> InteractionResult:
    t0 = time.perf_counter()
    if not 0 < alpha < 0.5:
        raise PerimeterError("alpha must lie in (0, 1/2)")
    if isinstance(A, Ball) or isinstance(B, Ball):
        ball = A if isinstance(A, Ball) else B
        other = B if ball is A else A
        if not (isinstance(other, Ball) and other.complement != ball.complement
                and other.center == ball.center and other.radius == ball.radius):
            raise PerimeterError("balls are supported only against their own complement")
        return InteractionResult(ball_interaction(ball.radius, alpha, dim=3), 0.0, 1, time.perf_counter() - t0)
    A = A if isinstance(A, BoxUnion) else BoxUnion((A,), A.dim)
    B = B if isinstance(B, BoxUnion) else BoxUnion((B,), B.dim)
    _check_disjoint(A, B)
    quad = quad or AngularQuadrature()
    val = sum(_box_pair(a, b, alpha, quad) for a in A.boxes for b in B.boxes)
    err = 0.0
    if A.dim > 1 and A.boxes and B.boxes:
        coarse = sum(_box_pair(a, b, alpha, quad.coarser()) for a in A.boxes for b in B.boxes)
        err = abs(val - coarse)
    return InteractionResult(val, err, len(A.boxes) * len(B.boxes), time.perf_counter() - t0)


def ball_interaction(R, alpha, dim=3) -> float:
    """``L(B_R, B_R^c)`` in R^3 from the covariogram ``(pi/12)(4R+t)(2R-t)^2``."""
    if dim != 3:
        raise PerimeterError("ball interaction implemented in R^3 only")
    # |B| - gamma(t) = pi R^2 t - (pi/12) t^3 for t < 2R
    e = -1.0 - 2 * alpha
    near = math.pi * R**2 * (2 * R) ** (1 - 2 * alpha) / (1 - 2 * alpha) - math.pi / 12 * (2 * R) ** (3 - 2 * alpha) / (3 - 2 * alpha)
    vol = 4.0 / 3.0 * math.pi * R**3
    far = vol * (2 * R) ** (e + 1) / -(e + 1)
    return 4 * math.pi * (near + far)


@dataclass
class PerimeterResult:
    value: float
    error: float
    inner: float  # L(E cap W, E^c)
    outer: float  # L(E minus W, W minus E)
    wall_time: float

    def as_dict(self):
        return {"value": self.value, "error": self.error, "inner": self.inner, "outer": self.outer,
                "wall_time": self.wall_time}


def fractional_perimeter(E, window: Box, alpha, quad: AngularQuadrature | None = None) -> PerimeterResult:
    """``L(E cap W, E^c) + L(E minus W, W minus E)``."""
    t0 = time.perf_counter()
    if isinstance(E, Ball):
        lo = np.array(E.center) - E.radius
        hi = np.array(E.center) + E.radius
        if E.complement or np.any(lo < np.array(window.lo)) or np.any(hi > np.array(window.hi)):
            raise PerimeterError("the window must contain the ball")
        v = ball_interaction(E.radius, alpha)
        return PerimeterResult(v, 0.0, v, 0.0, time.perf_counter() - t0)
    if E.empty:
        return PerimeterResult(0.0, 0.0, 0.0, 0.0, time.perf_counter() - t0)
    EW, Ec, EmW, WmE = decompose(E, window)
    inner = interaction_L(EW, Ec, alpha, quad) if not EW.empty and not Ec.empty else None
    outer = interaction_L(EmW, WmE, alpha, quad) if not EmW.empty and not WmE.empty else None
    vi = inner.value if inner else 0.0
    vo = outer.value if outer else 0.0
    err = (inner.error if inner else 0.0) + (outer.error if outer else 0.0)
    return PerimeterResult(vi + vo, err, vi, vo, time.perf_counter() - t0)


def halfspace_reference(alpha, quad_oracle=None) -> float:
    """``2 T - L(W^-, W^+)`` for ``E = {x3 < 0}`` and the window ``[-1/2, 1/2]^3``.

    ``T = L(W^-, {x3 > 0})`` in closed form; the remaining interaction is left
    to the caller's oracle (a callable returning ``L(W^-, W^+)``).
    """
    T = math.pi / (alpha * (1 + 2 * alpha)) * 0.5 ** (1 - 2 * alpha) / (1 - 2 * alpha)
    return 2 * T - (quad_oracle() if quad_oracle else 0.0)
