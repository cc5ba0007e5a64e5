"""Screw-invariant extended problem on the cylinder ``[0, R] x [0, lam] x [0, L]``.

In the reduced variables ``V(r, s, y) = v(r, 0, s, y)`` the energy is

    E(V) = 1/(2 c_a) int (V_r^2 + (1 + lam^2/(pi^2 r^2)) V_s^2 + V_y^2) r y^(1-2a)
           + int F(V(r, s, 0)) r dr ds

discretised with trilinear elements (weights ``r``, ``1/r`` and ``y^(1-2a)``
integrated exactly per cell).  ``V`` vanishes on ``s in {0, lam}``, ``r = R``,
``y = L`` and on the axis ``r = 0``, which lies on the helicoid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.fft import dst

from . import kernels, specfun
from .grids import CylGrid, StripGrid, lumped
from .optim import projected_newton
from .strip1d import StripField, energy_E0

log = logging.getLogger(__name__)


class CylinderError(ValueError):
    pass


@dataclass(frozen=True)
class ReducedField:
    grid: CylGrid
    values: np.ndarray  # (nr+1, ns+1, ny+1)

    def __post_init__(self):
        v = np.asarray(self.values, float)
        if v.shape != self.grid.shape:
            raise CylinderError(f"field shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)

    @property
    def trace(self) -> np.ndarray:
        return self.values[:, :, 0]

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def check_boundary(self, tol=0.0):
        v = self.values
        if not np.all(np.isfinite(v)):
            raise CylinderError("field contains NaN or inf")
        edge = max(np.max(np.abs(v[0])), np.max(np.abs(v[-1])), np.max(np.abs(v[:, 0])),
                   np.max(np.abs(v[:, -1])), np.max(np.abs(v[:, :, -1])))
        if edge > tol:
            raise CylinderError(f"field violates the boundary conditions (max {edge:.3e})")


def initial_field(grid: CylGrid, amplitude=0.1) -> ReducedField:
    """``amplitude sin(pi s/lam) phi2(pi y/lam) min(r, 1)``, zero on the outer faces."""
    prof = specfun.phi2(grid.alpha, math.pi * grid.y / grid.lam)
    prof[-1] = 0.0
    sn = np.sin(math.pi * np.arange(grid.ns + 1) / grid.ns)
    sn[0] = sn[-1] = 0.0
    rr = np.minimum(grid.r, 1.0)
    rr[-1] = 0.0
    return ReducedField(grid, amplitude * rr[:, None, None] * sn[None, :, None] * prof[None, None, :])


# ---------------------------------------------------------------------------
# Energy and the discrete operator
# ---------------------------------------------------------------------------


def _b_safe(grid):
    (_, _), (_, _), (bd, bo) = grid.rmats
    bd = bd.copy()
    bd[0] = 0.0  # axis row: V = 0 there, the weight 1/r is not integrable on a nonzero constant
    return bd, bo


def stiffness_apply(grid: CylGrid, V: np.ndarray) -> np.ndarray:
    """Action of the weighted trilinear stiffness on nodal values."""
    (kd, ko), (ad, ao), _ = grid.rmats
    bd, bo = _b_safe(grid)
    ksd, kso, msd, mso = grid.strip.smats
    kyd, kyo, myd, myo = grid.strip.ymats
    t = kernels.tri_axis
    My = t(V, myd, myo, 2)
    out = t(t(My, msd, mso, 1), kd, ko, 0)
    KsMy = t(My, ksd, kso, 1)
    out += t(KsMy, ad, ao, 0) + grid.ang * t(KsMy, bd, bo, 0)
    out += t(t(t(V, kyd, kyo, 2), msd, mso, 1), ad, ao, 0)
    return out


def energy_cyl(f: ReducedField, potential, alpha: float | None = None) -> float:
    grid = f.grid
    if alpha is not None and not math.isclose(alpha, grid.alpha):
        raise CylinderError("alpha does not match the grid")
    if not np.all(np.isfinite(f.values)):
        raise CylinderError("field contains NaN or inf")
    if np.max(np.abs(f.values[0])) > 0:
        raise CylinderError("field must vanish on the axis r = 0")
    c = specfun.c_alpha(grid.alpha)
    D = float(np.sum(f.values * stiffness_apply(grid, f.values)))
    return D / (2.0 * c) + float(np.sum(grid.trace_weights * potential.F(f.trace)))


def _lumped_mass(grid):
    return (lumped(grid.r, 1.0)[:, None, None] * lumped(grid.s, 0.0)[None, :, None]
            * lumped(grid.y, grid.beta)[None, None, :])


def pde_residual(f: ReducedField, alpha=None, lam=None) -> np.ndarray:
    """Discrete value of ``V_rr + V_r/r + (1 + lam^2/(pi^2 r^2)) V_ss + V_yy + (1-2a)/y V_y``.

    Computed as minus the stiffness action over the lumped mass at interior
    nodes; boundary nodes are set to zero.
    """
    grid = f.grid
    out = np.zeros(grid.shape)
    A = stiffness_apply(grid, f.values)
    m = _lumped_mass(grid)
    out[1:-1, 1:-1, 1:-1] = -A[1:-1, 1:-1, 1:-1] / m[1:-1, 1:-1, 1:-1]
    return out


def operator_fd(func, alpha, lam, r, s, y, h=1e-4):
    """The same operator on a smooth callable ``func(r, s, y)`` by central differences."""
    r, s, y = (np.asarray(a, float) for a in (r, s, y))
    f0 = func(r, s, y)

    def d2(fp, fm):
        return (fp - 2 * f0 + fm) / h**2

    fr_p, fr_m = func(r + h, s, y), func(r - h, s, y)
    fs_p, fs_m = func(r, s + h, y), func(r, s - h, y)
    fy_p, fy_m = func(r, s, y + h), func(r, s, y - h)
    ang = (lam / math.pi) ** 2
    return (d2(fr_p, fr_m) + (fr_p - fr_m) / (2 * h * r) + (1 + ang / r**2) * d2(fs_p, fs_m)
            + d2(fy_p, fy_m) + (1 - 2 * alpha) / y * (fy_p - fy_m) / (2 * h))


# ---------------------------------------------------------------------------
# Trace reduction and minimisation
# ---------------------------------------------------------------------------


@dataclass
class CylTraceOperator:
    """Minimal Dirichlet energy as a function of the trace, block diagonal in sine modes of ``s``."""

    grid: CylGrid
    theta: np.ndarray = field(init=False)  # (K, M)
    Z: np.ndarray = field(init=False)  # (K, M, M), A_r-orthonormal
    prof: np.ndarray = field(init=False)  # (K, M, ny+1)
    sym: np.ndarray = field(init=False)  # (K, M, M)

    def __post_init__(self):
        g = self.grid
        (kd, ko), (ad, ao), _ = g.rmats
        bd, bo = _b_safe(g)
        _, sigma, nu = g.strip.modes
        sl = slice(1, -1)
        Kr = _dense(kd[sl], ko[1:-1])
        Ar = _dense(ad[sl], ao[1:-1])
        Br = _dense(bd[sl], bo[1:-1])
        K, M = len(nu), Kr.shape[0]
        self.theta = np.empty((K, M))
        self.Z = np.empty((K, M, M))
        for k in range(K):
            self.theta[k], self.Z[k] = scipy.linalg.eigh(Kr + nu[k] * (Ar + g.ang * Br), Ar)
        yd, yo, ymd, ymo = g.strip.ymats
        gk, prof = kernels.dtn_profiles(self.theta.ravel(), yd, yo, ymd, ymo)
        self.prof = prof.reshape(K, M, -1)
        gk = gk.reshape(K, M)
        AZ = np.einsum("ij,kjm->kim", Ar, self.Z)
        self._AZ = AZ
        c = specfun.c_alpha(g.alpha)
        self.sym = np.einsum("kim,km,kjm->kij", AZ, (sigma[:, None] * gk) / c, AZ)

    def _hat(self, u):
        return dst(u, type=1, norm="ortho", axis=1)

    def apply(self, u):
        uh = self._hat(u)
        return dst(np.einsum("kij,jk->ik", self.sym, uh), type=1, norm="ortho", axis=1)

    def energy(self, u):
        uh = self._hat(u)
        return 0.5 * float(np.einsum("ik,kij,jk->", uh, self.sym, uh))

    def extend(self, u) -> np.ndarray:
        g = self.grid
        uh = self._hat(u)
        coef = np.einsum("kim,ik->km", self._AZ, uh)
        inner = np.einsum("kim,km,kmj->ikj", self.Z, coef, self.prof)
        V = np.zeros(g.shape)
        V[1:-1, 1:-1, :] = dst(inner, type=1, norm="ortho", axis=1)
        V[1:-1, 1:-1, 0] = u
        return V


def _dense(d, o):
    return np.diag(d) + np.diag(o, 1) + np.diag(o, -1)


@dataclass
class CylSolution:
    field: ReducedField
    energy: float
    residual: float
    iterations: int
    history: list

    @property
    def sup(self):
        return self.field.sup


def minimize_cyl(grid: CylGrid, potential, alpha=None, init: ReducedField | None = None,
                 tol_residual=1e-8, rtol_energy=1e-12, max_iter=200, op=None) -> CylSolution:
    """Minimise the cylinder energy over fields with values in ``[0, 1]``."""
    if alpha is not None and not math.isclose(alpha, grid.alpha):
        raise CylinderError("alpha does not match the grid")
    init = init if init is not None else initial_field(grid)
    init.check_boundary(tol=1e-12)
    op = op or CylTraceOperator(grid)
    tw = grid.trace_weights
    wts = tw[1:-1, 1:-1]
    wr = wts[:, 0] / grid.h
    edge = float(np.sum(tw) - np.sum(wts)) * potential.F0

    def energy(u):
        return op.energy(u) + float(np.sum(wts * potential.F(u))) + edge

    def gradient(u):
        return op.apply(u) + wts * potential.dF(u)

    def hessp_at(u):
        d2 = wts * potential.ddF(u)
        return lambda p: op.apply(p) + d2 * p

    def precond_at(u):
        shift = grid.h * max(abs(float(np.mean(potential.ddF(u)))), 1e-3)
        inv = np.linalg.inv(op.sym + shift * np.diag(wr)[None])

        def P(r):
            rh = dst(r, type=1, norm="ortho", axis=1)
            return dst(np.einsum("kij,jk->ik", inv, rh), type=1, norm="ortho", axis=1)
        return P

    def residual(u, g):
        gp = np.where(((u <= 0) & (g > 0)) | ((u >= 1) & (g < 0)), 0.0, g)
        return float(np.max(np.abs(gp / wts)))

    res = projected_newton(energy, gradient, hessp_at, precond_at, residual, init.trace[1:-1, 1:-1],
                           0.0, 1.0, tol_residual=tol_residual, rtol_energy=rtol_energy, max_iter=max_iter)
    return CylSolution(ReducedField(grid, op.extend(res.x)), res.energy, res.residual, res.iterations,
                       res.history)


# ---------------------------------------------------------------------------
# Reconstruction in R^3 and the zero set
# ---------------------------------------------------------------------------


def reduced_coordinates(points, lam):
    """``(r, s', sign)``: ``s'`` in ``[0, lam]`` after screw invariance, 2 lam periodicity and odd reflection."""
    p = np.atleast_2d(np.asarray(points, float))
    r = np.hypot(p[:, 0], p[:, 1])
    phi = np.arctan2(p[:, 1], p[:, 0])
    s = np.mod(p[:, 2] - lam / math.pi * phi, 2 * lam)
    sign = np.where(s <= lam, 1.0, -1.0)
    s = np.where(s <= lam, s, 2 * lam - s)
    return r, s, sign


def reconstruct3d(f: ReducedField, points, y=0.0) -> np.ndarray:
    """``v(x, y)`` at points ``x`` in R^3 (``y = 0`` gives ``u``)."""
    g = f.grid
    r, s, sign = reduced_coordinates(points, g.lam)
    y = np.broadcast_to(np.asarray(y, float), r.shape)
    if np.any(r > g.R * (1 + 1e-12)):
        raise CylinderError("point outside the radial extent R; no extrapolation")
    if np.any(y < 0) or np.any(y > g.L):
        raise CylinderError("height outside [0, L]")
    return sign * kernels.trilinear(f.values, g.r, g.s, g.y, r, s, y)


def helicoid_points(lam, t, theta):
    t, theta = np.broadcast_arrays(np.asarray(t, float), np.asarray(theta, float))
    return np.stack([t * np.cos(theta), t * np.sin(theta), lam / math.pi * theta], axis=-1).reshape(-1, 3)


@dataclass
class ZeroSetReport:
    n_rays: int
    max_offset: float  # distance in x3 from a sign change to the nearest helicoid crossing
    cell: float
    missing: int  # helicoid crossings without a detected sign change
    spurious: int  # sign changes away from the helicoid

    @property
    def ok(self) -> bool:
        return self.missing == 0 and self.spurious == 0 and self.max_offset <= self.cell


def zero_set_check(f: ReducedField, n_rays=100, samples=2001, rng=None, r_range=None) -> ZeroSetReport:
    """Sample vertical rays ``x3 in [0, 2 lam]`` at random ``(x1, x2)`` and locate sign changes of ``u``."""
    g = f.grid
    rng = np.random.default_rng(0 if rng is None else rng)
    lo, hi = r_range or (g.R / g.nr, g.R * (1 - 1.0 / g.nr))
    x3 = np.linspace(0.0, 2 * g.lam, samples)
    cell = g.h
    worst, missing, spurious = 0.0, 0, 0
    for _ in range(n_rays):
        rad = rng.uniform(lo, hi)
        phi = rng.uniform(-math.pi, math.pi)
        pts = np.column_stack([np.full_like(x3, rad * math.cos(phi)), np.full_like(x3, rad * math.sin(phi)), x3])
        u = reconstruct3d(f, pts)
        sg = np.sign(u)
        nz = sg != 0
        xs, ss = x3[nz], sg[nz]
        flips = np.nonzero(ss[1:] != ss[:-1])[0]
        found = 0.5 * (xs[flips] + xs[flips + 1])
        exact = np.mod(g.lam / math.pi * phi, g.lam) + g.lam * np.arange(-1, 3)
        exact = exact[(exact > x3[0] + cell) & (exact < x3[-1] - cell)]
        for e in exact:
            if found.size == 0 or np.min(np.abs(found - e)) > cell:
                missing += 1
        for z in found:
            d = float(np.min(np.abs(exact - z))) if exact.size else np.inf
            near_end = min(z - x3[0], x3[-1] - z) <= cell
            if d > cell and not near_end:
                spurious += 1
            elif d <= cell:
                worst = max(worst, d)
    return ZeroSetReport(n_rays, worst, cell, missing, spurious)


# ---------------------------------------------------------------------------
# Decay in y
# ---------------------------------------------------------------------------


@dataclass
class DecayFit:
    rate: float
    stderr: float
    rate_pi_over_lambda: float
    rate_one: float = 1.0

    @property
    def rel_error_pi(self) -> float:
        return abs(self.rate - self.rate_pi_over_lambda) / self.rate_pi_over_lambda

    @property
    def rel_error_one(self) -> float:
        return abs(self.rate - 1.0)


def decay_rate(f, window=(0.5, 0.8), r=None) -> DecayFit:
    """Slope of ``log(V / y^(a - 1/2))`` on the midline ``s = lam/2`` over ``window * L``.

    Accepts a :class:`ReducedField` (evaluated at radius ``r``, default ``R/2``)
    or a :class:`StripField`.
    """
    g = f.grid
    if isinstance(f, ReducedField):
        r = g.R / 2 if r is None else r
        prof = kernels.trilinear(f.values, g.r, g.s, g.y, np.full(g.y.shape, r),
                                 np.full(g.y.shape, g.lam / 2), g.y)
    else:
        prof = np.array([np.interp(g.lam / 2, g.s, f.values[:, j]) for j in range(g.ny + 1)])
    y = g.y
    sel = (y >= window[0] * g.L) & (y <= window[1] * g.L)
    vals = prof[sel]
    if sel.sum() < 3 or np.any(vals <= 1e-300) or np.max(np.abs(vals)) < 1e-12:
        raise CylinderError("field too small to fit a decay rate")
    z = np.log(vals / y[sel] ** (g.alpha - 0.5))
    A = np.column_stack([np.ones(sel.sum()), y[sel]])
    coef, *_ = np.linalg.lstsq(A, z, rcond=None)
    resid = z - A @ coef
    dof = max(sel.sum() - 2, 1)
    cov = np.linalg.inv(A.T @ A) * float(resid @ resid) / dof
    return DecayFit(-float(coef[1]), float(math.sqrt(max(cov[1, 1], 0.0))), math.pi / g.lam)


# ---------------------------------------------------------------------------
# Barrier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BarrierParams:
    K: float
    C: float
    eps: float
    strict: bool = True  # require C > e^2

    def __post_init__(self):
        if self.K <= 0 or self.eps <= 0:
            raise CylinderError("K and eps must be positive")
        if self.strict and not self.C > math.e**2:
            raise CylinderError("C must exceed e^2")


def barrier_value(p: BarrierParams, alpha, lam, r, s, y):
    k = math.pi / lam
    s = np.asarray(s, float)
    sn = np.sin(k * np.minimum(s, lam - s))
    ep, em = np.exp(0.5 * k * np.asarray(r, float)), np.exp(-0.5 * k * np.asarray(r, float))
    return p.K * sn * (specfun.phi2(alpha, k * np.asarray(y, float)) + p.eps * specfun.phi1(alpha, k * np.asarray(y, float))
                       + p.eps * (ep + p.C * em))


def barrier_operator(p: BarrierParams, alpha, lam, r, s, y):
    """Closed form of the cylinder operator on ``w_eps``: ``K (A1 + A2) - w / r^2``."""
    r, s, y = np.broadcast_arrays(*(np.asarray(a, float) for a in (r, s, y)))
    k = math.pi / lam
    sn = np.sin(k * np.minimum(s, lam - s))
    ep, em = np.exp(0.5 * k * r), np.exp(-0.5 * k * r)
    A1 = -0.75 * p.eps * k**2 * sn * (ep + p.C * em)
    A2 = 0.5 / r * p.eps * k * sn * (ep - p.C * em)
    return p.K * (A1 + A2) - barrier_value(p, alpha, lam, r, s, y) / r**2


@dataclass
class BarrierReport:
    max_operator: float
    worst_point: tuple
    zero_on_s_faces: bool
    nonneg_on_axis: bool
    trace_dominates: bool
    axis_sign_condition: bool  # e^(k r/2) - C e^(-k r/2) <= 0 for all sampled r < lam/pi
    fd_max_rel_diff: float

    @property
    def ok(self) -> bool:
        return self.zero_on_s_faces and self.nonneg_on_axis and self.trace_dominates


def barrier_check(p: BarrierParams, alpha, lam, n=64, r_range=(1e-3, None), y_range=(1e-3, None)) -> BarrierReport:
    """Sample the barrier on an ``n^3`` grid, logarithmic in ``r`` and ``y``."""
    rmax = r_range[1] or 10 * lam / math.pi
    ymax = y_range[1] or 10 * lam / math.pi
    r = np.geomspace(r_range[0], rmax, n)
    s = np.linspace(0.0, lam, n + 2)[1:-1]
    y = np.geomspace(y_range[0], ymax, n)
    R, S, Y = np.meshgrid(r, s, y, indexing="ij")
    op = barrier_operator(p, alpha, lam, R, S, Y)
    idx = np.unravel_index(int(np.argmax(op)), op.shape)
    worst = (float(R[idx]), float(S[idx]), float(Y[idx]))

    faces = barrier_value(p, alpha, lam, R[:, :2, :], np.array([0.0, lam])[None, :, None], Y[:, :2, :])
    axis = barrier_value(p, alpha, lam, 0.0, s[:, None], y[None, :])
    k = math.pi / lam
    tr = barrier_value(p, alpha, lam, r[:, None], s[None, :], 0.0)
    dom = bool(np.all(tr >= 0.5 * p.K * np.sin(k * s)[None, :]))
    near = r[r < lam / math.pi]
    sign_ok = bool(np.all(np.exp(0.5 * k * near) - p.C * np.exp(-0.5 * k * near) <= 0))

    # finite-difference consistency on a coarse interior subset
    sub = (slice(n // 4, None, max(n // 8, 1)),) * 3
    Rs, Ss, Ys = R[sub], S[sub], Y[sub]
    fd = operator_fd(lambda a, b, c: barrier_value(p, alpha, lam, a, b, c), alpha, lam, Rs, Ss, Ys, h=1e-4)
    cf = op[sub]
    scale = np.maximum(np.abs(cf), 1e-3 * p.K * p.eps)
    fd_diff = float(np.max(np.abs(fd - cf) / scale))
    return BarrierReport(float(op[idx]), worst, bool(np.all(faces == 0.0)), bool(np.all(axis >= 0)), dom,
                         sign_ok, fd_diff)


# ---------------------------------------------------------------------------
# Competitor
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CompetitorParams:
    a: float
    b: float
    R: float

    def check(self, alpha):
        hi = 1.0 / (2.0 * (1.0 - alpha))
        if not 0.5 < self.a < self.b < hi:
            raise CylinderError(f"exponents must satisfy 1/2 < a < b < {hi:.6g}")
        if self.R < 2 or self.R ** self.b - self.R ** self.a <= 0:
            raise CylinderError("R too small for the cutoffs")


def eps_of_b(b, a, alpha):
    return 2.0 - max(1 + 2 * b * (1 - alpha), 2 + 2 * b * (1 - alpha) - 2 * a)


def _smoothstep(t):
    t = np.clip(t, 0.0, 1.0)
    return t * t * (3 - 2 * t)


def _dsmoothstep(t):
    inside = (t > 0) & (t < 1)
    return np.where(inside, 6 * t * (1 - t), 0.0)


def eta(r, R):
    """Cutoff: 0 on ``[0, 1/2]``, 1 on ``[1, R-1]``, 0 on ``[R-1/2, R]``, C^1."""
    r = np.asarray(r, float)
    return _smoothstep(2 * (r - 0.5)) * _smoothstep(2 * (R - 0.5 - r))


def deta(r, R):
    r = np.asarray(r, float)
    a, b = 2 * (r - 0.5), 2 * (R - 0.5 - r)
    return 2 * _dsmoothstep(a) * _smoothstep(b) - 2 * _smoothstep(a) * _dsmoothstep(b)


def xi(y, R, a, b):
    """Logarithmic cutoff: 1 below ``R^b - R^a``, 0 at ``R^b``."""
    y = np.asarray(y, float)
    top, low = R**b, R**b - R**a
    with np.errstate(divide="ignore"):
        val = (math.log(top) - np.log(np.maximum(y, 1e-300))) / (math.log(top) - math.log(low))
    return np.where(y <= low, 1.0, np.where(y >= top, 0.0, val))


_GX, _GW = np.polynomial.legendre.leggauss(40)


def _gauss(f, a, b, pieces=8):
    edges = np.linspace(a, b, pieces + 1)
    tot = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        x = 0.5 * (hi - lo) * _GX + 0.5 * (hi + lo)
        tot += 0.5 * (hi - lo) * float(np.sum(_GW * f(x)))
    return tot


@dataclass
class CompetitorEnergy:
    R: float
    total: float
    bulk: float  # (R^2/2) E0(v0)
    eta_term: float
    angular_term: float
    xi_term: float
    cutoff_defect: float
    eta_bound: float  # lam R^(1+2b(1-a)) scaling reference
    xi_bound: float  # lam R^(2+2b(1-a)-2a) scaling reference
    eps: float

    @property
    def excess(self) -> float:
        return self.total - self.bulk

    @property
    def parts_sum(self) -> float:
        return self.bulk + self.eta_term + self.angular_term + self.xi_term + self.cutoff_defect


def _clip_strip_height(v0: StripField, top: float):
    """Nodal values of ``v0`` on its y-grid truncated or zero-extended to ``[0, top]``."""
    g = v0.grid
    y = g.y
    V = v0.values
    if top >= y[-1]:
        extra = np.linspace(y[-1], top, max(2, int(math.ceil((top - y[-1]) / max(np.diff(y)[-1], 1e-9))) + 1))[1:]
        y2 = np.concatenate([y, extra])
        V2 = np.concatenate([V, np.zeros((V.shape[0], extra.size))], axis=1)
    else:
        keep = y < top
        y2 = np.concatenate([y[keep], [top]])
        last = np.array([np.interp(top, y, V[i]) for i in range(V.shape[0])])
        V2 = np.concatenate([V[:, keep], last[:, None]], axis=1)
    return g.with_y(y2), V2


def competitor_energy(params: CompetitorParams, v0: StripField, potential, alpha=None) -> CompetitorEnergy:
    """Energy of ``W = eta(r) xi(y) v0(s, y)`` on ``[0, R] x [0, lam] x [0, R^b]``.

    The ``(s, y)`` factor uses the same bilinear forms as the strip energy; the
    radial integrals of the smooth cutoff are done by Gauss-Legendre.
    """
    g0 = v0.grid
    alpha = g0.alpha if alpha is None else alpha
    params.check(alpha)
    R, a, b = params.R, params.a, params.b
    lam = g0.lam
    c = specfun.c_alpha(alpha)
    ang = (lam / math.pi) ** 2

    grid, V = _clip_strip_height(v0, R**b)
    q = xi(grid.y, R, a, b)[None, :] * V
    ksd, kso, msd, mso = grid.smats
    kyd, kyo, myd, myo = grid.ymats

    def form(X, sm, ym):
        Y = kernels.tri_axis(X[:, :, None], sm[0], sm[1], 0)[:, :, 0]
        Y = kernels.tri_axis(Y[:, :, None], ym[0], ym[1], 1)[:, :, 0]
        return float(np.sum(X * Y))

    Ms, Ks, My, Ky = (msd, mso), (ksd, kso), (myd, myo), (kyd, kyo)
    mass_q = form(q, Ms, My)
    ks_q = form(q, Ks, My)
    sy_q = ks_q + form(q, Ms, Ky)
    sy_v = form(V, Ks, My) + form(V, Ms, Ky)

    segs = [(0.5, 1.0), (R - 1.0, R - 0.5)]
    I_rr = sum(_gauss(lambda r: deta(r, R) ** 2 * r, lo, hi) for lo, hi in segs)
    I_b = sum(_gauss(lambda r: eta(r, R) ** 2 / r, lo, hi) for lo, hi in segs) + math.log((R - 1.0) / 1.0)
    I_r = sum(_gauss(lambda r: eta(r, R) ** 2 * r, lo, hi) for lo, hi in segs) + 0.5 * ((R - 1.0) ** 2 - 1.0)

    tw = grid.trace_weights
    tr0 = q[:, 0]

    def trace_r(r):
        return r[:, None] * potential.F(eta(r, R)[:, None] * tr0[None, :]) @ tw

    T_w = (sum(_gauss(lambda r: trace_r(r), lo, hi) for lo, hi in [(0.0, 0.5), *segs, (R - 0.5, R)])
           + 0.5 * ((R - 1.0) ** 2 - 1.0) * float(np.sum(tw * potential.F(tr0))))

    e0 = energy_E0(v0, potential)
    bulk = 0.5 * R**2 * e0
    eta_term = I_rr * mass_q / (2 * c)
    angular_term = ang * I_b * ks_q / (2 * c)
    xi_term = I_r * (sy_q - sy_v) / (2 * c)
    T_v = float(np.sum(g0.trace_weights * potential.F(v0.trace)))
    cutoff_defect = (I_r - 0.5 * R**2) * sy_v / (2 * c) + (T_w - 0.5 * R**2 * T_v)
    # the strip energy may have been computed on a longer y-range; account for the truncation
    cutoff_defect += 0.5 * R**2 * (sy_v / (2 * c) + T_v - e0)
    total = eta_term + angular_term + I_r * sy_q / (2 * c) + T_w
    return CompetitorEnergy(
        R, total, bulk, eta_term, angular_term, xi_term, cutoff_defect,
        eta_bound=lam * R ** (1 + 2 * b * (1 - alpha)),
        xi_bound=lam * R ** (2 + 2 * b * (1 - alpha) - 2 * a),
        eps=eps_of_b(b, a, alpha),
    )


def strip_minimizer(lam, alpha, potential, ns=128, ny=128, L=None) -> StripField:
    from .strip1d import minimize_strip

    return minimize_strip(StripGrid.default(lam, alpha, ns=ns, ny=ny, L=L), potential).field
