"""Principal-value quadrature of the nonlocal mean curvature

    H(x0) = PV int (chi_E - chi_{E^c})(x) / |x - x0|^(3 + 2a) dx

in spherical shells around ``x0``.  On each shell ``rho`` the signed area
``a(rho) = int_{S^2} (chi_E - chi_{E^c})(x0 + rho w) dw`` is computed ring by
ring (rings about the vertical axis through ``x0``): every ring meets the
boundary in at most two points, known in closed form, so the ring integral is
exact and only the polar angle is integrated numerically.  Then

    H = int_0^inf a(rho) rho^(-1-2a) d rho

is integrated in ``log rho`` from ``delta`` to ``rho_max``; the ``delta -> 0``
limit is taken by Richardson extrapolation in powers ``delta^(j - 2a)``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import ScrewSurface, symmetry_map

TWO_PI = 2.0 * math.pi
_PROBE = 0.3711  # azimuth used to read the sign of boundary-free rings


class NMCError(ArithmeticError):
    pass


@dataclass(frozen=True)
class PVQuadrature:
    deltas: tuple
    rho_max: float
    theta_samples: int = 256
    panels_per_unit: float = 1.0
    gauss_theta: int = 16
    log_panel: float = 0.5
    gauss_rho: int = 8
    n_theta_sym: int = 48
    n_psi_sym: int = 96

    def __post_init__(self):
        d = tuple(sorted((float(x) for x in self.deltas), reverse=True))
        if not d or d[-1] <= 0:
            raise NMCError("exclusion radii must be positive")
        if self.rho_max <= 10 * d[0]:
            raise NMCError("rho_max must be well beyond the exclusion radii")
        object.__setattr__(self, "deltas", d)

    @classmethod
    def default(cls, t0=1.0, lam=math.pi, **kw):
        scale = min(1.0, t0, lam / math.pi)
        kw.setdefault("deltas", tuple(f * scale for f in (0.05, 0.025, 0.0125, 0.00625)))
        kw.setdefault("rho_max", 1e3 * max(1.0, t0, lam))
        return cls(**kw)

    def coarser(self) -> "PVQuadrature":
        return replace(self, theta_samples=max(32, self.theta_samples // 2), panels_per_unit=self.panels_per_unit / 2,
                       gauss_theta=max(8, self.gauss_theta // 2), log_panel=2 * self.log_panel,
                       gauss_rho=max(4, self.gauss_rho // 2))


# ---------------------------------------------------------------------------
# Rings and shells
# ---------------------------------------------------------------------------


def _ring_points(x0, rad, z, psi):
    return np.column_stack([x0[0] + rad * np.cos(psi), x0[1] + rad * np.sin(psi), z])


def ring_state(shape, x0, rho, theta):
    """0 if the ring meets the boundary, else the sign of the ring."""
    rad = rho * np.sin(theta)
    z = x0[2] + rho * np.cos(theta)
    q = shape.ring_q((x0[0], x0[1]), rad, z)
    mixed = np.abs(q) < 1
    s = shape.sign(_ring_points(x0, rad, z, np.full_like(rad, _PROBE)), tol=0.0)
    return np.where(mixed, 0.0, s)


def ring_signed(shape, x0, rho, theta):
    """``int_0^{2 pi} sign(x0 + rho w(theta, psi)) d psi`` for an array of polar angles."""
    theta = np.asarray(theta, float)
    rad = rho * np.sin(theta)
    z = x0[2] + rho * np.cos(theta)
    q = shape.ring_q((x0[0], x0[1]), rad, z)
    mixed = np.abs(q) < 1
    # probes never need the boundary band: ring edges are located exactly
    out = TWO_PI * shape.sign(_ring_points(x0, rad, z, np.full_like(rad, _PROBE)), tol=0.0)
    if np.any(mixed):
        r, zz = rad[mixed], z[mixed]
        cr = shape.ring_crossings((x0[0], x0[1]), r, zz)
        arc = np.mod(cr[:, 1] - cr[:, 0], TWO_PI)
        m1 = cr[:, 0] + 0.5 * arc
        s1 = shape.sign(_ring_points(x0, r, zz, m1), tol=0.0)
        s2 = shape.sign(_ring_points(x0, r, zz, m1 + math.pi), tol=0.0)
        out[mixed] = s1 * arc + s2 * (TWO_PI - arc)
    return out


_SMOOTH = lambda u: u * u * (3 - 2 * u)  # noqa: E731
_DSMOOTH = lambda u: 6 * u * (1 - u)  # noqa: E731


def _theta_samples(rho, scale, n):
    m = n + int(math.ceil(8 * rho / scale))
    base = np.linspace(0, math.pi, m)
    pole = np.geomspace(1e-9, 0.2, 64)
    return np.unique(np.concatenate([base, pole, math.pi - pole]))


def shell_signed_area(shape, x0, rho, quad: PVQuadrature):
    """``a(rho)`` and the number of ring evaluations used."""
    scale = shape.length_scale
    th = _theta_samples(rho, scale, quad.theta_samples)
    st = ring_state(shape, x0, rho, th)
    ch = np.nonzero(st[1:] != st[:-1])[0]
    lo, hi = th[ch], th[ch + 1]
    slo = st[ch]
    for _ in range(55):
        mid = 0.5 * (lo + hi)
        sm = ring_state(shape, x0, rho, mid)
        same = sm == slo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    edges = np.concatenate([[0.0], 0.5 * (lo + hi), [math.pi]])
    # state of each interval from a sample strictly inside it
    states = np.concatenate([[st[0]], st[ch + 1]])
    total = 0.0
    count = len(th) + 55 * len(ch)
    gx, gw = np.polynomial.legendre.leggauss(quad.gauss_theta)
    gx, gw = 0.5 * (gx + 1), 0.5 * gw
    nodes, weights = [], []
    for a, b, s in zip(edges[:-1], edges[1:], states):
        if b <= a:
            continue
        if s != 0:
            total += s * TWO_PI * (math.cos(a) - math.cos(b))
            continue
        npan = max(1, int(math.ceil(quad.panels_per_unit * rho * (b - a) / scale)))
        u0 = np.arange(npan)[:, None] / npan
        u = (u0 + gx[None, :] / npan).ravel()
        w = np.tile(gw / npan, npan)
        nodes.append(a + (b - a) * _SMOOTH(u))
        weights.append(w * (b - a) * _DSMOOTH(u))
    if nodes:
        t = np.concatenate(nodes)
        w = np.concatenate(weights)
        total += float(np.sum(w * np.sin(t) * ring_signed(shape, x0, rho, t)))
        count += t.size
    return total, count


# ---------------------------------------------------------------------------
# Radial integration and extrapolation
# ---------------------------------------------------------------------------


def _log_nodes(a, b, panel, n):
    la, lb = math.log(a), math.log(b)
    k = max(1, int(math.ceil((lb - la) / panel)))
    gx, gw = np.polynomial.legendre.leggauss(n)
    e = np.linspace(la, lb, k + 1)
    h = np.diff(e)
    tau = (e[:-1, None] + 0.5 * h[:, None] * (gx[None, :] + 1)).ravel()
    w = (0.5 * h[:, None] * gw[None, :]).ravel()
    return np.exp(tau), w


def richardson(deltas, values, alpha):
    """Extrapolate ``I(delta) = I0 + sum_j c_j delta^(j - 2a)`` to ``delta = 0``.

    Returns ``(I0, error)`` with the error taken from dropping the largest delta.
    """
    d = np.asarray(deltas, float)
    v = np.asarray(values, float)

    def solve(dd, vv):
        m = len(dd)
        A = np.column_stack([np.ones(m)] + [dd ** (j - 2 * alpha) for j in range(1, m)])
        return float(np.linalg.solve(A, vv)[0])

    best = solve(d, v)
    if len(d) < 3:
        return best, abs(best - v[-1])
    return best, abs(best - solve(d[1:], v[1:]))


@dataclass
class NMCResult:
    value: float
    error: float
    pv_extrapolation_error: float
    quadrature_error: float
    tail_estimate: float
    tail_bound: float
    node_count: int
    wall_time: float
    truncated: list = field(default_factory=list)  # I(delta) for each delta

    def as_dict(self):
        return {
            "value": self.value,
            "error": self.error,
            "pv_extrapolation_error": self.pv_extrapolation_error,
            "quadrature_error": self.quadrature_error,
            "tail_estimate": self.tail_estimate,
            "tail_bound": self.tail_bound,
            "node_count": self.node_count,
            "wall_time": self.wall_time,
        }


def _pv_once(shape, x0, alpha, quad):
    deltas = quad.deltas
    breaks = sorted({*deltas, quad.rho_max, *(b for b in shape.rho_breaks(x0) if deltas[-1] < b < quad.rho_max)})
    seg_vals = []
    count = 0
    scale = 0.0  # integral of the largest possible |a(rho)| = 4 pi, for the roundoff estimate
    for a, b in zip(breaks[:-1], breaks[1:]):
        rho, w = _log_nodes(a, b, quad.log_panel, quad.gauss_rho)
        acc = 0.0
        for r, wi in zip(rho, w):
            s, c = shell_signed_area(shape, x0, r, quad)
            acc += wi * s * r ** (-2 * alpha)
            scale += wi * 4 * math.pi * r ** (-2 * alpha)
            count += c
        seg_vals.append((a, acc))
    I = [sum(v for a, v in seg_vals if a >= d - 1e-15 * d) for d in deltas]
    a_max, c = shell_signed_area(shape, x0, quad.rho_max, quad)
    count += c
    tail = a_max * quad.rho_max ** (-2 * alpha) / (2 * alpha)
    I0, rerr = richardson(deltas, I, alpha)
    roundoff = np.finfo(float).eps * math.sqrt(count) * scale
    return I0 + tail, rerr + roundoff, tail, I, count


def nmc_at(shape, x0, alpha, quad: PVQuadrature | None = None) -> NMCResult:
    """Nonlocal mean curvature of ``shape`` at the boundary point ``x0``."""
    t_start = time.perf_counter()
    x0 = np.asarray(x0, float)
    if not 0 < alpha < 0.5:
        raise NMCError("alpha must lie in (0, 1/2)")
    if shape.sign(x0[None, :])[0] != 0:
        raise NMCError("x0 is not on the boundary; the principal value diverges")
    quad = quad or PVQuadrature.default(float(np.hypot(x0[0], x0[1])) or 1.0, getattr(shape, "lam", math.pi))
    val, rerr, tail, I, n1 = _pv_once(shape, x0, alpha, quad)
    val_c, _, _, _, n2 = _pv_once(shape, x0, alpha, quad.coarser())
    qerr = abs(val - val_c)
    if not np.isfinite(val) or rerr > max(1.0, 10 * abs(val)):
        raise NMCError(f"principal-value extrapolation diverged (estimate {val:.3e}, spread {rerr:.3e})")
    bound = 4 * math.pi * quad.rho_max ** (-2 * alpha) / (2 * alpha)
    return NMCResult(val, rerr + qerr + abs(tail), rerr, qerr, tail, bound, n1 + n2,
                     time.perf_counter() - t_start, I)


# ---------------------------------------------------------------------------
# Pairing estimator for the helicoid
# ---------------------------------------------------------------------------


def _sym_nodes(quad, x0):
    rho, wr = _log_nodes(quad.deltas[-1], quad.rho_max, quad.log_panel, quad.gauss_rho)
    ct, wt = np.polynomial.legendre.leggauss(quad.n_theta_sym)
    psi = (np.arange(quad.n_psi_sym) + 0.5) * TWO_PI / quad.n_psi_sym + 1e-3
    wp = TWO_PI / quad.n_psi_sym
    R, C, P = np.meshgrid(rho, ct, psi, indexing="ij")
    W = (wr[:, None, None] * wt[None, :, None] * wp) * R**3  # d x = rho^3 d(log rho) d w
    S = np.sqrt(1 - C**2)
    pts = np.column_stack([(x0[0] + R * S * np.cos(P)).ravel(), (x0[1] + R * S * np.sin(P)).ravel(),
                           (x0[2] + R * C).ravel()])
    return pts, W.ravel(), R.ravel()


def nmc_helicoid_symmetrized(t0, lam, alpha, quad: PVQuadrature | None = None, jitter: float = 0.0) -> NMCResult:
    """Pair every ``E_+`` node ``x`` with ``f(x) in E_-`` and sum ``K(x) - K(f(x))``.

    ``f`` is a rotation about the axis through ``x0 = (t0, 0, 0)``, so paired
    kernels agree bit for bit.  ``jitter`` perturbs the pitch used to decide
    membership of the images (a deliberate symmetry break for negative controls).
    """
    t_start = time.perf_counter()
    quad = quad or PVQuadrature.default(t0, lam)
    x0 = np.array([t0, 0.0, 0.0])
    pts, w, _ = _sym_nodes(quad, x0)
    plus = ScrewSurface(lam).sign(pts) == 1
    img = symmetry_map(pts[plus])
    minus_ok = ScrewSurface(lam * (1.0 + jitter)).sign(img) == -1

    def kern(p):
        d2 = (p[:, 0] - x0[0]) ** 2 + (p[:, 1] - x0[1]) ** 2 + (p[:, 2] - x0[2]) ** 2
        return d2 ** (-(3 + 2 * alpha) / 2)

    wp = w[plus]
    val = float(np.sum(wp * kern(pts[plus])) - np.sum(wp * minus_ok * kern(img)))
    return NMCResult(val, 0.0, 0.0, 0.0, 0.0, 4 * math.pi * quad.rho_max ** (-2 * alpha) / (2 * alpha),
                     int(pts.shape[0]), time.perf_counter() - t_start)
