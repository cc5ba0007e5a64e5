"""Screw-invariant reduced problem on the half-strip ``[0, lam] x [0, L]``.

The field is continuous piecewise bilinear on a tensor grid; the energy

    E0(V) = 1/(2 c_a) int y^(1-2a) |grad V|^2 + int_0^lam F(V(s, 0)) ds

is integrated exactly for the Dirichlet part and with the trapezoid rule for
the trace part.  Minimisation runs over the trace only: for fixed trace the
interior is harmonic for the discrete weighted Laplacian, and the minimal
Dirichlet energy is diagonal in the discrete sine modes of ``s``.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import dst

from . import kernels, specfun
from .grids import StripGrid
from .optim import DescentResult, NonConvergenceError, projected_newton
from .potential import DoubleWellPotential, lambda_star

log = logging.getLogger(__name__)

SUP_TRIVIAL = 1e-3


class StripError(ValueError):
    pass


@dataclass(frozen=True)
class StripField:
    grid: StripGrid
    values: np.ndarray  # (ns+1, ny+1), rows s, columns y

    def __post_init__(self):
        v = np.asarray(self.values, float)
        if v.shape != (self.grid.ns + 1, self.grid.ny + 1):
            raise StripError(f"field shape {v.shape} does not match grid")
        object.__setattr__(self, "values", v)

    @property
    def trace(self) -> np.ndarray:
        return self.values[:, 0]

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))

    def check_boundary(self, tol=0.0) -> None:
        v = self.values
        if not np.all(np.isfinite(v)):
            raise StripError("field contains NaN or inf")
        edge = max(np.max(np.abs(v[0])), np.max(np.abs(v[-1])), np.max(np.abs(v[:, -1])))
        if edge > tol:
            raise StripError(f"field violates the Dirichlet conditions (max {edge:.3e})")

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((grid.ns + 1, grid.ny + 1)))


def principal_direction(grid: StripGrid) -> StripField:
    """``w = sin(pi s / lam) phi2(pi y / lam)`` sampled on the grid, cut to 0 at ``y = L``."""
    prof = specfun.phi2(grid.alpha, math.pi * grid.y / grid.lam)
    prof[-1] = 0.0
    sn = np.sin(math.pi * np.arange(grid.ns + 1) / grid.ns)
    sn[0] = sn[-1] = 0.0
    return StripField(grid, np.outer(sn, prof))


# ---------------------------------------------------------------------------
# Energy on full fields
# ---------------------------------------------------------------------------


def _apply(x, mats, axis):
    d, o = mats
    return kernels.tri_axis(x[:, :, None], d, o, axis)[:, :, 0]


def dirichlet_form(grid: StripGrid, V: np.ndarray) -> np.ndarray:
    """``(Ks x My + Ms x Ky) V``, the action of the weighted stiffness."""
    ksd, kso, msd, mso = grid.smats
    kyd, kyo, myd, myo = grid.ymats
    A = _apply(_apply(V, (ksd, kso), 0), (myd, myo), 1)
    B = _apply(_apply(V, (msd, mso), 0), (kyd, kyo), 1)
    return A + B


def dirichlet_energy(grid: StripGrid, V: np.ndarray) -> float:
    """``int y^(1-2a) |grad V|^2`` of the bilinear interpolant."""
    return float(np.sum(V * dirichlet_form(grid, V)))


def energy_E0(f: StripField, potential: DoubleWellPotential, alpha: float | None = None) -> float:
    grid = f.grid
    if alpha is not None and not math.isclose(alpha, grid.alpha):
        raise StripError("alpha does not match the grid")
    if not np.all(np.isfinite(f.values)):
        raise StripError("field contains NaN or inf")
    c = specfun.c_alpha(grid.alpha)
    trace = float(np.sum(grid.trace_weights * potential.F(f.trace)))
    return dirichlet_energy(grid, f.values) / (2.0 * c) + trace


# ---------------------------------------------------------------------------
# Trace reduction
# ---------------------------------------------------------------------------


@dataclass
class TraceOperator:
    """Discrete Dirichlet-to-Neumann map of the strip in sine modes."""

    grid: StripGrid
    g: np.ndarray = field(init=False)
    prof: np.ndarray = field(init=False)
    sym: np.ndarray = field(init=False)

    def __post_init__(self):
        _, sigma, nu = self.grid.modes
        kd, ko, md, mo = self.grid.ymats
        self.g, self.prof = kernels.dtn_profiles(nu, kd, ko, md, mo)
        # d(D/2c)/du in mode space: (sigma g / c) u_hat
        self.sym = sigma * self.g / specfun.c_alpha(self.grid.alpha)

    def apply(self, u):
        """Gradient of ``D_min / (2 c)`` at interior trace values ``u``."""
        return dst(self.sym * dst(u, type=1, norm="ortho"), type=1, norm="ortho")

    def energy(self, u) -> float:
        uh = dst(u, type=1, norm="ortho")
        return 0.5 * float(np.sum(self.sym * uh * uh))

    def extend(self, u) -> np.ndarray:
        uh = dst(u, type=1, norm="ortho")
        inner = dst(uh[:, None] * self.prof, type=1, norm="ortho", axis=0)
        V = np.zeros((self.grid.ns + 1, self.grid.ny + 1))
        V[1:-1] = inner
        V[1:-1, 0] = u
        return V

    @property
    def principal_eigenvalue(self) -> float:
        """Smallest eigenvalue of the discrete operator relative to the lumped trace mass."""
        return float(self.sym[0] / self.grid.h)


def discrete_principal_eigenvalue(grid: StripGrid) -> float:
    return TraceOperator(grid).principal_eigenvalue


@dataclass
class StripSolution:
    field: StripField
    energy: float
    residual: float  # trace Euler-Lagrange residual, sup norm, per unit length
    interior_residual: float
    iterations: int
    history: list

    @property
    def sup(self) -> float:
        return self.field.sup


def _interior_residual(grid, V):
    R = dirichlet_form(grid, V)[1:-1, 1:-1]
    mass = np.outer(grid.trace_weights[1:-1], _lumped_y(grid)[1:-1])
    scale = max(1.0, float(np.max(np.abs(V))))
    return float(np.max(np.abs(R / mass))) / scale if R.size else 0.0


def _lumped_y(grid):
    from .grids import lumped

    return lumped(grid.y, grid.beta)


def minimize_strip(
    grid: StripGrid,
    potential: DoubleWellPotential,
    alpha: float | None = None,
    init: StripField | None = None,
    tol_residual: float = 1e-8,
    rtol_energy: float = 1e-12,
    max_iter: int = 200,
    op: TraceOperator | None = None,
) -> StripSolution:
    """Minimise ``E0`` over fields with values in ``[-1, 1]``.

    Default initialisation is ``0.1 w`` with ``w`` the principal test
    direction, since ``0`` is always critical.
    """
    if alpha is not None and not math.isclose(alpha, grid.alpha):
        raise StripError("alpha does not match the grid")
    if init is None:
        init = principal_direction(grid)
        init = StripField(grid, 0.1 * init.values)
    init.check_boundary(tol=1e-12)
    op = op or TraceOperator(grid)
    h = grid.h
    wts = grid.trace_weights[1:-1]
    F0 = potential.F0

    def energy(u):
        return op.energy(u) + float(np.sum(wts * potential.F(u))) + F0 * (grid.trace_weights[0] + grid.trace_weights[-1])

    def gradient(u):
        return op.apply(u) + wts * potential.dF(u)

    def hessp_at(u):
        d2 = wts * potential.ddF(u)
        return lambda p: op.apply(p) + d2 * p

    def precond_at(u):
        shift = h * max(abs(float(np.mean(potential.ddF(u)))), 1e-3)
        inv = 1.0 / (op.sym + shift)
        return lambda r: dst(inv * dst(r, type=1, norm="ortho"), type=1, norm="ortho")

    def residual(u, g):
        gp = np.where(((u <= -1) & (g > 0)) | ((u >= 1) & (g < 0)), 0.0, g)
        return float(np.max(np.abs(gp / wts)))

    res: DescentResult = projected_newton(
        energy, gradient, hessp_at, precond_at, residual, init.trace[1:-1], -1.0, 1.0,
        tol_residual=tol_residual, rtol_energy=rtol_energy, max_iter=max_iter,
    )
    V = op.extend(res.x)
    f = StripField(grid, V)
    return StripSolution(f, res.energy, res.residual, _interior_residual(grid, V), res.iterations, res.history)


# ---------------------------------------------------------------------------
# Threshold scan
# ---------------------------------------------------------------------------


@dataclass
class ScanRow:
    lam: float
    sup: float
    energy: float
    trivial_energy: float
    residual: float


@dataclass
class ScanResult:
    rows: list
    crossing: float | None
    bracket: tuple | None
    lambda_star: float


def _solve_at(lam, potential, alpha, ns, ny, height_factor):
    grid = StripGrid.default(lam, alpha, ns=ns, ny=ny, L=height_factor * lam / math.pi)
    sol = minimize_strip(grid, potential)
    return ScanRow(lam, sol.sup, sol.energy, lam * potential.F0, sol.residual)


def threshold_scan(
    potential: DoubleWellPotential,
    alpha: float,
    lambda_list,
    ns: int = 128,
    ny: int = 128,
    height_factor: float = 12.0,
    sup_tol: float = SUP_TRIVIAL,
    bisect_tol: float = 1e-4,
    max_bisect: int = 40,
) -> ScanResult:
    """Minimise at each ``lam`` and bisect the first trivial/nontrivial transition."""
    lams = sorted(float(x) for x in lambda_list)
    if not lams or lams[0] <= 0:
        raise StripError("lambda values must be positive")
    rows = [_solve_at(l, potential, alpha, ns, ny, height_factor) for l in lams]
    lo = hi = None
    for a, b in zip(rows, rows[1:]):
        if a.sup < sup_tol <= b.sup:
            lo, hi = a.lam, b.lam
            break
    crossing = None
    if lo is not None:
        bracket = (lo, hi)
        for _ in range(max_bisect):
            if hi - lo <= bisect_tol * hi:
                break
            mid = 0.5 * (lo + hi)
            if _solve_at(mid, potential, alpha, ns, ny, height_factor).sup < sup_tol:
                lo = mid
            else:
                hi = mid
        crossing = 0.5 * (lo + hi)
    else:
        bracket = None
    return ScanResult(rows, crossing, bracket, lambda_star(potential, alpha))


# ---------------------------------------------------------------------------
# Quadratic expansion and the nonexistence identity
# ---------------------------------------------------------------------------


@dataclass
class ExpansionFit:
    slope: float
    quartic: float
    reference: float
    rel_error: float
    fit_residual: float


def expansion_reference(potential, alpha, lam) -> float:
    return lam / 4.0 * ((math.pi / lam) ** (2 * alpha) + potential.ddF0)


def quadratic_expansion_check(
    potential, alpha, lam, eps_list=(0.02, 0.01, 0.005), grid: StripGrid | None = None
) -> ExpansionFit:
    """Least-squares fit of ``E0(eps w) - lam F(0) = a eps^2 + b eps^4``."""
    grid = grid or StripGrid.default(lam, alpha)
    w = principal_direction(grid)
    eps = np.asarray(eps_list, float)
    base = lam * potential.F0
    dE = np.array([energy_E0(StripField(grid, e * w.values), potential) - base for e in eps])
    A = np.column_stack([eps**2, eps**4]) if len(eps) > 2 else eps[:, None] ** 2
    coef, *_ = np.linalg.lstsq(A, dE, rcond=None)
    fitted = A @ coef
    resid = float(np.max(np.abs(fitted - dE)) / max(np.max(np.abs(dE)), 1e-300))
    if resid > 1e-3:
        warnings.warn(f"quadratic fit residual {resid:.2e} is large", RuntimeWarning, stacklevel=2)
    ref = expansion_reference(potential, alpha, lam)
    slope = float(coef[0])
    rel = abs(slope - ref) / abs(ref) if ref != 0 else abs(slope)
    return ExpansionFit(slope, float(coef[1]) if len(coef) > 1 else 0.0, ref, rel, resid)


@dataclass
class IdentityValue:
    value: float  # with the discrete principal eigenvalue
    value_continuum: float  # with (pi/lam)^(2a)
    kappa_discrete: float
    kappa_continuum: float


def nonexistence_identity(f: StripField, potential, alpha=None, lam=None) -> IdentityValue:
    """``int_0^lam w(s,0) (F'(v) + kappa v(s,0)) ds`` by the trapezoid rule.

    For a solution of the discrete Euler-Lagrange system the value equals
    ``sum h w_i r_i`` with ``r`` the nodal residual, so it vanishes with the
    residual when ``kappa`` is the discrete principal eigenvalue.
    """
    grid = f.grid
    lam = grid.lam if lam is None else lam
    alpha = grid.alpha if alpha is None else alpha
    u = f.trace
    w = np.sin(math.pi * grid.s / lam)
    w[0] = w[-1] = 0.0
    wt = grid.trace_weights
    kh = discrete_principal_eigenvalue(grid)
    kc = (math.pi / lam) ** (2 * alpha)
    base = wt * w * potential.dF(u)
    return IdentityValue(
        float(np.sum(base + wt * w * kh * u)),
        float(np.sum(base + wt * w * kc * u)),
        kh,
        kc,
    )


__all__ = [
    "StripField", "StripGrid", "StripSolution", "TraceOperator", "energy_E0", "dirichlet_energy",
    "minimize_strip", "threshold_scan", "quadratic_expansion_check", "nonexistence_identity",
    "discrete_principal_eigenvalue", "principal_direction", "NonConvergenceError",
]
