r"""Modified Bessel functions and the extension profiles.

``bessel_I`` and ``bessel_Z`` (the Macdonald function, usually written
:math:`K_\nu`) are evaluated with

* the ascending power series for small arguments,
* the trapezoidal rule on :math:`K_\nu(y)=\int_0^\infty e^{-y\cosh t}\cosh(\nu t)\,dt`
  for intermediate arguments of ``Z`` (the ascending form of ``Z`` is a
  difference of two large series and loses digits past ``y ~ 2``),
* the large-argument asymptotic series, truncated at its smallest term, for
  ``y > y_switch``.

The profiles

.. math::
    \varphi_1(y) = y^\alpha I_\alpha(y), \qquad
    \varphi_2(y) = \frac{y^\alpha Z_\alpha(y)}{2^{\alpha-1}\Gamma(\alpha)}

solve :math:`\varphi'' + \frac{1-2\alpha}{y}\varphi' = \varphi` with
:math:`\varphi_2(0)=1`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Y_SWITCH = 25.0
Y_SERIES_Z = 2.0
Y_MIN = 1e-8
Y_MAX = 700.0


class SpecfunError(ArithmeticError):
    """Domain, overflow or convergence failure in a special function."""


def _check_order(alpha):
    if not 0.0 < alpha < 1.0:
        raise SpecfunError(f"alpha must lie in (0, 1), got {alpha}")


def _as_array(y):
    y = np.asarray(y, dtype=float)
    return y, y.ndim == 0


# ---------------------------------------------------------------------------
# series / asymptotic building blocks (any real order nu with nu+1 > 0 or
# non-integer nu)
# ---------------------------------------------------------------------------


def _i_ascending(nu: float, y: np.ndarray) -> np.ndarray:
    """sum_m (y/2)^(2m+nu) / (m! Gamma(m+nu+1))."""
    half = 0.5 * y
    q = half * half
    term = np.power(half, nu) / math.gamma(nu + 1.0)
    total = term.copy()
    for m in range(1, 400):
        term = term * q / (m * (m + nu))
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _asym_coeffs(nu: float, y: np.ndarray, sign: float):
    """Large-argument series sum_k sign^k a_k(nu) / y^k truncated at the smallest term."""
    mu = 4.0 * nu * nu
    total = np.ones_like(y)
    term = np.ones_like(y)
    prev = np.full_like(y, np.inf)
    active = np.ones(y.shape, dtype=bool)
    for k in range(1, 200):
        term = term * sign * (mu - (2 * k - 1) ** 2) / (k * 8.0 * y)
        mag = np.abs(term)
        active &= mag < prev
        total = np.where(active, total + term, total)
        prev = np.where(active, mag, prev)
        if not np.any(active & (mag > 1e-17 * np.abs(total))):
            break
    return total


def _k_trapezoid(nu: float, y: np.ndarray, h: float = 0.125) -> np.ndarray:
    # integrand decays like exp(-y cosh t); stop where it is below 1e-300 relative
    tmax = float(np.arccosh(max(1.0, 745.0 / max(float(np.min(y)), 1e-300)) + 1.0))
    t = np.arange(0.0, tmax + h, h)
    w = np.full(t.shape, h)
    w[0] = 0.5 * h
    ch = np.cosh(t)
    # factor out exp(-y) for range safety
    e = np.exp(-np.outer(y, ch - 1.0))
    return np.exp(-y) * (e * (np.cosh(nu * t) * w)).sum(axis=1)


def _bessel_i_any(nu: float, y: np.ndarray, y_switch: float) -> np.ndarray:
    out = np.empty_like(y)
    lo = y <= y_switch
    if np.any(lo):
        out[lo] = _i_ascending(nu, y[lo])
    hi = ~lo
    if np.any(hi):
        yy = y[hi]
        out[hi] = np.exp(yy) / np.sqrt(2.0 * math.pi * yy) * _asym_coeffs(nu, yy, -1.0)
    return out


def _bessel_k_any(nu: float, y: np.ndarray, y_switch: float) -> np.ndarray:
    nu = abs(nu)
    out = np.empty_like(y)
    small = y <= min(Y_SERIES_Z, y_switch)
    if np.any(small):
        ys = y[small]
        if abs(nu - round(nu)) < 1e-12:
            raise SpecfunError("integer order is not supported by the ascending form")
        out[small] = math.pi / (2.0 * math.sin(nu * math.pi)) * (
            _i_ascending(-nu, ys) - _i_ascending(nu, ys)
        )
    mid = (~small) & (y <= y_switch)
    if np.any(mid):
        out[mid] = _k_trapezoid(nu, y[mid])
    hi = y > y_switch
    if np.any(hi):
        yy = y[hi]
        out[hi] = np.sqrt(math.pi / (2.0 * yy)) * np.exp(-yy) * _asym_coeffs(nu, yy, 1.0)
    return out


# ---------------------------------------------------------------------------
# public Bessel functions
# ---------------------------------------------------------------------------


def bessel_I(alpha: float, y, y_switch: float = Y_SWITCH, y_max: float = Y_MAX):
    """Modified Bessel function of the first kind, order ``alpha`` in (0, 1)."""
    _check_order(alpha)
    y, scalar = _as_array(y)
    if np.any(y <= 0):
        raise SpecfunError("bessel_I requires y > 0")
    if np.any(y > y_max):
        raise SpecfunError(f"bessel_I overflows beyond y_max={y_max}")
    out = _bessel_i_any(alpha, y.ravel(), y_switch).reshape(y.shape)
    return float(out) if scalar else out


def bessel_Z(alpha: float, y, y_switch: float = Y_SWITCH):
    """Decaying modified Bessel function (Macdonald function) of order ``alpha``."""
    _check_order(alpha)
    y, scalar = _as_array(y)
    if np.any(y <= 0):
        raise SpecfunError("bessel_Z requires y > 0")
    out = _bessel_k_any(alpha, y.ravel(), y_switch).reshape(y.shape)
    return float(out) if scalar else out


def c_alpha(alpha: float) -> float:
    """Trace constant ``2^(1-2a) Gamma(1-a) / Gamma(a)``."""
    _check_order(alpha)
    return 2.0 ** (1.0 - 2.0 * alpha) * math.gamma(1.0 - alpha) / math.gamma(alpha)


def phi2_norm(alpha: float) -> float:
    """``lim_{y->0} y^a Z_a(y) = 2^(a-1) Gamma(a)``."""
    return 2.0 ** (alpha - 1.0) * math.gamma(alpha)


def _phi2_kappa(alpha: float) -> float:
    # phi2(y) = 1 - kappa y^(2a) + O(y^2)
    return (math.pi / (2.0 * math.sin(alpha * math.pi))) * 2.0 ** (-alpha) / (
        math.gamma(1.0 + alpha) * phi2_norm(alpha)
    )


# ---------------------------------------------------------------------------
# extension profiles
# ---------------------------------------------------------------------------


def phi2(alpha: float, y, y_switch: float = Y_SWITCH):
    """Decaying profile, ``phi2(0) = 1``."""
    _check_order(alpha)
    y, scalar = _as_array(y)
    if np.any(y < 0):
        raise SpecfunError("phi2 requires y >= 0")
    flat = y.ravel()
    out = np.empty_like(flat)
    tiny = flat < Y_MIN
    out[tiny] = 1.0 - _phi2_kappa(alpha) * flat[tiny] ** (2.0 * alpha)
    big = ~tiny
    if np.any(big):
        yb = flat[big]
        out[big] = yb**alpha * _bessel_k_any(alpha, yb, y_switch) / phi2_norm(alpha)
    out = out.reshape(y.shape)
    return float(out) if scalar else out


def dphi2(alpha: float, y, y_switch: float = Y_SWITCH):
    """``phi2'(y) = -y^a Z_{1-a}(y) / norm`` for ``y > 0``."""
    _check_order(alpha)
    y, scalar = _as_array(y)
    if np.any(y <= 0):
        raise SpecfunError("dphi2 requires y > 0")
    flat = y.ravel()
    out = -(flat**alpha) * _bessel_k_any(1.0 - alpha, flat, y_switch) / phi2_norm(alpha)
    out = out.reshape(y.shape)
    return float(out) if scalar else out


def phi1(alpha: float, y, y_switch: float = Y_SWITCH, y_max: float = Y_MAX):
    """Growing profile ``y^a I_a(y)``, ``phi1(0) = 0``."""
    _check_order(alpha)
    y, scalar = _as_array(y)
    if np.any(y < 0):
        raise SpecfunError("phi1 requires y >= 0")
    if np.any(y > y_max):
        raise SpecfunError(f"phi1 overflows beyond y_max={y_max}")
    flat = y.ravel()
    out = np.empty_like(flat)
    tiny = flat < Y_MIN
    out[tiny] = flat[tiny] ** (2.0 * alpha) / (2.0**alpha * math.gamma(1.0 + alpha))
    big = ~tiny
    if np.any(big):
        yb = flat[big]
        out[big] = yb**alpha * _bessel_i_any(alpha, yb, y_switch)
    out = out.reshape(y.shape)
    return float(out) if scalar else out


def dphi1(alpha: float, y, y_switch: float = Y_SWITCH):
    """``phi1'(y) = y^a I_{a-1}(y)``."""
    _check_order(alpha)
    y, scalar = _as_array(y)
    if np.any(y <= 0):
        raise SpecfunError("dphi1 requires y > 0")
    flat = y.ravel()
    out = flat**alpha * _bessel_i_any(alpha - 1.0, flat, y_switch)
    out = out.reshape(y.shape)
    return float(out) if scalar else out


@dataclass(frozen=True)
class ExtensionProfile:
    """One of the two radial profiles of the weighted extension ODE."""

    alpha: float
    kind: str = "decaying"

    def __post_init__(self):
        _check_order(self.alpha)
        if self.kind not in ("decaying", "growing"):
            raise ValueError("kind must be 'decaying' or 'growing'")

    @property
    def normalization(self) -> float:
        return phi2_norm(self.alpha) if self.kind == "decaying" else 1.0

    def __call__(self, y):
        return phi2(self.alpha, y) if self.kind == "decaying" else phi1(self.alpha, y)

    def derivative(self, y):
        return dphi2(self.alpha, y) if self.kind == "decaying" else dphi1(self.alpha, y)

    def trace_flux(self) -> float:
        """Exact ``-lim y^(1-2a) phi'(y)`` read off the small-y expansion.

        For the decaying profile ``phi2 = 1 - kappa y^(2a) + ...`` so the limit
        is ``2 a kappa``; the growing profile has flux ``-1/(2^a Gamma(a))``
        with this sign convention.
        """
        a = self.alpha
        if self.kind == "decaying":
            return 2.0 * a * _phi2_kappa(a)
        return -2.0 * a / (2.0**a * math.gamma(1.0 + a))


def neumann_trace(alpha: float, y0: float = 0.25, levels: int = 7, tol: float = 1e-9) -> float:
    """Extrapolate ``-lim_{y->0} y^(1-2a) phi2'(y)``.

    Samples ``g(y) = y^(1-a) Z_{1-a}(y) / norm`` at ``y0 2^-j`` and eliminates
    the known expansion exponents ``2-2a, 2, 4-2a, 4, ...`` (Richardson with
    non-integer exponents).
    """
    _check_order(alpha)
    ys = y0 * 0.5 ** np.arange(levels)
    g = ys ** (1.0 - alpha) * _bessel_k_any(1.0 - alpha, ys, Y_SWITCH) / phi2_norm(alpha)
    exps = []
    m = 0
    while len(exps) < levels - 1:
        exps.extend([2.0 * m + 2.0 - 2.0 * alpha, 2.0 * m + 2.0])
        m += 1
    exps = np.array(exps[: levels - 1])
    estimates = []
    for k in range(1, levels):
        # use the k+1 smallest samples with the first k exponents
        yy = ys[levels - k - 1:]
        A = np.column_stack([np.ones_like(yy)] + [yy**e for e in exps[:k]])
        coef = np.linalg.solve(A, g[levels - k - 1:])
        estimates.append(coef[0])
    diffs = np.abs(np.diff(estimates))
    if diffs[-1] > tol * max(1.0, abs(estimates[-1])):
        raise SpecfunError(
            f"Neumann trace extrapolation did not converge: estimates={estimates}"
        )
    return float(estimates[-1])


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

_D1 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0
_D2 = np.array([2.0, -27.0, 270.0, -490.0, 270.0, -27.0, 2.0]) / 180.0
_OFF = np.arange(-3, 4)


def _fd_derivatives(f, y, h):
    vals = np.stack([f(y + k * h) for k in _OFF])
    d1 = np.tensordot(_D1, vals, axes=1) / h
    d2 = np.tensordot(_D2, vals, axes=1) / (h * h)
    return vals[3], d1, d2


def _profile_callable(alpha, profile):
    if callable(profile):
        return profile
    if profile in ("phi2", "decaying"):
        return lambda t: phi2(alpha, t)
    if profile in ("phi1", "growing"):
        return lambda t: phi1(alpha, t)
    raise ValueError(f"unknown profile {profile!r}")


def ode_residual(alpha: float, y, profile="phi2", h: float | None = None):
    """``phi'' + (1-2a)/y phi' - phi`` by sixth-order central differences."""
    return rescaled_profile_residual(alpha, 1.0, y, profile=profile, h=h, weighted=False)


def rescaled_profile_residual(alpha: float, mu: float, y, profile="phi2", h=None, weighted=True):
    """Residual of ``d/dy (y^(1-2a) d/dy phi(mu y)) - y^(1-2a) mu^2 phi(mu y)``.

    ``profile`` is ``"phi1"``, ``"phi2"`` or any callable of one argument.
    With ``weighted=False`` the residual is divided by ``y^(1-2a)`` (the plain
    ODE form).
    """
    _check_order(alpha)
    if mu <= 0:
        raise ValueError("mu must be positive")
    y, scalar = _as_array(y)
    if np.any(y <= 0):
        raise ValueError("y must be positive")
    base = _profile_callable(alpha, profile)

    def f(t):
        return np.asarray(base(mu * t), dtype=float) * np.ones_like(t)

    if h is None:
        h = np.minimum(2e-3, y / 10.0)
    val, d1, d2 = _fd_derivatives(f, y, h)
    beta = 1.0 - 2.0 * alpha
    res = d2 + beta / y * d1 - mu * mu * val
    if weighted:
        res = y**beta * res
    return float(res) if scalar else res
