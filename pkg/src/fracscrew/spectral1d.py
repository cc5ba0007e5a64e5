"""Spectral fractional Laplacian with zero Dirichlet data on ``[0, lam]``.

Eigenfunctions are ``zeta_k(s) = sqrt(2/lam) sin(k pi s / lam)`` with
eigenvalues ``mu_k = (k pi / lam)^2``; coefficients are taken against this
L2-orthonormal basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import dst

from . import specfun

ENDPOINT_TOL = 1e-12


class ExpansionError(ValueError):
    pass


@dataclass(frozen=True)
class SineExpansion:
    lam: float
    coeffs: np.ndarray

    @property
    def K(self) -> int:
        return len(self.coeffs)

    @property
    def k(self) -> np.ndarray:
        return np.arange(1, self.K + 1)

    @property
    def eigenvalues(self) -> np.ndarray:
        return (self.k * math.pi / self.lam) ** 2

    def basis(self, s) -> np.ndarray:
        """``zeta_k(s)`` with shape ``(len(s), K)``."""
        s = np.atleast_1d(np.asarray(s, float))
        return math.sqrt(2.0 / self.lam) * np.sin(np.outer(s, self.k) * math.pi / self.lam)

    def __add__(self, other):
        _same_interval(self, other)
        n = max(self.K, other.K)
        a = np.zeros(n)
        a[: self.K] += self.coeffs
        a[: other.K] += other.coeffs
        return SineExpansion(self.lam, a)

    def scale(self, c: float) -> "SineExpansion":
        return SineExpansion(self.lam, c * self.coeffs)

    def norm2(self) -> float:
        return float(np.sum(self.coeffs**2))


def _same_interval(a, b):
    if not math.isclose(a.lam, b.lam):
        raise ExpansionError("expansions live on different intervals")


def analyze(samples, lam: float, K: int | None = None) -> SineExpansion:
    """Sine coefficients of samples on the uniform grid ``s_i = i lam / N``, i = 0..N.

    The default truncation keeps the full discrete basis, ``K = N - 1``.
    """
    u = np.asarray(samples, dtype=float)
    N = u.shape[0] - 1
    if N < 2:
        raise ExpansionError("need at least 3 samples")
    scale = max(1.0, float(np.max(np.abs(u))))
    if abs(u[0]) > ENDPOINT_TOL * scale or abs(u[-1]) > ENDPOINT_TOL * scale:
        raise ExpansionError("samples must vanish at s = 0 and s = lam")
    h = lam / N
    # DST-I: y_k = 2 sum_i u_i sin(pi k i / N)
    a = 0.5 * dst(u[1:-1], type=1) * h * math.sqrt(2.0 / lam)
    if K is not None:
        a = a[:K]
    return SineExpansion(float(lam), a)


def synthesize(expansion: SineExpansion, s) -> np.ndarray:
    return expansion.basis(s) @ expansion.coeffs


def frac_laplacian(expansion: SineExpansion, alpha: float) -> SineExpansion:
    """Multiply each coefficient by ``mu_k^alpha``."""
    return SineExpansion(expansion.lam, expansion.coeffs * expansion.eigenvalues**alpha)


def extend(expansion: SineExpansion, alpha: float, y, s) -> np.ndarray:
    """Extension ``sum_k a_k zeta_k(s) phi2(sqrt(mu_k) y)`` on the grid ``s x y``.

    Returns shape ``(len(s), len(y))``.
    """
    y = np.atleast_1d(np.asarray(y, float))
    if np.any(y < 0):
        raise ExpansionError("heights must be nonnegative")
    root = np.sqrt(expansion.eigenvalues)
    prof = specfun.phi2(alpha, np.outer(root, y))  # (K, ny)
    return expansion.basis(s) @ (expansion.coeffs[:, None] * prof)


def neumann_derivative(expansion: SineExpansion, alpha: float) -> SineExpansion:
    """``-(1/c_a) lim y^(1-2a) d/dy`` of the extension, mode by mode.

    Uses the flux of the decaying profile, ``y^(1-2a) d/dy phi2(sqrt(mu) y)
    = mu^a (t^(1-2a) phi2'(t))|_{t = sqrt(mu) y}``.
    """
    flux = specfun.ExtensionProfile(alpha, "decaying").trace_flux()
    factor = flux / specfun.c_alpha(alpha)
    return SineExpansion(expansion.lam, expansion.coeffs * factor * np.sqrt(expansion.eigenvalues) ** (2 * alpha))
