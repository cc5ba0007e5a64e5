"""Sets in R^3 given by exact sign functions, and the helicoid symmetry map.

Every shape exposes ``sign(points)`` (+1 inside ``E``, -1 in the complement,
0 on the boundary band) and ``ring_q(center, radius, z)``: for the horizontal
circle of the given centre and radius at height ``z`` the boundary is crossed
iff ``|q| < 1`` and the crossing azimuths are returned by ``ring_crossings``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

BOUNDARY_TOL = 1e-12


class RegionLabel(enum.Enum):
    PLUS = 1
    MINUS = -1
    BOUNDARY = 0


def _pts(p):
    return np.atleast_2d(np.asarray(p, dtype=float))


@dataclass(frozen=True)
class ScrewSurface:
    """Helicoid ``{(t cos th, t sin th, lam th / pi)}``; ``E`` is the ``Plus`` side."""

    lam: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")

    @property
    def length_scale(self) -> float:
        return self.lam / math.pi

    def phase(self, pts):
        """``g = (pi x3 / lam - atan2(x2, x1)) mod 2 pi``."""
        p = _pts(pts)
        return np.mod(math.pi * p[:, 2] / self.lam - np.arctan2(p[:, 1], p[:, 0]), 2 * math.pi)

    def sign(self, pts, tol=BOUNDARY_TOL):
        p = _pts(pts)
        g = self.phase(p)
        out = np.where(g < math.pi, 1.0, -1.0)
        band = (g < tol) | (np.abs(g - math.pi) < tol) | (2 * math.pi - g < tol)
        axis = (p[:, 0] == 0) & (p[:, 1] == 0)
        out[band | axis] = 0.0
        return out

    def ring_q(self, c, rad, z):
        ph = math.pi * z / self.lam
        with np.errstate(divide="ignore", invalid="ignore"):
            return (c[0] * np.sin(ph) - c[1] * np.cos(ph)) / rad

    def ring_crossings(self, c, rad, z):
        ph = math.pi * z / self.lam
        q = self.ring_q(c, rad, z)
        a = np.arcsin(np.clip(q, -1, 1))
        return np.stack([ph + a, ph + math.pi - a], axis=-1)

    def rho_breaks(self, x0):
        return []


@dataclass(frozen=True)
class Ball:
    center: tuple = (0.0, 0.0, 0.0)
    radius: float = 1.0
    complement: bool = False

    @property
    def length_scale(self) -> float:
        return self.radius

    def sign(self, pts, tol=BOUNDARY_TOL):
        d = np.linalg.norm(_pts(pts) - np.asarray(self.center), axis=1) - self.radius
        out = np.where(d < 0, 1.0, -1.0)
        out[np.abs(d) < tol * self.radius] = 0.0
        return -out if self.complement else out

    def _rel(self, c, z):
        a = c[0] - self.center[0]
        b = c[1] - self.center[1]
        return a, b, z - self.center[2]

    def ring_q(self, c, rad, z):
        a, b, h = self._rel(c, z)
        m = math.hypot(a, b)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (self.radius**2 - h**2 - m**2 - rad**2) / (2 * rad * m)

    def ring_crossings(self, c, rad, z):
        a, b, _ = self._rel(c, z)
        q = np.clip(self.ring_q(c, rad, z), -1, 1)
        base = math.atan2(b, a)
        d = np.arccos(q)
        return np.stack([base - d, base + d], axis=-1)

    def rho_breaks(self, x0):
        d = float(np.linalg.norm(np.asarray(x0, float) - np.asarray(self.center)))
        return [abs(d - self.radius), d + self.radius]


@dataclass(frozen=True)
class HalfSpace:
    """``{x3 < offset}``."""

    offset: float = 0.0

    @property
    def length_scale(self) -> float:
        return 1.0

    def sign(self, pts, tol=BOUNDARY_TOL):
        d = _pts(pts)[:, 2] - self.offset
        out = np.where(d < 0, 1.0, -1.0)
        out[np.abs(d) < tol] = 0.0
        return out

    def ring_q(self, c, rad, z):
        return np.full(np.shape(rad), np.inf)

    def ring_crossings(self, c, rad, z):
        return np.full(np.shape(rad) + (2,), np.nan)

    def rho_breaks(self, x0):
        return [abs(float(x0[2]) - self.offset)] if float(x0[2]) != self.offset else []


def classify(point, surface) -> RegionLabel:
    return RegionLabel(int(surface.sign(point)[0]))


def classify_many(points, surface) -> np.ndarray:
    return surface.sign(points).astype(int)


def symmetry_map(points) -> np.ndarray:
    """``(x1, x2, x3) -> (x1, -x2, -x3)``: rotation by pi about the x1 axis.

    In the helicoid parametrisation it sends ``(t e^{i th}, lam (th + z)/pi)``
    to ``(t e^{-i th}, -lam (th + z)/pi)``; it is an involution, preserves
    volume and distances to any point of the x1 axis, and swaps the two sides.
    """
    p = np.array(points, dtype=float, copy=True)
    single = p.ndim == 1
    p = np.atleast_2d(p)
    p[:, 1] = -p[:, 1]
    p[:, 2] = -p[:, 2]
    return p[0] if single else p


def screw_motion(points, lam, beta) -> np.ndarray:
    """Rotate by ``beta`` about the x3 axis and translate by ``lam beta / pi``."""
    p = _pts(points)
    c, s = math.cos(beta), math.sin(beta)
    return np.column_stack([c * p[:, 0] - s * p[:, 1], s * p[:, 0] + c * p[:, 1], p[:, 2] + lam * beta / math.pi])


def helicoid_point(lam, t, theta) -> np.ndarray:
    return np.array([t * math.cos(theta), t * math.sin(theta), lam * theta / math.pi])


def random_plus_points(surface: ScrewSurface, n, rng, box=3.0) -> np.ndarray:
    """Rejection-sample ``n`` points of ``E_+`` in ``[-box, box]^3``."""
    out = []
    got = 0
    while got < n:
        p = rng.uniform(-box, box, size=(2 * n, 3))
        p = p[surface.sign(p) == 1]
        out.append(p)
        got += len(p)
    return np.concatenate(out)[:n]
