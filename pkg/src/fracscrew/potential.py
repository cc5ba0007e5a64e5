"""Double-well potentials and the critical screw pitch."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

Fn = Callable[[np.ndarray], np.ndarray]

EVEN_TOL = 1e-10
DERIV_TOL = 1e-6


class PotentialError(ValueError):
    """Raised for malformed potentials or potential specs."""


@dataclass(frozen=True)
class DoubleWellPotential:
    """A potential ``F`` with its first two derivatives.

    ``params`` is informational (e.g. ``{"family": "quartic", "c": 0.25}``).
    ``gamma`` is the Hölder exponent of ``F''``; it is carried along as
    metadata only, no finite sampling can certify it.
    """

    eval_F: Fn
    eval_dF: Fn
    eval_ddF: Fn
    params: dict = field(default_factory=dict)
    gamma: float | None = None

    def F(self, t):
        return self.eval_F(np.asarray(t, dtype=float))

    def dF(self, t):
        return self.eval_dF(np.asarray(t, dtype=float))

    def ddF(self, t):
        return self.eval_ddF(np.asarray(t, dtype=float))

    @property
    def ddF0(self) -> float:
        return float(self.ddF(np.array(0.0)))

    @property
    def F0(self) -> float:
        return float(self.F(np.array(0.0)))


def quartic(c: float = 0.25) -> DoubleWellPotential:
    """``F(t) = c (1 - t^2)^2``; ``c = 1/4`` is the classical choice."""
    c = float(c)
    if c <= 0:
        raise PotentialError("quartic coefficient must be positive")
    return DoubleWellPotential(
        eval_F=lambda t: c * (1.0 - t * t) ** 2,
        eval_dF=lambda t: -4.0 * c * t * (1.0 - t * t),
        eval_ddF=lambda t: c * (12.0 * t * t - 4.0),
        params={"family": "quartic", "c": c},
        gamma=1.0,
    )


def from_callables(F: Fn, dF: Fn, ddF: Fn, **params) -> DoubleWellPotential:
    return DoubleWellPotential(F, dF, ddF, params=dict(params))


def from_table(path: str) -> DoubleWellPotential:
    """Tabulated potential from a CSV with columns ``t,F,dF,ddF``.

    Values between samples use the C2 quintic Hermite interpolant matching all
    three columns; ``dF`` and ``ddF`` are its exact derivatives, so the three
    callables stay mutually consistent.
    """
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    try:
        t = np.array([float(r["t"]) for r in rows])
        F = np.array([float(r["F"]) for r in rows])
        dF = np.array([float(r["dF"]) for r in rows])
        ddF = np.array([float(r["ddF"]) for r in rows])
    except (KeyError, ValueError) as exc:
        raise PotentialError(f"bad potential table {path!r}: {exc}") from exc
    order = np.argsort(t)
    t, F, dF, ddF = t[order], F[order], dF[order], ddF[order]
    from scipy.interpolate import BPoly

    spline = BPoly.from_derivatives(t, np.column_stack([F, dF, ddF]))
    d1, d2 = spline.derivative(1), spline.derivative(2)
    return DoubleWellPotential(
        eval_F=lambda x: spline(x),
        eval_dF=lambda x: d1(x),
        eval_ddF=lambda x: d2(x),
        params={"family": "table", "file": path},
    )


def parse_spec(spec: str) -> DoubleWellPotential:
    """Parse ``family=quartic c=0.25`` or ``family=table file=<path>``."""
    kv = {}
    for tok in spec.replace(",", " ").split():
        if "=" not in tok:
            raise PotentialError(f"expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        kv[k.strip()] = v.strip()
    family = kv.get("family", "quartic")
    if family == "quartic":
        return quartic(float(kv.get("c", 0.25)))
    if family == "table":
        if "file" not in kv:
            raise PotentialError("table potential needs file=<path>")
        return from_table(kv["file"])
    raise PotentialError(f"unknown potential family {family!r}")


def validate(potential: DoubleWellPotential, t_grid: Sequence[float]) -> list[str]:
    """Check the double-well hypotheses on a symmetric sample grid.

    Returns the list of violated predicates; empty means valid.
    """
    t = np.asarray(t_grid, dtype=float)
    if not np.allclose(np.sort(t), np.sort(-t), atol=1e-12):
        raise PotentialError("t_grid must be symmetric about 0")
    if not (np.any(np.isclose(t, 1.0)) and np.any(np.isclose(t, -1.0))):
        raise PotentialError("t_grid must contain +-1")
    F, dF, ddF = potential.F(t), potential.dF(t), potential.ddF(t)
    if not (np.all(np.isfinite(F)) and np.all(np.isfinite(dF)) and np.all(np.isfinite(ddF))):
        raise PotentialError("potential returned non-finite values")

    report = []
    scale = max(1.0, float(np.max(np.abs(F))))
    if np.max(np.abs(F - potential.F(-t))) > EVEN_TOL * scale:
        report.append("evenness violated")

    F1 = float(potential.F(np.array(1.0)))
    away = np.abs(np.abs(t) - 1.0) > 1e-6
    if np.any(F < F1 - EVEN_TOL * scale) or np.any(F[away] <= F1 + EVEN_TOL * scale):
        report.append("minimum only at +-1 violated")

    d0 = potential.ddF0
    if not d0 < 0:
        report.append("F''(0)<0 violated")
    pos = t >= 0
    if np.any(d0 * t[pos] > dF[pos] + EVEN_TOL * scale):
        report.append("F''(0) t <= F'(t) violated")

    if not _derivatives_consistent(potential.F, potential.dF, t) or not _derivatives_consistent(
        potential.dF, potential.ddF, t
    ):
        report.append("derivative consistency violated")
    return report


def _derivatives_consistent(f: Fn, df: Fn, t: np.ndarray) -> bool:
    # central differences at two steps: the error must shrink ~4x (second order)
    # unless it is already at rounding level
    errs = []
    for h in (1e-3, 5e-4):
        fd = (f(t + h) - f(t - h)) / (2 * h)
        errs.append(float(np.max(np.abs(fd - df(t)))))
    scale = max(1.0, float(np.max(np.abs(df(t)))))
    if errs[1] <= DERIV_TOL * scale:
        return True
    return errs[1] < 0.3 * errs[0]


def lambda_star(potential: DoubleWellPotential, alpha: float) -> float:
    """Critical pitch ``pi / (-F''(0))^(1/(2 alpha))``."""
    if not 0.0 < alpha < 1.0:
        raise PotentialError("alpha must lie in (0, 1)")
    d0 = potential.ddF0
    if d0 >= 0:
        raise PotentialError("not a double well at 0: F''(0) >= 0")
    return math.pi / (-d0) ** (1.0 / (2.0 * alpha))
