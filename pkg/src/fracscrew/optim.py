"""Projected descent with backtracking for box-constrained energies."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

log = logging.getLogger(__name__)


class NonConvergenceError(RuntimeError):
    """Minimisation stopped before meeting its tolerances.

    ``x`` is the last iterate and ``residual`` its stationarity residual.
    """

    def __init__(self, msg, x=None, residual=None, history=None):
        super().__init__(msg)
        self.x = x
        self.residual = residual
        self.history = history or []


@dataclass
class DescentResult:
    x: np.ndarray
    energy: float
    residual: float
    iterations: int
    history: list = field(default_factory=list)


def _pcg(hessp, precond, b, free, maxiter=250, rtol=1e-10):
    """Truncated preconditioned CG on the free variables; stops at negative curvature."""
    x = np.zeros_like(b)
    r = np.where(free, b, 0.0)
    z = np.where(free, precond(r), 0.0)
    p = z.copy()
    rz = float(np.vdot(r, z))
    bnorm = np.linalg.norm(r)
    if bnorm == 0:
        return x, False
    for it in range(maxiter):
        Hp = np.where(free, hessp(p), 0.0)
        curv = float(np.vdot(p, Hp))
        if curv <= 1e-14 * float(np.vdot(p, p)):
            return (x if it > 0 else z), True
        a = rz / curv
        x += a * p
        r -= a * Hp
        if np.linalg.norm(r) <= rtol * bnorm:
            break
        z = np.where(free, precond(r), 0.0)
        rz_new = float(np.vdot(r, z))
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, False


def projected_newton(
    energy: Callable[[np.ndarray], float],
    gradient: Callable[[np.ndarray], np.ndarray],
    hessp_at: Callable[[np.ndarray], Callable[[np.ndarray], np.ndarray]],
    precond_at: Callable[[np.ndarray], Callable[[np.ndarray], np.ndarray]],
    residual: Callable[[np.ndarray, np.ndarray], float],
    x0: np.ndarray,
    lower: float,
    upper: float,
    tol_residual: float = 1e-8,
    rtol_energy: float = 1e-12,
    max_iter: int = 200,
) -> DescentResult:
    """Minimise ``energy`` over the box ``[lower, upper]``.

    Each step solves the Newton system on the free variables by truncated
    preconditioned CG (falling back to the preconditioned gradient at negative
    curvature), projects onto the box and backtracks until Armijo holds, so the
    energy never increases.  Stops when the relative energy decrease is below
    ``rtol_energy`` and the residual is below ``tol_residual``.
    """
    x = np.clip(np.array(x0, dtype=float), lower, upper)
    E = energy(x)
    history = [E]
    res = np.inf
    for it in range(max_iter):
        g = gradient(x)
        res = residual(x, g)
        free = ~(((x <= lower) & (g > 0)) | ((x >= upper) & (g < 0)))
        H = hessp_at(x)
        P = precond_at(x)
        d, negcurv = _pcg(H, P, -g, free)
        accepted = False
        for direction in (d, np.where(free, P(-np.where(free, g, 0.0)), 0.0)):
            t = 1.0
            for _ in range(50):
                xn = np.clip(x + t * direction, lower, upper)
                En = energy(xn)
                if En <= E + 1e-4 * float(np.vdot(g, xn - x)):
                    accepted = True
                    break
                t *= 0.5
            if accepted:
                break
        if not accepted:
            if res <= tol_residual:
                break
            raise NonConvergenceError(
                f"line search failed at iteration {it} with residual {res:.3e}", x, res, history
            )
        dec = E - En
        x, E = xn, En
        history.append(E)
        log.debug("iter %d  E=%.15g  dec=%.3e  res=%.3e  negcurv=%s", it, E, dec, res, negcurv)
        if dec <= rtol_energy * max(abs(E), 1e-300):
            g = gradient(x)
            res = residual(x, g)
            if res <= tol_residual:
                return DescentResult(x, E, res, it + 1, history)
    else:
        g = gradient(x)
        res = residual(x, g)
        if res > tol_residual:
            raise NonConvergenceError(
                f"no convergence within {max_iter} iterations (residual {res:.3e})", x, res, history
            )
    g = gradient(x)
    res = residual(x, g)
    return DescentResult(x, E, res, len(history) - 1, history)
