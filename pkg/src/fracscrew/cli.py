"""Command-line entry point: ``fracscrew <subcommand> [options]``.

Exit status: 0 on success, 1 on invalid input or a failed validation, 2 when a
numerical method does not converge.  Every run writes one manifest next to its
output (``<out>.manifest.json``) or to stderr when no output file is given.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__

FLOAT_FMT = ".17g"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, FLOAT_FMT)


def to_json(obj, indent=2, _level=0) -> str:
    """JSON with every float printed to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        return "[" + ", ".join(to_json(v, indent, _level + 1) for v in seq) + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return fmt(x) if math.isfinite(x) else json.dumps(fmt(x))
    return json.dumps(str(obj))


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(fmt(v) for v in r) + "\n")
    return buf.getvalue()


@dataclass
class RunManifest:
    subcommand: str
    parameters: dict
    tolerances: dict = field(default_factory=dict)
    wall_time: float = 0.0
    version: str = __version__
    backend: str = ""
    outputs: dict = field(default_factory=dict)  # path -> sha256

    def write(self, out_path: str | None):
        text = to_json(asdict(self)) + "\n"
        if out_path:
            with open(out_path + ".manifest.json", "w") as fh:
                fh.write(text)
        else:
            sys.stderr.write(text)


def _emit(text: str, out: str | None, manifest: RunManifest):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
        manifest.outputs[out] = hashlib.sha256(text.encode()).hexdigest()
    else:
        sys.stdout.write(text)
        manifest.outputs["<stdout>"] = hashlib.sha256(text.encode()).hexdigest()


def _floats(s: str):
    return [float(x) for x in str(s).replace(";", ",").split(",") if x.strip()]


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_validate(a, m):
    from .potential import lambda_star, parse_spec, validate

    pot = parse_spec(a.potential)
    t = np.linspace(-a.t_max, a.t_max, 2 * a.t_points + 1)
    t = np.unique(np.concatenate([t, [-1.0, 1.0]]))
    report = validate(pot, t)
    out = {"potential": a.potential, "violations": report, "valid": not report, "F''(0)": pot.ddF0}
    if not report:
        out["lambda_star"] = lambda_star(pot, a.alpha)
    _emit(to_json(out) + "\n", a.out, m)
    return 0 if not report else 1


def cmd_specfun(a, m):
    from . import specfun

    if a.ymax is not None:
        if not (a.step > 0 and a.ymax >= a.step):
            raise ValueError("need 0 < step <= ymax")
        n = int(math.floor(a.ymax / a.step + 1e-9))
        y = a.step * np.arange(1, n + 1)
        rows = zip(y, specfun.phi1(a.alpha, y), specfun.phi2(a.alpha, y), specfun.ode_residual(a.alpha, y))
        _emit(csv_text(["y", "phi1", "phi2", "residual"], rows), a.out, m)
        m.parameters["c_alpha"] = specfun.c_alpha(a.alpha)
        return 0
    y = np.asarray(_floats(a.y))
    funcs = {
        "phi2": lambda: specfun.phi2(a.alpha, y),
        "dphi2": lambda: specfun.dphi2(a.alpha, y),
        "phi1": lambda: specfun.phi1(a.alpha, y),
        "dphi1": lambda: specfun.dphi1(a.alpha, y),
        "I": lambda: specfun.bessel_I(a.alpha, y),
        "Z": lambda: specfun.bessel_Z(a.alpha, y),
        "ode_residual": lambda: specfun.ode_residual(a.alpha, y),
    }
    if a.what not in funcs:
        raise ValueError(f"unknown function {a.what!r}; choose from {sorted(funcs)}")
    vals = funcs[a.what]()
    _emit(csv_text(["y", a.what], zip(y, vals)), a.out, m)
    m.parameters["c_alpha"] = specfun.c_alpha(a.alpha)
    return 0


def cmd_extend1d(a, m):
    from .spectral1d import SineExpansion, extend

    coeffs = np.loadtxt(a.modes, delimiter=",", ndmin=1, comments="#") if a.modes else np.array([1.0])
    if coeffs.ndim > 1:
        coeffs = coeffs[:, -1]
    exp_ = SineExpansion(a.lam, np.asarray(coeffs, float))
    s = np.linspace(0.0, a.lam, a.ns + 1)
    y = np.asarray(_floats(a.heights))
    V = extend(exp_, a.alpha, y, s)
    rows = [(si, yj, V[i, j]) for j, yj in enumerate(y) for i, si in enumerate(s)]
    _emit(csv_text(["s", "y", "v"], rows), a.out, m)
    return 0


def _grid_1d(a):
    from .grids import StripGrid

    L = a.height if a.height else 12.0 * a.lam / math.pi
    return StripGrid(a.lam, a.ns, a.ny, L, a.alpha)


def cmd_minimize1d(a, m):
    from .potential import parse_spec
    from .strip1d import minimize_strip, nonexistence_identity

    pot = parse_spec(a.potential)
    g = _grid_1d(a)
    sol = minimize_strip(g, pot, tol_residual=a.tol, max_iter=a.max_iter)
    ident = nonexistence_identity(sol.field, pot)
    rows = [(g.s[i], g.y[j], sol.field.values[i, j]) for j in range(g.ny + 1) for i in range(g.ns + 1)]
    _emit(csv_text(["s", "y", "V"], rows), a.out, m)
    m.parameters.update(grid={"ns": g.ns, "ny": g.ny, "L": g.L})
    m.tolerances.update(residual=a.tol, max_iter=a.max_iter)
    m.parameters["result"] = {
        "energy": sol.energy, "trivial_energy": a.lam * pot.F0, "sup": sol.sup, "residual": sol.residual,
        "interior_residual": sol.interior_residual, "iterations": sol.iterations, "identity": ident.value,
        "identity_continuum": ident.value_continuum,
    }
    return 0


def cmd_threshold(a, m):
    from .potential import parse_spec
    from .strip1d import threshold_scan

    pot = parse_spec(a.potential)
    lams = np.linspace(a.lambda_min, a.lambda_max, a.steps)
    res = threshold_scan(pot, a.alpha, lams, ns=a.ns, ny=a.ny)
    rows = [(r.lam, r.sup, r.energy, r.trivial_energy) for r in res.rows]
    _emit(csv_text(["lambda", "sup", "E0", "lambda_F0"], rows), a.out, m)
    m.parameters["result"] = {"crossing": res.crossing, "bracket": res.bracket, "lambda_star": res.lambda_star}
    return 0


def cmd_minimize3d(a, m):
    from .grids import CylGrid
    from .helicoid3d import decay_rate, minimize_cyl
    from .potential import parse_spec

    pot = parse_spec(a.potential)
    g = CylGrid(R=a.R or 8.0 * a.lam / math.pi, lam=a.lam, L=a.height or 12.0 * a.lam / math.pi,
                nr=a.nr, ns=a.ns, ny=a.ny, alpha=a.alpha)
    sol = minimize_cyl(g, pot, tol_residual=a.tol, max_iter=a.max_iter)
    V = sol.field.values
    R_, S_, Y_ = np.meshgrid(g.r, g.s, g.y, indexing="ij")
    rows = zip(R_.ravel(), S_.ravel(), Y_.ravel(), V.ravel())
    _emit(csv_text(["r", "s", "y", "V"], rows), a.out, m)
    result = {"energy": sol.energy, "trivial_energy": 0.5 * a.lam * pot.F0 * g.R**2, "sup": sol.sup,
              "residual": sol.residual, "iterations": sol.iterations}
    if sol.sup > 1e-3:
        d = decay_rate(sol.field)
        result["decay_rate"] = d.rate
        result["decay_rate_pi_over_lambda"] = d.rate_pi_over_lambda
    m.parameters["result"] = result
    return 0


def cmd_barrier(a, m):
    from .helicoid3d import BarrierParams, barrier_check

    p = BarrierParams(a.K, a.C, a.eps, strict=not a.allow_small_C)
    rep = barrier_check(p, a.alpha, a.lam, n=a.n)
    out = asdict(rep)
    out["ok"] = rep.ok
    _emit(to_json(out) + "\n", a.out, m)
    return 0


def cmd_competitor(a, m):
    from .helicoid3d import CompetitorParams, competitor_energy, strip_minimizer
    from .potential import parse_spec

    pot = parse_spec(a.potential)
    v0 = strip_minimizer(a.lam, a.alpha, pot, ns=a.ns, ny=a.ny)
    rows = []
    for R in _floats(a.R_list):
        c = competitor_energy(CompetitorParams(a.a, a.b, R), v0, pot)
        rows.append((R, c.total, c.bulk, c.excess / R**2, c.eta_term, c.angular_term, c.xi_term, c.cutoff_defect))
    _emit(csv_text(["R", "total", "bulk", "excess_over_R2", "eta_term", "angular_term", "xi_term", "cutoff_defect"],
                   rows), a.out, m)
    return 0


def _shape(a):
    from . import nmc

    if a.shape == "helicoid":
        return nmc.ScrewSurface(a.lam), np.array([a.t0, 0.0, 0.0])
    if a.shape == "ball":
        return nmc.Ball((0.0, 0.0, 0.0), a.radius), np.array([a.radius, 0.0, 0.0])
    if a.shape == "halfspace":
        return nmc.HalfSpace(0.0), np.zeros(3)
    raise ValueError(f"unknown shape {a.shape!r}")


def cmd_nmc(a, m):
    from . import nmc

    shape, x0 = _shape(a)
    kw = {}
    if a.deltas:
        kw["deltas"] = tuple(_floats(a.deltas))
    if a.rmax:
        kw["rho_max"] = a.rmax
    quad = nmc.PVQuadrature.default(a.t0, a.lam, **kw)
    if a.symmetrized:
        if a.shape != "helicoid":
            raise ValueError("the pairing estimator applies to the helicoid only")
        res = nmc.nmc_helicoid_symmetrized(a.t0, a.lam, a.alpha, quad)
    else:
        res = nmc.nmc_at(shape, x0, a.alpha, quad)
    _emit(to_json(res.as_dict()) + "\n", a.out, m)
    m.tolerances.update(deltas=list(quad.deltas), rho_max=quad.rho_max)
    return 0


def cmd_perimeter(a, m):
    from . import nmc

    lo, hi = _floats(a.window) if a.window else (-0.5, 0.5)
    W = nmc.Box((lo,) * 3, (hi,) * 3)
    if a.shape == "halfspace":
        E = nmc.half_space(3)
    elif a.shape == "ball":
        E = nmc.Ball((0.0, 0.0, 0.0), a.radius)
    else:
        raise ValueError(f"unknown shape {a.shape!r}")
    res = nmc.fractional_perimeter(E, W, a.alpha, nmc.AngularQuadrature(a.panels, a.order))
    _emit(to_json(res.as_dict()) + "\n", a.out, m)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _common(p, alpha=0.5, lam=4.0):
    p.add_argument("--alpha", type=float, default=alpha)
    p.add_argument("--lambda", dest="lam", type=float, default=lam)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None, help="file of key=value lines; the command line takes precedence")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="fracscrew", description="Screw-invariant fractional Allen-Cahn toolkit")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("validate", help="check the double-well hypotheses")
    _common(p)
    p.add_argument("--potential", default="family=quartic c=0.25")
    p.add_argument("--t-max", type=float, default=2.0)
    p.add_argument("--t-points", type=int, default=400)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("specfun", help="tabulate profiles and Bessel functions")
    _common(p)
    p.add_argument("--what", default="phi2")
    p.add_argument("--y", default="0.1,0.5,1,2,5,10")
    p.add_argument("--ymax", type=float, default=None, help="tabulate y, phi1, phi2, residual on step..ymax")
    p.add_argument("--step", type=float, default=0.1)
    p.set_defaults(func=cmd_specfun)

    p = sub.add_parser("extend1d", help="harmonic extension of a sine expansion")
    _common(p)
    p.add_argument("--modes", default=None, help="CSV of coefficients a_1..a_K (last column)")
    p.add_argument("--heights", default="0,0.5,1")
    p.add_argument("--ns", type=int, default=64)
    p.set_defaults(func=cmd_extend1d)

    for name, fn in (("minimize1d", cmd_minimize1d), ("threshold", cmd_threshold)):
        p = sub.add_parser(name)
        _common(p)
        p.add_argument("--ns", type=int, default=128)
        p.add_argument("--ny", type=int, default=128)
        p.add_argument("--height", type=float, default=None)
        p.add_argument("--potential", default="family=quartic c=0.25")
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--max-iter", type=int, default=200)
        if name == "threshold":
            p.add_argument("--lambda-min", type=float, default=2.5)
            p.add_argument("--lambda-max", type=float, default=4.0)
            p.add_argument("--steps", type=int, default=7)
        p.set_defaults(func=fn)

    p = sub.add_parser("minimize3d")
    _common(p)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--nr", type=int, default=96)
    p.add_argument("--ns", type=int, default=64)
    p.add_argument("--ny", type=int, default=96)
    p.add_argument("--height", type=float, default=None)
    p.add_argument("--potential", default="family=quartic c=0.25")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=200)
    p.set_defaults(func=cmd_minimize3d)

    p = sub.add_parser("barrier")
    _common(p, lam=math.pi)
    p.add_argument("--K", type=float, default=10.0)
    p.add_argument("--C", type=float, default=8.0)
    p.add_argument("--eps", type=float, default=0.01)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--allow-small-C", action="store_true", help="accept C <= e^2 (negative control)")
    p.set_defaults(func=cmd_barrier)

    p = sub.add_parser("competitor")
    _common(p)
    p.add_argument("--a", type=float, default=0.7)
    p.add_argument("--b", type=float, default=0.9)
    p.add_argument("--R-list", default="20,40,80")
    p.add_argument("--ns", type=int, default=128)
    p.add_argument("--ny", type=int, default=128)
    p.add_argument("--potential", default="family=quartic c=0.25")
    p.set_defaults(func=cmd_competitor)

    p = sub.add_parser("nmc")
    _common(p, alpha=0.25, lam=math.pi)
    p.add_argument("--shape", default="helicoid", choices=["helicoid", "ball", "halfspace"])
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--deltas", default=None)
    p.add_argument("--rmax", type=float, default=None)
    p.add_argument("--symmetrized", action="store_true")
    p.set_defaults(func=cmd_nmc)

    p = sub.add_parser("perimeter")
    _common(p, alpha=0.25)
    p.add_argument("--shape", default="halfspace", choices=["halfspace", "ball"])
    p.add_argument("--window", default="-0.5,0.5", help="lo,hi of the cubic window")
    p.add_argument("--radius", type=float, default=0.5)
    p.add_argument("--panels", type=int, default=16)
    p.add_argument("--order", type=int, default=8)
    p.set_defaults(func=cmd_perimeter)
    return ap


def read_config(path) -> dict:
    out = {}
    with open(path) as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{ln}: expected key=value")
            k, v = line.split("=", 1)
            out[k.strip().lstrip("-").replace("-", "_")] = v.strip()
    return out


def _parse(argv):
    ap = build_parser()
    args = ap.parse_args(argv)
    if getattr(args, "config", None):
        cfg = read_config(args.config)
        sp = ap._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in sp._actions}
        defaults = {}
        for k, v in cfg.items():
            k = "lam" if k == "lambda" else k
            if k not in known:
                raise UsageError(f"unknown config key {k!r}")
            act = known[k]
            if act.type is not None:
                v = act.type(v)
            elif isinstance(act.const, bool):
                v = v.lower() in ("1", "true", "yes")
            defaults[k] = v
        sp.set_defaults(**defaults)
        args = ap.parse_args(argv)
    return ap, args


def main(argv=None) -> int:
    from ._accel import backend, configure_threads
    from .optim import NonConvergenceError

    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        ap, args = _parse(argv)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    if not getattr(args, "command", None):
        ap.print_usage(sys.stderr)
        return 1
    threads = configure_threads()
    params = {k: v for k, v in vars(args).items() if k not in ("func", "config")}
    manifest = RunManifest(args.command, params, backend=f"{backend()} ({threads} threads)")
    t0 = time.perf_counter()
    try:
        code = args.func(args, manifest)
    except NonConvergenceError as exc:
        sys.stderr.write(f"error: no convergence: {exc} (last residual {exc.residual})\n")
        code = 2
    except (ValueError, ArithmeticError, OSError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        code = 1
    manifest.wall_time = time.perf_counter() - t0
    manifest.write(args.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
