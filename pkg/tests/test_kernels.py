import os
import subprocess
import sys

import numpy as np
import pytest
from scipy.interpolate import RegularGridInterpolator
from scipy.linalg import solve_banded

from fracscrew import kernels
from fracscrew._accel import HAVE_NUMBA, backend
from fracscrew.grids import CylGrid, p1_matrices

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not available")


@pytest.fixture(scope="module")
def grid():
    return CylGrid.default(4.0, 0.25, nr=12, ns=8, ny=14)


def test_tri_axis_is_tridiagonal_product(grid, rng):
    d, o = grid.strip.ymats[0], grid.strip.ymats[1]
    M = np.diag(d) + np.diag(o, 1) + np.diag(o, -1)
    V = rng.standard_normal(grid.shape)
    ref = np.einsum("kl,ijl->ijk", M, V)
    assert np.allclose(kernels.tri_axis(V, d, o, 2, use_numba=False), ref, atol=1e-13)


def test_dtn_profiles_solve_the_shifted_problem(grid, rng):
    kd, ko, md, mo = grid.strip.ymats
    theta = rng.uniform(0.1, 20.0, 5)
    g, prof = kernels.dtn_profiles(theta, kd, ko, md, mo, use_numba=False)
    for j, t in enumerate(theta):
        d, o = kd + t * md, ko + t * mo
        # interior rows of the banded system with prof[0] = 1 and prof[-1] = 0
        ab = np.zeros((3, len(d) - 2))
        ab[0, 1:] = o[1:-1]
        ab[1] = d[1:-1]
        ab[2, :-1] = o[1:-1]
        rhs = np.zeros(len(d) - 2)
        rhs[0] = -o[0]
        inner = solve_banded((1, 1), ab, rhs)
        assert np.allclose(prof[j, 1:-1], inner, atol=1e-12)
        assert prof[j, 0] == 1.0 and prof[j, -1] == 0.0
        assert g[j] == pytest.approx(d[0] + o[0] * inner[0], rel=1e-12)


def test_trilinear_matches_scipy(grid, rng):
    V = rng.standard_normal(grid.shape)
    pts = [rng.uniform(0, hi, 300) for hi in (grid.R, grid.lam, grid.L)]
    ref = RegularGridInterpolator((grid.r, grid.s, grid.y), V)(np.column_stack(pts))
    assert np.allclose(kernels.trilinear(V, grid.r, grid.s, grid.y, *pts, use_numba=False), ref, atol=1e-13)


@needs_numba
def test_numba_numpy_parity(grid, rng):
    kd, ko, md, mo = grid.strip.ymats
    theta = rng.uniform(0.1, 50.0, 40)
    g0, p0 = kernels.dtn_profiles(theta, kd, ko, md, mo, use_numba=False)
    g1, p1 = kernels.dtn_profiles(theta, kd, ko, md, mo, use_numba=True)
    assert np.allclose(g0, g1, rtol=1e-13) and np.allclose(p0, p1, atol=1e-14)
    V = rng.standard_normal(grid.shape)
    (rd, ro), _, _ = grid.rmats
    for axis, (d, o) in enumerate([(rd, ro), grid.strip.smats[:2], (kd, ko)]):
        a = kernels.tri_axis(V, d, o, axis, use_numba=False)
        b = kernels.tri_axis(V, d, o, axis, use_numba=True)
        assert np.allclose(a, b, rtol=1e-13, atol=1e-13)
    pts = [rng.uniform(0, hi, 500) for hi in (grid.R, grid.lam, grid.L)]
    a = kernels.trilinear(V, grid.r, grid.s, grid.y, *pts, use_numba=False)
    b = kernels.trilinear(V, grid.r, grid.s, grid.y, *pts, use_numba=True)
    assert np.allclose(a, b, atol=1e-14)


def test_disable_flag_selects_numpy():
    env = dict(os.environ, FRACSCREW_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", "import fracscrew; print(fracscrew.backend())"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_backend_name():
    assert backend() == ("numba" if HAVE_NUMBA else "numpy")


def test_solver_backends_agree():
    code = ("import json; from fracscrew.potential import quartic; from fracscrew.grids import StripGrid;"
            "from fracscrew.strip1d import minimize_strip;"
            "s = minimize_strip(StripGrid.default(4.0, 0.5, ns=32, ny=32), quartic());"
            "print(json.dumps([s.energy, s.sup]))")
    vals = []
    for flag in ("1", "0"):
        env = dict(os.environ, FRACSCREW_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        vals.append(np.array(eval(out.stdout)))
    assert np.allclose(vals[0], vals[1], rtol=1e-10)


def test_p1_matrices_exact_on_linears():
    x = np.array([0.0, 0.3, 1.0, 1.7])
    kd, ko, md, mo = p1_matrices(x, 0.0)
    ones = np.ones_like(x)
    K = np.diag(kd) + np.diag(ko, 1) + np.diag(ko, -1)
    M = np.diag(md) + np.diag(mo, 1) + np.diag(mo, -1)
    assert np.allclose(K @ ones, 0, atol=1e-14)
    assert ones @ M @ ones == pytest.approx(1.7)
    assert x @ K @ x == pytest.approx(1.7)
