import math

import numpy as np
import pytest
from scipy.integrate import quad

from fracscrew import strip1d as S
from fracscrew.grids import StripGrid
from fracscrew.specfun import c_alpha


@pytest.fixture(scope="module")
def solved():
    from fracscrew.potential import quartic

    grid = StripGrid.default(4.0, 0.5, ns=64, ny=64)
    return S.minimize_strip(grid, quartic())


def weighted_p1_integrals(nodes, vals, beta):
    """Oracle for int y^beta b^2 and int y^beta b'^2 of the P1 interpolant."""
    m = k = 0.0
    for i in range(len(nodes) - 1):
        a, b = nodes[i], nodes[i + 1]
        slope = (vals[i + 1] - vals[i]) / (b - a)
        f = lambda y: vals[i] + slope * (y - a)
        m += quad(lambda y: y**beta * f(y) ** 2, a, b, epsabs=1e-14, epsrel=1e-13)[0]
        k += quad(lambda y: y**beta * slope**2, a, b, epsabs=1e-14, epsrel=1e-13)[0]
    return m, k


def test_trivial_energy(F):
    grid = StripGrid.default(3.0, 0.5, ns=16, ny=16)
    assert S.energy_E0(S.StripField.zeros(grid), F) == pytest.approx(3.0 * F.F0, rel=1e-14)


@pytest.mark.parametrize("alpha", (0.25, 0.5, 0.75))
def test_dirichlet_energy_matches_quadrature(alpha, rng):
    grid = StripGrid.default(2.0, alpha, ns=6, ny=7, L=3.0)
    a = rng.standard_normal(grid.ns + 1)
    b = rng.standard_normal(grid.ny + 1)
    ms, ks = weighted_p1_integrals(grid.s, a, 0.0)
    my, ky = weighted_p1_integrals(grid.y, b, grid.beta)
    ref = ks * my + ms * ky
    assert S.dirichlet_energy(grid, np.outer(a, b)) == pytest.approx(ref, rel=1e-10)


def test_trace_reduction_is_the_minimal_extension(rng):
    grid = StripGrid.default(4.0, 0.25, ns=24, ny=20)
    op = S.TraceOperator(grid)
    u = rng.standard_normal(grid.ns - 1)
    V = op.extend(u)
    c = c_alpha(grid.alpha)
    assert op.energy(u) == pytest.approx(S.dirichlet_energy(grid, V) / (2 * c), rel=1e-11)
    # the extension is discretely harmonic: perturbing interior values raises the energy
    for _ in range(5):
        P = np.zeros_like(V)
        P[1:-1, 1:-1] = 1e-3 * rng.standard_normal((grid.ns - 1, grid.ny - 1))
        assert S.dirichlet_energy(grid, V + P) > S.dirichlet_energy(grid, V)
    # gradient consistency
    d = rng.standard_normal(grid.ns - 1)
    t = 1e-6
    fd = (op.energy(u + t * d) - op.energy(u - t * d)) / (2 * t)
    assert fd == pytest.approx(float(op.apply(u) @ d), rel=1e-6)


@pytest.mark.parametrize("alpha", (0.25, 0.5))
def test_principal_eigenvalue_converges(alpha):
    ref = (math.pi / 4.0) ** (2 * alpha)
    errs = [abs(S.discrete_principal_eigenvalue(StripGrid.default(4.0, alpha, ns=n, ny=n)) - ref) for n in (16, 32, 64, 128)]
    assert errs[-1] < 0.01 * ref
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_nontrivial_minimizer(solved, F):
    sol = solved
    assert sol.residual < 1e-8 and sol.interior_residual < 1e-8
    assert 0.1 < sol.sup <= 1.0
    assert sol.energy < 4.0 * F.F0 - 1e-3
    assert sol.energy == pytest.approx(S.energy_E0(sol.field, F), rel=1e-10)
    u = sol.field.trace
    assert np.all(u[1:-1] > 0)
    assert np.allclose(u, u[::-1], atol=1e-8)
    sol.field.check_boundary(tol=1e-14)
    hist = np.array(sol.history)
    assert np.all(np.diff(hist) <= 1e-12 * abs(hist[0]))


def test_minimizer_is_a_fixed_point(solved, F):
    again = S.minimize_strip(solved.field.grid, F, init=solved.field)
    assert again.iterations <= 1
    assert np.max(np.abs(again.field.values - solved.field.values)) < 1e-8


def test_minimizer_beats_perturbations(solved, F, rng):
    grid = solved.field.grid
    op = S.TraceOperator(grid)
    for _ in range(5):
        u = solved.field.trace[1:-1] + 1e-3 * rng.standard_normal(grid.ns - 1)
        trial = S.StripField(grid, op.extend(np.clip(u, -1, 1)))
        assert S.energy_E0(trial, F) >= solved.energy - 1e-12


def test_subcritical_pitch_is_trivial(F):
    sol = S.minimize_strip(StripGrid.default(2.8, 0.5, ns=64, ny=64), F)
    assert sol.sup < 1e-3


def test_truncation_height_robust(F, solved):
    taller = S.minimize_strip(StripGrid.default(4.0, 0.5, ns=64, ny=80, L=16 * 4 / math.pi), F)
    assert abs(taller.sup - solved.sup) < 1e-3
    assert abs(taller.energy - solved.energy) < 1e-3


def test_identity_vanishes_at_minimizer_only(solved, F):
    val = S.nonexistence_identity(solved.field, F)
    assert abs(val.value) <= 10 * solved.residual + 1e-12
    assert val.kappa_continuum == pytest.approx(math.pi / 4)
    grid = solved.field.grid
    fake = S.StripField(grid, 0.5 * S.principal_direction(grid).values)
    assert abs(S.nonexistence_identity(fake, F).value) > 1e-2


def test_quadratic_coefficient_signs(F):
    sub = S.quadratic_expansion_check(F, 0.5, 2.0, grid=StripGrid.default(2.0, 0.5, ns=64, ny=64))
    sup = S.quadratic_expansion_check(F, 0.5, 4.0, grid=StripGrid.default(4.0, 0.5, ns=64, ny=64))
    assert sub.slope > 0 > sup.slope
    assert sub.reference > 0 > sup.reference
    assert sup.rel_error < 0.05


def test_field_validation():
    grid = StripGrid.default(2.0, 0.5, ns=4, ny=4)
    with pytest.raises(S.StripError):
        S.StripField(grid, np.zeros((3, 3)))
    v = np.zeros((5, 5))
    v[0, 2] = 1.0
    with pytest.raises(S.StripError):
        S.StripField(grid, v).check_boundary()
    v[0, 2] = np.nan
    with pytest.raises(S.StripError):
        S.energy_E0(S.StripField(grid, v), None)


def test_alpha_mismatch(F):
    grid = StripGrid.default(2.0, 0.5, ns=4, ny=4)
    with pytest.raises(S.StripError):
        S.energy_E0(S.StripField.zeros(grid), F, alpha=0.25)


def test_scan_brackets_lambda_star(F):
    res = S.threshold_scan(F, 0.5, [2.8, 3.6], ns=32, ny=32, bisect_tol=1e-2)
    assert res.bracket == (2.8, 3.6)
    assert abs(res.crossing - math.pi) < 0.1 * math.pi
    with pytest.raises(S.StripError):
        S.threshold_scan(F, 0.5, [])
