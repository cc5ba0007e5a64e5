import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from fracscrew import specfun as S

ALPHAS = (0.1, 0.25, 0.5, 0.75, 0.9)
YS = np.array([1e-3, 0.05, 0.3, 1.0, 1.9, 2.1, 5.0, 11.9, 12.1, 30.0, 100.0])


def rel(a, b):
    return abs(a - b) / abs(b)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_bessel_against_mpmath(alpha):
    mp.mp.dps = 30
    for y in YS:
        assert rel(S.bessel_I(alpha, y), float(mp.besseli(alpha, y))) < 1e-12
        assert rel(S.bessel_Z(alpha, y), float(mp.besselk(alpha, y))) < 1e-12


@pytest.mark.parametrize("alpha", (0.3, 0.6))
def test_bessel_against_scipy_dense(alpha):
    y = np.geomspace(1e-4, 200, 500)
    assert np.max(np.abs(S.bessel_Z(alpha, y) / special.kv(alpha, y) - 1)) < 1e-12
    assert np.max(np.abs(S.bessel_I(alpha, y) / special.iv(alpha, y) - 1)) < 1e-12


@pytest.mark.parametrize("alpha", (0.25, 0.5, 0.75))
def test_branch_switches_accurate_on_both_sides(alpha):
    mp.mp.dps = 30
    for y0 in (S.Y_SERIES_Z, S.Y_SWITCH):
        for y in (y0 * (1 - 1e-9), y0 * (1 + 1e-9)):
            assert rel(S.bessel_I(alpha, y), float(mp.besseli(alpha, y))) < 1e-12
            assert rel(S.bessel_Z(alpha, y), float(mp.besselk(alpha, y))) < 1e-12


def test_c_alpha_values():
    assert S.c_alpha(0.5) == pytest.approx(1.0)
    for a in ALPHAS:
        ref = float(2 ** (1 - 2 * mp.mpf(a)) * mp.gamma(1 - a) / mp.gamma(a))
        assert S.c_alpha(a) == pytest.approx(ref, rel=1e-14)


def test_half_order_closed_forms():
    y = np.linspace(0.0, 20.0, 201)
    assert np.max(np.abs(S.phi2(0.5, y) - np.exp(-y))) < 1e-12
    assert np.max(np.abs(S.phi1(0.5, y[1:]) - np.sqrt(2 / np.pi) * np.sinh(y[1:]))) < 1e-9 * np.sinh(20)


@pytest.mark.parametrize("alpha", (0.25, 0.5, 0.75))
@pytest.mark.parametrize("profile", ("phi2", "phi1"))
def test_profiles_solve_ode(alpha, profile):
    y = np.linspace(0.1, 10.0, 400)
    res = S.ode_residual(alpha, y, profile)
    scale = np.abs(S.phi1(alpha, y)) if profile == "phi1" else 1.0
    assert np.max(np.abs(res) / np.maximum(scale, 1.0)) < 1e-8


@pytest.mark.parametrize("alpha", (0.25, 0.5, 0.75))
def test_rescaled_profile_solves_weighted_ode(alpha):
    y = np.linspace(0.2, 5.0, 50)
    assert np.max(np.abs(S.rescaled_profile_residual(alpha, 2.3, y))) < 1e-7


def test_wrong_profile_fails_ode():
    res = S.ode_residual(0.25, np.linspace(0.5, 3, 20), lambda t: np.exp(-t))
    assert np.max(np.abs(res)) > 1e-2


@pytest.mark.parametrize("alpha", (0.1, 0.25, 0.5, 0.75, 0.9))
def test_neumann_trace_equals_c_alpha(alpha):
    assert abs(S.neumann_trace(alpha) - S.c_alpha(alpha)) < 1e-8
    assert S.ExtensionProfile(alpha).trace_flux() == pytest.approx(S.c_alpha(alpha), rel=1e-13)


@pytest.mark.parametrize("alpha", (0.25, 0.75))
def test_derivatives_against_finite_differences(alpha):
    y = np.linspace(0.3, 8.0, 30)
    h = 1e-5
    for f, df in ((S.phi2, S.dphi2), (S.phi1, S.dphi1)):
        fd = (f(alpha, y + h) - f(alpha, y - h)) / (2 * h)
        assert np.max(np.abs(fd - df(alpha, y)) / np.maximum(np.abs(df(alpha, y)), 1)) < 1e-7


def test_phi2_small_y_branch_continuous():
    a = 0.3
    y0 = S.Y_MIN
    assert rel(S.phi2(a, y0 * (1 - 1e-9)), S.phi2(a, y0 * (1 + 1e-9))) < 1e-12
    assert S.phi2(a, 0.0) == 1.0 and S.phi1(a, 0.0) == 0.0


def test_domain_errors():
    with pytest.raises(S.SpecfunError):
        S.bessel_I(0.5, 800.0)
    with pytest.raises(S.SpecfunError):
        S.phi1(0.5, 701.0)
    with pytest.raises(S.SpecfunError):
        S.bessel_Z(0.5, -1.0)
    with pytest.raises(S.SpecfunError):
        S.phi2(0.5, -0.1)
    with pytest.raises(S.SpecfunError):
        S.bessel_Z(1.5, 1.0)
    with pytest.raises(ValueError):
        S.ExtensionProfile(0.5, "other")


def test_profile_wrapper():
    p = S.ExtensionProfile(0.5, "growing")
    assert p(1.0) == pytest.approx(S.phi1(0.5, 1.0))
    assert p.normalization == 1.0
    assert S.ExtensionProfile(0.5).normalization == pytest.approx(math.sqrt(math.pi / 2))


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.01, 50.0))
def test_wronskian(alpha, y):
    # y^(1-2a) (phi1' phi2 - phi1 phi2') = 1 / (2^(a-1) Gamma(a)) * 1
    w = y ** (1 - 2 * alpha) * (S.dphi1(alpha, y) * S.phi2(alpha, y) - S.phi1(alpha, y) * S.dphi2(alpha, y))
    assert w == pytest.approx(1.0 / S.phi2_norm(alpha), rel=1e-10)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.0, 40.0), st.floats(0.001, 5.0))
def test_phi2_monotone_decreasing(alpha, y, dy):
    assert S.phi2(alpha, y + dy) < S.phi2(alpha, y)


@pytest.mark.parametrize("alpha", (0.25, 0.5, 0.75))
@pytest.mark.parametrize("y_switch", (12.0, S.Y_SWITCH))
def test_series_and_asymptotic_branches_agree(alpha, y_switch):
    y = np.array([y_switch])
    for f in (S._bessel_i_any, S._bessel_k_any):
        below = f(alpha, y, y_switch + 1.0)[0]
        above = f(alpha, y, y_switch - 1.0)[0]
        assert rel(below, above) < 1e-10


@pytest.mark.parametrize("alpha", (0.25, 0.5, 0.75))
def test_phi2_large_y_shape(alpha):
    y = np.linspace(8.0, 20.0, 50)
    ratio = S.phi2(alpha, y) / (y ** (alpha - 0.5) * np.exp(-y))
    const = math.sqrt(math.pi / 2) / S.phi2_norm(alpha)
    # first correction of the asymptotic series is (4a^2 - 1) / (8y)
    assert np.max(np.abs(ratio / const - 1)) <= abs(4 * alpha**2 - 1) / 64 + 1e-3


def test_published_reference_values():
    assert S.bessel_I(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1.0), rel=1e-13)
    assert S.bessel_I(0.5, 1.0) == pytest.approx(0.93767, abs=1e-5)
    assert S.bessel_Z(0.5, 1.0) == pytest.approx(0.46107, abs=1e-5)
    assert S.c_alpha(0.25) == pytest.approx(0.478, abs=1e-3)
    assert S.c_alpha(0.75) == pytest.approx(2.092, abs=1e-3)


@pytest.mark.parametrize("alpha", [0.25, 0.75])
def test_rescaled_residual_rejects_constant(alpha):
    y = np.linspace(0.5, 5.0, 50)
    const = lambda t: np.ones_like(np.asarray(t, dtype=float))
    assert np.max(np.abs(S.rescaled_profile_residual(alpha, 2.3, y, profile=const))) > 1e-2
