import math

import numpy as np
import pytest

from fracscrew import potential as P

T = np.linspace(-2, 2, 401)


def test_quartic_values(F):
    assert F.F0 == pytest.approx(0.25)
    assert F.ddF0 == pytest.approx(-1.0)
    assert float(F.F(1.0)) == 0.0 and float(F.dF(-1.0)) == 0.0


def test_quartic_validates(F):
    assert P.validate(F, T) == []


def test_lambda_star_quartic(F):
    assert P.lambda_star(F, 0.5) == pytest.approx(math.pi)
    assert P.lambda_star(P.quartic(1.0), 0.5) == pytest.approx(math.pi / 4 ** 1.0)
    assert P.lambda_star(P.quartic(1.0), 0.25) == pytest.approx(math.pi / 4 ** 2.0)


def test_single_well_rejected():
    well = P.from_callables(lambda t: t**2, lambda t: 2 * t, lambda t: 2 + 0 * t)
    with pytest.raises(P.PotentialError, match="F''"):
        P.lambda_star(well, 0.5)
    report = P.validate(well, T)
    assert "F''(0)<0 violated" in report
    assert "minimum only at +-1 violated" in report


def test_odd_perturbation_flags_evenness():
    F = P.from_callables(
        lambda t: 0.25 * (1 - t * t) ** 2 + 0.01 * t**3,
        lambda t: -t * (1 - t * t) + 0.03 * t**2,
        lambda t: 3 * t * t - 1 + 0.06 * t,
    )
    assert "evenness violated" in P.validate(F, T)


def test_wrong_derivative_flagged():
    F = P.from_callables(
        lambda t: 0.25 * (1 - t * t) ** 2, lambda t: -2 * t * (1 - t * t), lambda t: 3 * t * t - 1
    )
    assert "derivative consistency violated" in P.validate(F, T)


def test_grid_must_be_symmetric(F):
    with pytest.raises(P.PotentialError):
        P.validate(F, np.linspace(-1, 2, 31))
    with pytest.raises(P.PotentialError):
        P.validate(F, np.linspace(-0.5, 0.5, 11))


def test_nonpositive_quartic_coefficient():
    with pytest.raises(P.PotentialError):
        P.quartic(0.0)


def test_parse_spec_roundtrip():
    F = P.parse_spec("family=quartic c=0.5")
    assert F.params == {"family": "quartic", "c": 0.5}
    assert P.parse_spec("").params["c"] == 0.25
    for bad in ("family=sextic", "c", "family=table"):
        with pytest.raises(P.PotentialError):
            P.parse_spec(bad)


def test_table_potential_interpolates(tmp_path, F):
    t = np.linspace(-2, 2, 201)
    path = tmp_path / "F.csv"
    rows = ["t,F,dF,ddF"] + [",".join(repr(float(v)) for v in (x, F.F(x), F.dF(x), F.ddF(x))) for x in t]
    path.write_text("\n".join(rows))
    G = P.parse_spec(f"family=table file={path}")
    x = np.linspace(-1.9, 1.9, 37)
    assert np.max(np.abs(G.F(x) - F.F(x))) < 1e-6
    assert G.ddF0 == pytest.approx(-1.0)
    assert P.validate(G, t) == []


def test_table_bad_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,F\n0,1\n")
    with pytest.raises(P.PotentialError):
        P.from_table(str(path))


def test_lambda_star_alpha_range(F):
    with pytest.raises(P.PotentialError):
        P.lambda_star(F, 1.0)
