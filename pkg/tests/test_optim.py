import numpy as np
import pytest
from scipy.optimize import minimize

from fracscrew.optim import NonConvergenceError, projected_newton


def problem(n, seed):
    r = np.random.default_rng(seed)
    Q = r.standard_normal((n, n))
    A = Q @ Q.T + n * np.eye(n)
    b = 5 * r.standard_normal(n)
    return A, b


def run(A, b, **kw):
    f = lambda x: 0.5 * x @ A @ x - b @ x
    g = lambda x: A @ x - b
    hess = lambda x: (lambda p: A @ p)
    prec = lambda x: (lambda r: r / np.diag(A))

    def res(x, gr):
        gp = np.where(((x <= -1) & (gr > 0)) | ((x >= 1) & (gr < 0)), 0.0, gr)
        return float(np.max(np.abs(gp)))

    return projected_newton(f, g, hess, prec, res, np.zeros(len(b)), -1.0, 1.0, **kw), f, g


@pytest.mark.parametrize("seed", range(4))
def test_box_quadratic_matches_lbfgsb(seed):
    A, b = problem(12, seed)
    out, f, g = run(A, b)
    ref = minimize(f, np.zeros(12), jac=g, method="L-BFGS-B", bounds=[(-1, 1)] * 12,
                   options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": 5000})
    assert out.residual < 1e-8
    assert np.all(np.abs(out.x) <= 1)
    assert out.energy <= ref.fun + 1e-10
    assert np.allclose(out.x, ref.x, atol=1e-5)


def test_energy_history_monotone():
    A, b = problem(20, 7)
    out, _, _ = run(A, b)
    h = np.array(out.history)
    assert np.all(np.diff(h) <= 1e-12 * max(1.0, abs(h[0])))


def test_iteration_cap_raises_with_state():
    A, b = problem(30, 1)
    with pytest.raises(NonConvergenceError) as exc:
        run(A, b, max_iter=1, tol_residual=1e-16, rtol_energy=0.0)
    assert exc.value.x.shape == (30,)
    assert exc.value.residual > 0
