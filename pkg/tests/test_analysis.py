import numpy as np
import pytest

from setwise_cd.analysis import fit_rate, fit_window, geometric_mean_trace, reference_optimum
from setwise_cd.problems import lls_network, logistic_network


def test_fit_rate_exact_geometric():
    fit = fit_rate(0.9 ** np.arange(200), window=(0.0, 1.0))
    assert fit.rho == pytest.approx(0.1, abs=1e-12)
    assert fit.r2 == pytest.approx(1.0)
    assert fit.reduction_factor == pytest.approx(0.9)


def test_fit_rate_time_axis():
    x = np.linspace(0.0, 10.0, 101)
    fit = fit_rate(np.exp(-0.5 * x), window=(0.1, 0.9), x=x)
    assert fit.slope == pytest.approx(-0.5)


def test_fit_rate_floor_truncates():
    y = np.concatenate([0.5 ** np.arange(20), np.zeros(10)])
    fit = fit_rate(y, window=(0.0, 1.0), floor=1e-300)
    assert fit.stop == 20 and fit.rho == pytest.approx(0.5)


def test_band_window():
    y = 0.5 ** np.arange(30)
    assert fit_window(y, {"band": (0.1, 1e-3)}) == (4, 10)
    with pytest.raises(ValueError):
        fit_rate(np.zeros(5))


def test_geometric_mean():
    out = geometric_mean_trace([[1.0, 4.0], [4.0, 1.0]])
    np.testing.assert_allclose(out, [2.0, 2.0])


def test_reference_lls_optimality():
    oracles = lls_network(6, 3, 20, seed=0)
    ref = reference_optimum(oracles)
    grad = sum(o.gradient(ref.theta_star) for o in oracles)
    assert np.linalg.norm(grad) <= 1e-10 * max(1.0, sum(np.linalg.norm(o.b) for o in oracles))
    assert ref.F_star == pytest.approx(-ref.primal_star)


def test_reference_logistic_optimality():
    oracles = logistic_network(5, 3, 20, seed=0)
    ref = reference_optimum(oracles)
    assert np.linalg.norm(sum(o.gradient(ref.theta_star) for o in oracles)) <= 1e-10


def test_fit_rate_spec_examples():
    fit = fit_rate([1.0, 0.5, 0.25], window=(0.0, 1.0))
    assert fit.rho == pytest.approx(0.5) and fit.r2 == pytest.approx(1.0)
    assert fit_rate(np.full(10, 3.0), window=(0.0, 1.0)).rho == pytest.approx(0.0, abs=1e-12)
    rng = np.random.default_rng(0)
    noisy = 0.9 ** np.arange(100) * (1.0 + 0.01 * rng.standard_normal(100))
    assert fit_rate(noisy, window=(0.0, 1.0)).rho == pytest.approx(0.1, abs=0.01)
