import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from setwise_cd.problems import (
    lls_network,
    logistic_network,
    make_lls,
    make_logistic,
    make_quadratic,
    make_separable,
    problem_from_spec,
    quadratic_network,
)


def test_quadratic_conjugate_example():
    q = make_quadratic([-1.0], [[1.0]])
    assert q.conjugate_gradient(np.array([-1.0]))[0] == pytest.approx(-2.0)
    assert q.conjugate_value(np.array([-1.0])) == pytest.approx(1.5)


def test_lls_conjugate_example():
    o = make_lls([[1.0]], [0.0])
    assert o.value([1.0]) == pytest.approx(1.0)
    assert o.conjugate_gradient(np.array([2.0]))[0] == pytest.approx(1.0)


def test_lls_rank_deficient_rejected():
    with pytest.raises(ValueError, match="rank deficient"):
        make_lls(np.zeros((3, 2)), np.zeros(3))
    make_lls(np.zeros((3, 2)), np.zeros(3), ridge=0.1)


def test_lls_matches_direct_form(rng):
    X, Y = rng.standard_normal((20, 3)), rng.standard_normal(20)
    o = make_lls(X, Y)
    for _ in range(5):
        t = rng.standard_normal(3)
        assert o.value(t) == pytest.approx(np.sum((X @ t - Y) ** 2) / 20)


def _fenchel_check(o, y):
    theta = o.conjugate_gradient(y)
    # first-order optimality of min f(t) - y^T t
    assert np.linalg.norm(o.gradient(theta) - y) <= 1e-9 * max(1.0, np.linalg.norm(y))
    # Fenchel-Young equality
    assert o.conjugate_value(y) == pytest.approx(y @ theta - o.value(theta), abs=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_quadratic_fenchel(yl):
    o = quadratic_network(1, 3, seed=2, c_big=1.0)[0]
    _fenchel_check(o, np.array(yl))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_logistic_fenchel(yl):
    o = logistic_network(1, 3, 20, seed=4)[0]
    _fenchel_check(o, np.array(yl))


def test_logistic_validation():
    with pytest.raises(ValueError):
        make_logistic([[1.0]], [1.0], c=0.0)
    with pytest.raises(ValueError):
        make_logistic([[1.0]], [0.5], c=0.1)


def test_logistic_constants():
    o = logistic_network(1, 4, 30, seed=1, c=0.1)[0]
    assert o.mu == pytest.approx(0.2)
    for t in np.random.default_rng(0).standard_normal((5, 4)):
        eig = np.linalg.eigvalsh(o.hessian(t))
        assert eig[0] >= o.mu - 1e-12 and eig[-1] <= o.M + 1e-12


def test_quadratic_network_constants():
    oracles = quadratic_network(8, 5, seed=1, c_big=100.0)
    mus = sorted(o.mu for o in oracles)
    assert mus[0] == pytest.approx(2.0) and mus[-1] == pytest.approx(200.0)
    assert sum(o.mu == pytest.approx(200.0) for o in oracles) == 1


def test_problem_from_spec_kinds(tmp_path):
    assert len(problem_from_spec({"kind": "quadratic", "params": {"d": 2}, "seed": 0}, 4)) == 4
    assert problem_from_spec({"kind": "lls", "params": {"d": 2, "m": 5}}, 3)[0].kind == "lls"
    X, Y = np.ones((4, 1)), np.array([1.0, -1.0, 1.0, 1.0])
    np.savetxt(tmp_path / "X.csv", X, delimiter=",")
    np.savetxt(tmp_path / "Y.csv", Y, delimiter=",")
    files = [{"X": str(tmp_path / "X.csv"), "Y": str(tmp_path / "Y.csv")}] * 2
    out = problem_from_spec({"kind": "logistic", "params": {"data": files, "c": 0.5}}, 2)
    assert out[0].c == 0.5
    with pytest.raises(ValueError):
        problem_from_spec({"kind": "cubic"}, 2)


def test_separable_primal():
    f = make_separable([1.0, 2.0], exponent=4)
    assert f.value([1.0, 1.0]) == pytest.approx(3.0)
    np.testing.assert_allclose(f.coord_gradient(np.array([1.0, -1.0])), [4.0, -8.0])
    np.testing.assert_allclose(f.coord_lipschitz(box=[1.0, 2.0]), [12.0, 96.0])
    with pytest.raises(ValueError):
        f.coord_lipschitz()
    with pytest.raises(ValueError):
        make_separable([1.0], exponent=3)


def test_lls_network_is_deterministic():
    a, b = lls_network(3, 2, 10, seed=7), lls_network(3, 2, 10, seed=7)
    np.testing.assert_array_equal(a[2].b, b[2].b)
