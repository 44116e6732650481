import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from setwise_cd.rules import (
    EstimatorError,
    estimate_lipschitz_step,
    lipschitz_probabilities,
    search_lipschitz_step,
    select_gs,
    select_gsl,
    select_lipschitz,
    select_uniform,
)


def test_gs_picks_largest_and_breaks_ties_low(star_objective):
    s = star_objective.init_state()
    assert select_gs(star_objective.norm_sq_gradients(s, 0)) == 0
    assert select_gs(np.array([1.0, 4.0, 4.0])) == 1


def test_gsl_scores():
    assert select_gsl(np.array([9.0, 1.0, 1.0]), np.array([9.0, 1.0, 1.0])) == 0
    assert select_gsl(np.array([9.0, 1.0, 1.0]), np.array([100.0, 1.0, 1.0])) == 1
    with pytest.raises(ValueError):
        select_gsl(np.ones(2), np.array([1.0, 0.0]))


def test_lipschitz_probabilities():
    np.testing.assert_allclose(lipschitz_probabilities([2.0, 2.0, 4.0]), [0.25, 0.25, 0.5])
    with pytest.raises(ValueError):
        lipschitz_probabilities([1.0, np.inf])


def test_lipschitz_sampling_frequencies():
    rng = np.random.default_rng(0)
    draws = np.bincount([select_lipschitz(np.array([2.0, 2.0, 4.0]), rng) for _ in range(20000)])
    p = np.array([0.25, 0.25, 0.5])
    sd = np.sqrt(20000 * p * (1 - p))
    assert np.all(np.abs(draws - 20000 * p) < 4 * sd)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 20), st.integers(0, 2**31))
def test_uniform_in_range(size, seed):
    assert 0 <= select_uniform(size, np.random.default_rng(seed)) < size


def test_worked_estimator_example(pair_objective):
    # H = 2 on the pair fixture, L0 = 0.5
    s = pair_objective.init_state()
    est, loops = estimate_lipschitz_step(pair_objective, s, 0, 0.5)
    assert (s.lam[0, 0], est, loops) == (-0.5, 2.0, 3)


def test_estimator_exits_after_one_doubling_when_L0_large(pair_objective):
    s = pair_objective.init_state()
    est, loops, block = search_lipschitz_step(pair_objective, s, 0, 5.0)
    assert (est, loops) == (5.0, 1)
    assert block[0] == pytest.approx(-0.2)
    assert s.lam[0, 0] == 0.0


def test_estimator_leaves_converged_coordinate(pair_objective):
    s = pair_objective.init_state([-1.0])
    assert search_lipschitz_step(pair_objective, s, 0, 3.0) == (3.0, 0, None)


def test_estimator_cap():
    class Flat:
        gradient_noise = 0.0

        def coord_gradient(self, state, l):
            return np.array([1.0])

        def trial(self, state, l, block):
            return np.array([-1.0]), 0.0

    class S:
        lam = np.zeros((1, 1))

    with pytest.raises(EstimatorError):
        search_lipschitz_step(Flat(), S(), 0, 1.0)
