import filecmp

import numpy as np
import pytest

from setwise_cd.engine import ALGORITHMS, Reference, RunConfig, StepPolicy, one_step_decrease, run_iterations
from setwise_cd.objectives import DualConsensusObjective, SeparableObjective, double_cover_sets
from setwise_cd.problems import logistic_network, make_separable, quadratic_network
from setwise_cd.scheduler import iteration_ledger
from setwise_cd.topology import generate_regular


@pytest.fixture(scope="module")
def small_quadratic():
    topo = generate_regular(8, 3, 0)
    return DualConsensusObjective(topo, quadratic_network(8, 2, seed=1, c_big=10.0))


def test_algorithm_table():
    assert ALGORITHMS["SGSL-CD"] == ("gsl", "coordinate")
    assert RunConfig(rule="gs", stepsize="estimated").name == "gs/estimated"
    assert RunConfig(rule="gs").name == "SGS-CD"
    with pytest.raises(ValueError):
        RunConfig(rule="cyclic")
    with pytest.raises(ValueError):
        RunConfig(L0=0.0)


@pytest.mark.parametrize("alg", ["SU-CD", "SGS-CD", "SL-CD", "SGSL-CD"])
def test_pair_fixture_one_iteration(pair_objective, alg):
    trace, state = run_iterations(pair_objective, RunConfig.for_algorithm(alg, iterations=1), Reference(-1.0))
    assert trace.F_value[-1] == pytest.approx(-1.0, abs=1e-12)
    assert state.lam[0, 0] == pytest.approx(-1.0, abs=1e-12)
    np.testing.assert_allclose(state.g, 0.0, atol=1e-12)


def test_trace_columns(small_quadratic):
    trace, _ = run_iterations(small_quadratic, RunConfig.for_algorithm("SGS-CD", iterations=50))
    assert len(trace) == 51 and trace.selected_coord[0] == -1
    assert np.all(np.diff(trace.F_value) <= 1e-12)
    assert np.all(np.isnan(trace.dual_subopt))


@pytest.mark.parametrize("alg", list(ALGORITHMS))
def test_determinism_and_csv(tmp_path, small_quadratic, alg):
    cfg = RunConfig.for_algorithm(alg, iterations=100, seed=4)
    a, _ = run_iterations(small_quadratic, cfg)
    b, _ = run_iterations(small_quadratic, cfg)
    a.to_csv(tmp_path / "a.csv")
    b.to_csv(tmp_path / "b.csv")
    assert filecmp.cmp(tmp_path / "a.csv", tmp_path / "b.csv", shallow=False)
    header = (tmp_path / "a.csv").read_text().splitlines()[0]
    assert header == "iteration,F_value,dual_subopt,primal_subopt,selected_coord,vectors_tx_cum,inner_loops_I,consensus_residual"


def test_rules_share_activation_sequence(small_quadratic):
    u, _ = run_iterations(small_quadratic, RunConfig.for_algorithm("SU-CD", iterations=200, seed=9))
    g, _ = run_iterations(small_quadratic, RunConfig.for_algorithm("SGSeL-CD", iterations=200, seed=9))
    np.testing.assert_array_equal(u.node, g.node)


def test_selected_coordinate_belongs_to_activated_set(small_quadratic):
    trace, _ = run_iterations(small_quadratic, RunConfig.for_algorithm("SL-CD", iterations=300))
    for i, l in zip(trace.node[1:], trace.selected_coord[1:]):
        assert l in small_quadratic.sets[i]


@pytest.mark.parametrize("alg", list(ALGORITHMS))
def test_vector_ledger(small_quadratic, alg):
    cfg = RunConfig.for_algorithm(alg, iterations=300, seed=2)
    trace, _ = run_iterations(small_quadratic, cfg)
    assert iteration_ledger(trace, small_quadratic, cfg).consistent


def test_estimated_needed_without_constants():
    from setwise_cd.topology import path_graph
    obj = DualConsensusObjective(path_graph(3), logistic_network(3, 2, 10, seed=0))
    assert obj.coord_lipschitz() is None
    with pytest.raises(ValueError, match="estimated"):
        StepPolicy(obj, RunConfig.for_algorithm("SL-CD"), obj.init_state())
    trace, _ = run_iterations(obj, RunConfig.for_algorithm("SGSeL-CD", iterations=30))
    assert np.all(np.diff(trace.F_value) <= 1e-9)


def test_parallel_run_decreases():
    sets = double_cover_sets(6, 4)
    obj = SeparableObjective(make_separable(np.linspace(1, 3, 12), exponent=4), sets)
    trace, _ = run_iterations(obj, RunConfig.for_algorithm("SGSeL-CD", iterations=200),
                              state=obj.init_state(np.ones(12)))
    assert trace.F_value[-1] < 1e-2 * trace.F_value[0]


def test_one_step_decrease_does_not_mutate(pair_objective):
    s = pair_objective.init_state()
    assert one_step_decrease(pair_objective, s, 0, 0.5) == pytest.approx(1.0)
    assert s.lam[0, 0] == 0.0
