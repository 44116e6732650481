import filecmp
from collections import defaultdict

import numpy as np
import pytest
from scipy import stats

from setwise_cd.engine import ALGORITHMS, RunConfig, run_iterations
from setwise_cd.objectives import DualConsensusObjective
from setwise_cd.problems import quadratic_network
from setwise_cd.scheduler import (
    ActivationProcess,
    ConflictError,
    _Groups,
    communication_ledger,
    expected_vectors,
    simulate,
)
from setwise_cd.topology import generate_regular, path_graph


@pytest.fixture(scope="module")
def ring_objective():
    topo = generate_regular(10, 4, 1)
    return DualConsensusObjective(topo, quadratic_network(10, 2, seed=0, c_big=10.0))


def test_activation_process():
    ap = ActivationProcess.zipf(32, 10.0, seed=0)
    assert ap.kappa.mean() == pytest.approx(10.0, abs=1e-9)
    assert np.median(ap.kappa) < 10.0
    np.testing.assert_allclose(ActivationProcess.equal(3, 5.0).rates, 0.2)
    assert ActivationProcess.from_spec(2.0, 4).kappa.tolist() == [2.0] * 4
    with pytest.raises(ValueError):
        ActivationProcess(np.array([1.0, 0.0]))
    with pytest.raises(ValueError):
        ActivationProcess.from_spec({"mode": "pareto", "kappa": 1.0}, 3)


def test_activation_counts_poisson(ring_objective):
    T = 2000.0
    tr = simulate(ring_objective, RunConfig(), ActivationProcess.equal(10, 2.0), 0.0, T, seed=3)
    mean = T / 2.0
    # total count is Poisson(n * T / kappa); per-node spread via chi-square
    total = tr.activations.sum()
    assert abs(total - 10 * mean) < 3.0 * np.sqrt(10 * mean)
    chi2 = np.sum((tr.activations - mean) ** 2 / mean)
    assert stats.chi2.sf(chi2, df=10) > 1e-3


def test_pair_renewal_oracle(pair_objective):
    # kappa = 1, tau = 1: idle gaps Exp(2) then one busy round of length 1
    T = 20000.0
    tr = simulate(pair_objective, RunConfig(iterations=0), ActivationProcess.equal(2, 1.0), 1.0, T, seed=0)
    count = int(tr.updates.sum())
    mean, var = T / 1.5, T * 0.25 / 1.5**3
    assert abs(count - mean) < 3.0 * np.sqrt(var)


def test_tau_zero_matches_iteration_semantics(ring_objective):
    tr = simulate(ring_objective, RunConfig.for_algorithm("SGS-CD"), ActivationProcess.equal(10, 1.0), 0.0, 300.0)
    assert not np.any(tr.event == "drop") and not np.any(tr.event == "wait")
    assert tr.updates.sum() == tr.activations.sum()
    assert np.all(np.diff(tr.sim_time) >= 0)


def test_invalid_arguments(ring_objective):
    ap = ActivationProcess.equal(10, 1.0)
    with pytest.raises(ValueError):
        simulate(ring_objective, RunConfig(), ap, -1.0, 10.0)
    with pytest.raises(ValueError):
        simulate(ring_objective, RunConfig(), ap, 0.0, 0.0)
    with pytest.raises(ValueError):
        simulate(ring_objective, RunConfig(), ActivationProcess.equal(3, 1.0), 0.0, 10.0)
    with pytest.raises(ValueError):
        simulate(ring_objective, RunConfig(), ap, 0.0, 10.0, busy_policy="queue")


def test_truncation_flag(ring_objective):
    tr = simulate(ring_objective, RunConfig(), ActivationProcess.equal(10, 1.0), 0.5, 1e6, max_events=50)
    assert tr.truncated


def test_groups_reject_overlap():
    g = _Groups(4)
    gid = g.open([0, 1])
    with pytest.raises(ConflictError):
        g.open([1, 2])
    g.release(gid, [1])
    g.open([1, 2])
    with pytest.raises(ConflictError):
        g.release(gid, [2])


def _busy_intervals(trace, objective, tau):
    """Reconstruct who was blocked when from the completed updates."""
    greedy = trace.rule in ("gs", "gsl")
    out = defaultdict(list)
    nb = [set(objective.coord_nodes[s].ravel()) - {i} for i, s in enumerate(objective.sets)]
    for k in np.flatnonzero(trace.updates):
        t, i, j, I = trace.sim_time[k], trace.node_i[k], trace.node_j[k], trace.inner_loops_I[k]
        final = tau * (1 + I)
        if greedy:
            start = t - final - tau
            for m in nb[i] - {j}:
                out[m].append((start, start + tau))
            out[i].append((start, t))
            out[j].append((start, t))
        else:
            out[i].append((t - final, t))
            out[j].append((t - final, t))
    return out


@pytest.mark.parametrize("alg", ["SU-CD", "SGS-CD", "SL-CD", "SGSeL-CD"])
@pytest.mark.parametrize("mode", ["equal", "zipf"])
def test_no_overlapping_updates(ring_objective, alg, mode):
    tau = 1.0
    ap = ActivationProcess.from_spec({"mode": mode, "kappa": 3.0}, 10, seed=2)
    tr = simulate(ring_objective, RunConfig.for_algorithm(alg, L0=10.0), ap, tau, 400.0, seed=1)
    assert tr.updates.sum() > 20
    for spans in _busy_intervals(tr, ring_objective, tau).values():
        spans.sort()
        for (_, e0), (s1, _) in zip(spans, spans[1:]):
            assert s1 >= e0 - 1e-9


def test_wait_policy_runs(ring_objective):
    tr = simulate(ring_objective, RunConfig(), ActivationProcess.equal(10, 1.0), 1.0, 200.0,
                  busy_policy="wait")
    assert np.any(tr.event == "wait") and tr.updates.sum() > 0
    assert communication_ledger(tr).consistent


@pytest.mark.parametrize("alg", list(ALGORITHMS))
def test_ledger_matches_table(ring_objective, alg):
    cfg = RunConfig.for_algorithm(alg, L0=5.0)
    tr = simulate(ring_objective, cfg, ActivationProcess.equal(10, 1.0), 0.5, 300.0, seed=4)
    mask = tr.updates
    sizes = ring_objective.set_sizes[tr.node_i[mask]]
    base = 2 if cfg.rule in ("uniform", "lipschitz") else sizes + 1
    expect = np.cumsum(base + 2 * tr.inner_loops_I[mask])
    np.testing.assert_array_equal(tr.vectors_tx_cum[mask], expect)
    assert communication_ledger(tr).consistent


def test_expected_vectors_formula():
    assert expected_vectors("uniform", "global", [3, 5], [0, 0]) == 4
    assert expected_vectors("gs", "global", [3, 5], [0, 0]) == 10
    assert expected_vectors("lipschitz", "estimated", [3, 5], [2, 1]) == 10
    assert expected_vectors("gsl", "estimated", [3, 5], [2, 1]) == 16


def test_deterministic_csv(tmp_path, ring_objective):
    ap = ActivationProcess.zipf(10, 4.0, seed=0)
    for name in ("a", "b"):
        simulate(ring_objective, RunConfig.for_algorithm("SGS-CD"), ap, 1.0, 100.0, seed=5).to_csv(
            tmp_path / f"{name}.csv")
    assert filecmp.cmp(tmp_path / "a.csv", tmp_path / "b.csv", shallow=False)


def test_tau_zero_rate_matches_iterations():
    from setwise_cd.analysis import fit_rate, reference_optimum
    topo = generate_regular(16, 4, 0)
    oracles = quadratic_network(16, 2, seed=1, c_big=10.0)
    obj = DualConsensusObjective(topo, oracles)
    ref = reference_optimum(oracles)
    cfg = RunConfig.for_algorithm("SU-CD", iterations=3000)
    it, _ = run_iterations(obj, cfg, ref)
    tr = simulate(obj, cfg, ActivationProcess.equal(16, 1.0), 0.0, 3000 / 16, ref)
    _, sub = tr.update_curve()
    r_it = fit_rate(it.dual_subopt, {"band": (0.3, 1e-4)}).rho
    r_tm = fit_rate(sub, {"band": (0.3, 1e-4)}).rho
    assert r_tm == pytest.approx(r_it, rel=0.25)
