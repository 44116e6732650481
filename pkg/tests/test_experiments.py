import filecmp
import json

import numpy as np
import pytest

from setwise_cd.experiments import (
    PRESETS,
    ExperimentConfig,
    build_instance,
    build_topology,
    preset_configs,
    run_config,
    run_experiment,
)


def small_config(**kw):
    base = dict(
        name="small",
        topology={"kind": "regular", "n": 8, "degree": 3, "seed": 0},
        problem={"kind": "quadratic", "params": {"d": 2, "c_big": 10.0}, "seed": 1},
        algorithms=["SU-CD", "SGS-CD", "SGSeL-CD"],
        iterations=400,
        seeds=[0, 1],
        window={"band": (0.5, 1e-3)},
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        small_config(algorithms=["XX-CD"])
    with pytest.raises(ValueError):
        small_config(mode="timed")
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({**small_config().to_dict(), "colour": "red"})
    cfg = small_config()
    assert ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_build_topology_kinds(tmp_path):
    assert build_topology({"kind": "star", "leaves": 3}).n == 4
    assert build_topology({"n": 3, "edges": [[0, 1], [1, 2]]}).num_edges == 2
    assert build_topology({"kind": "erdos_renyi", "n": 10, "p": 0.5, "seed": 1}).n == 10
    build_topology({"kind": "cycle", "n": 5}).save(tmp_path / "c.json")
    assert build_topology({"kind": "file", "path": str(tmp_path / "c.json")}).num_edges == 5
    with pytest.raises(ValueError):
        build_topology({"kind": "torus", "n": 4})


def test_run_and_artifacts(tmp_path):
    case = run_experiment(small_config(), tmp_path)
    for name, res in case.algorithms.items():
        assert not res.failures and res.ledger_ok
        assert res.fit is not None and res.fit.rho > 0
        assert (tmp_path / f"small_{name}_seed1.csv").exists()
        assert (tmp_path / f"small_{name}_mean.csv").exists()
    assert case.certificate.ok


def test_replication_is_byte_identical(tmp_path):
    run_config(small_config(), tmp_path / "a")
    run_config(small_config(), tmp_path / "b")
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    match, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names, shallow=False)
    assert not mismatch and not errors and len(match) == len(names)


def test_failures_are_recorded_not_raised():
    cfg = small_config(problem={"kind": "logistic", "params": {"d": 2, "m": 10}, "seed": 0},
                       algorithms=["SL-CD", "SeL-CD"], iterations=50)
    report = run_config(cfg)
    case = report.cases["small"]
    assert len(case.algorithms["SL-CD"].failures) >= 2
    assert not case.algorithms["SeL-CD"].failures
    assert not report.checks["no run failures"] and not report.ok
    assert report.failures[0]["algorithm"] == "SL-CD"


def test_timed_config():
    cfg = small_config(mode="timed", algorithms=["SU-CD", "SGS-CD"],
                       timed={"activation": {"mode": "zipf", "kappa": 2.0}, "tau": 0.5,
                              "horizon": 200.0, "grid": 101})
    case = run_experiment(cfg)
    res = case.algorithms["SGS-CD"]
    assert res.x[-1] == 200.0 and res.mean_subopt.size == 101 and res.ledger_ok


def test_separable_instance():
    cfg = ExperimentConfig(
        name="par", algorithms=["SU-CD"], iterations=10,
        problem={"kind": "separable", "n_sets": 6, "set_size": 4, "exponent": 2,
                 "a": [1.0] * 12, "x0": {"fill": 1.0, "crafted": 100.0}, "offset": 1.0},
    )
    inst = build_instance(cfg)
    assert inst.reference.F_star == 1.0
    assert inst.x0[:3].tolist() == [100.0] * 3 and inst.x0[3] == 1.0


def test_presets_are_well_formed():
    expected = {"decen-quadratic-N8", "decen-quadratic-N12", "parallel-crafted-N8",
                "lls-p0.1", "lls-p0.5", "async-N16", "logistic-p0.1", "scaling-N8"}
    assert expected <= set(PRESETS)
    for name in PRESETS:
        for c in preset_configs(name, seeds=[7]):
            assert c.seeds == [7]
    with pytest.raises(KeyError):
        preset_configs("nope")


def test_summary_json(tmp_path):
    report = run_config(small_config(), tmp_path)
    data = json.loads((tmp_path / "small_summary.json").read_text())
    assert data["ok"] == report.ok
    assert set(data["cases"]["small"]["algorithms"]) == {"SU-CD", "SGS-CD", "SGSeL-CD"}
    assert np.isfinite(data["speedups"]["small"]["rho_SGS-CD/rho_SU"])
