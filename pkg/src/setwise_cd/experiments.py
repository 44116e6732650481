"""Configuration-driven experiments and the built-in presets.

An :class:`ExperimentConfig` names a topology (or a parallel coordinate
layout), a problem, a list of algorithms and a run mode. Running it over a
seed list gives per-algorithm suboptimality curves averaged in log space,
fitted contraction rates and optional CSV artifacts. Presets bundle one or
more configurations with the checks that their results should pass.
"""

from __future__ import annotations

import json
import traceback
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .analysis import DEFAULT_WINDOW, fit_rate, geometric_mean_trace, reference_optimum
from .engine import ALGORITHMS, Reference, RunConfig, run_iterations
from .norms import certificate_for
from .objectives import DualConsensusObjective, double_cover_sets, make_parallel_objective
from .problems import make_separable, problem_from_spec
from .scheduler import (
    ActivationProcess,
    communication_ledger,
    iteration_ledger,
    simulate,
)
from .topology import (
    Topology,
    complete_graph,
    cycle_graph,
    generate_erdos_renyi,
    generate_regular,
    path_graph,
    star_graph,
)

MODES = ("iterations", "timed")


# ---------------------------------------------------------------------------
# Configuration


@dataclass
class ExperimentConfig:
    """One experiment: a problem instance, algorithms, budget and seeds.

    ``topology`` is ``None`` for parallel (separable) problems, whose
    coordinate sets come from the problem spec. ``timed`` holds
    ``{"activation": spec, "tau": float, "horizon": float, "grid": int,
    "busy_policy": "drop"|"wait", "sequential_gather": bool}``.
    """

    name: str
    problem: dict
    algorithms: list
    topology: dict | None = None
    mode: str = "iterations"
    iterations: int = 1000
    seeds: list = field(default_factory=lambda: [0])
    window: object = DEFAULT_WINDOW
    L0: float = 1.0
    timed: dict | None = None
    output: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}")
        if self.mode == "timed" and not self.timed:
            raise ValueError("timed mode needs a 'timed' section")
        self.seeds = [int(s) for s in self.seeds]
        self.window = _window(self.window)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        d = asdict(self)
        d["window"] = _window_json(self.window)
        return d


def _window(w):
    if isinstance(w, dict):
        hi, lo = w["band"]
        return {"band": (float(hi), float(lo))}
    lo, hi = w
    return (float(lo), float(hi))


def _window_json(w):
    return {"band": list(w["band"])} if isinstance(w, dict) else list(w)


# ---------------------------------------------------------------------------
# Instance construction


def build_topology(spec) -> Topology:
    """Topology from ``{"kind": ..., ...}`` or ``{"n", "edges"}``."""
    if "edges" in spec:
        return Topology.from_dict(spec)
    kind = spec["kind"]
    if kind == "regular":
        return generate_regular(spec["n"], spec["degree"], spec.get("seed", 0))
    if kind == "erdos_renyi":
        return generate_erdos_renyi(spec["n"], spec["p"], spec.get("seed", 0))
    if kind == "file":
        return Topology.load(spec["path"])
    simple = {"path": path_graph, "cycle": cycle_graph, "complete": complete_graph}
    if kind in simple:
        return simple[kind](spec["n"])
    if kind == "star":
        return star_graph(spec["leaves"])
    raise ValueError(f"unknown topology kind {kind!r}")


def _coefficients(spec, size, rng):
    if isinstance(spec, (list, tuple)):
        a = np.asarray(spec, dtype=float)
        if a.size != size:
            raise ValueError("coefficient list length differs from the problem size")
        return a
    dist = spec.get("dist", "normal")
    if dist == "normal":
        a = rng.normal(spec.get("mean", 10.0), spec.get("std", 3.0), size)
        return np.clip(a, spec.get("clip", 1.0), None)
    if dist == "randint":
        return rng.integers(spec.get("low", 1), spec.get("high", 100) + 1, size).astype(float)
    raise ValueError(f"unknown coefficient distribution {dist!r}")


def _separable_instance(spec):
    """Parallel problem: coefficients, coordinate sets and starting point."""
    rng = np.random.default_rng(spec.get("seed", 0))
    n_sets, set_size = int(spec["n_sets"]), int(spec["set_size"])
    size = n_sets * set_size // 2
    a = _coefficients(spec.get("a", {}), size, rng)
    primal = make_separable(a, spec.get("exponent", 2), spec.get("offset", 1.0))
    sets = double_cover_sets(n_sets, set_size, size)
    x0 = spec.get("x0", {"fill": 1.0})
    if isinstance(x0, dict):
        start = np.full(size, float(x0.get("fill", 1.0)))
        if "crafted" in x0:
            # one far coordinate per set: the matching that opens the layout
            start[: n_sets // 2] = float(x0["crafted"])
    else:
        start = np.asarray(x0, dtype=float)
    return make_parallel_objective(primal, sets), start


@dataclass
class Instance:
    objective: object
    reference: Reference
    x0: np.ndarray | None = None

    def fresh_state(self):
        obj = self.objective
        return obj.init_state() if self.x0 is None else obj.init_state(self.x0)


def build_instance(config: ExperimentConfig) -> Instance:
    prob = config.problem
    if prob["kind"] == "separable":
        obj, x0 = _separable_instance(prob)
        # the separable optimum is x = 0 with value equal to the offset
        return Instance(obj, Reference(F_star=obj.primal.offset, primal_star=obj.primal.offset), x0)
    if config.topology is None:
        raise ValueError("decentralized problems need a topology")
    topo = build_topology(config.topology)
    oracles = problem_from_spec(prob, topo.n)
    return Instance(DualConsensusObjective(topo, oracles), reference_optimum(oracles))


# ---------------------------------------------------------------------------
# Running


@dataclass
class AlgorithmResult:
    name: str
    x: np.ndarray
    mean_subopt: np.ndarray
    fit: object = None
    per_seed: dict = field(default_factory=dict)
    ledger_ok: bool = True
    failures: list = field(default_factory=list)

    def summary(self) -> dict:
        out = {"seeds_ok": len(self.per_seed), "ledger_ok": self.ledger_ok,
               "failures": self.failures}
        if self.fit is not None:
            out.update(rho=self.fit.rho, reduction_factor=self.fit.reduction_factor,
                       r2=self.fit.r2, window_start=self.fit.start, window_stop=self.fit.stop)
        return out


@dataclass
class CaseResult:
    config: ExperimentConfig
    algorithms: dict
    certificate: object = None

    def rho(self, name) -> float:
        fit = self.algorithms[name].fit
        return np.nan if fit is None else fit.rho

    def speedup(self, fast, slow) -> float:
        return self.rho(fast) / self.rho(slow)

    def summary(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "algorithms": {k: v.summary() for k, v in self.algorithms.items()},
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


def _floor(reference):
    return 1e-13 * max(abs(reference.F_star), 1.0)


def _write_curve(path, x, y, xname):
    with open(path, "w") as fh:
        fh.write(f"{xname},subopt\n")
        for a, b in zip(x, y):
            fh.write(f"{format(float(a), '.17g')},{format(float(b), '.17g')}\n")


def run_experiment(config: ExperimentConfig, out=None, instance: Instance | None = None) -> CaseResult:
    """Run every algorithm over every seed; failures are recorded per seed."""
    inst = build_instance(config) if instance is None else instance
    obj, ref = inst.objective, inst.reference
    floor = _floor(ref)
    out = Path(out) if out is not None else (Path(config.output) if config.output else None)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    results = {}
    for name in config.algorithms:
        per_seed, failures, ledger_ok = {}, [], True
        grid = None
        if config.mode == "timed":
            grid = np.linspace(0.0, float(config.timed["horizon"]),
                               int(config.timed.get("grid", 2001)))
        for seed in config.seeds:
            run_cfg = RunConfig.for_algorithm(name, seed=seed, iterations=config.iterations,
                                              L0=config.L0)
            try:
                if config.mode == "iterations":
                    trace, _ = run_iterations(obj, run_cfg, ref, state=inst.fresh_state())
                    curve = trace.dual_subopt
                    ledger_ok &= iteration_ledger(trace, obj, run_cfg).consistent
                    if out is not None:
                        trace.to_csv(out / f"{config.name}_{name}_seed{seed}.csv")
                else:
                    t = config.timed
                    act = ActivationProcess.from_spec(t["activation"], obj.n, seed=seed)
                    trace = simulate(obj, run_cfg, act, float(t["tau"]), float(t["horizon"]),
                                     ref, busy_policy=t.get("busy_policy", "drop"),
                                     sequential_gather=bool(t.get("sequential_gather", False)),
                                     record_drops=bool(t.get("record_drops", False)),
                                     state=inst.fresh_state())
                    times, sub = trace.update_curve()
                    curve = sub[np.searchsorted(times, grid, side="right") - 1]
                    ledger_ok &= communication_ledger(trace).consistent
                    if out is not None:
                        trace.to_csv(out / f"{config.name}_{name}_seed{seed}.csv")
                per_seed[seed] = np.asarray(curve, dtype=float)
            except Exception as exc:  # recorded, the sweep goes on
                failures.append({"seed": seed, "error": f"{type(exc).__name__}: {exc}",
                                 "trace": traceback.format_exc(limit=3)})
        if per_seed:
            mean = geometric_mean_trace([np.clip(c, floor, None) for c in per_seed.values()])
            x = grid if grid is not None else np.arange(mean.size, dtype=float)
            try:
                fit = fit_rate(mean, config.window, x=x, floor=floor)
            except ValueError as exc:
                fit = None
                failures.append({"seed": None, "error": f"rate fit: {exc}"})
            if out is not None:
                _write_curve(out / f"{config.name}_{name}_mean.csv", x, mean,
                             "sim_time" if grid is not None else "iteration")
        else:
            mean, x, fit = np.array([]), np.array([]), None
        results[name] = AlgorithmResult(name, x, mean, fit, per_seed, bool(ledger_ok), failures)
    cert = certificate_for(obj) if isinstance(obj, DualConsensusObjective) else None
    return CaseResult(config, results, cert)


# ---------------------------------------------------------------------------
# Reports


@dataclass
class SummaryReport:
    """Fitted rates, speedups, certificates and check flags for one preset."""

    name: str
    seeds: list
    cases: dict
    speedups: dict
    checks: dict
    metrics: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list:
        out = []
        for label, case in self.cases.items():
            for alg, res in case.algorithms.items():
                out += [{"case": label, "algorithm": alg, **f} for f in res.failures]
        return out

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seeds": self.seeds,
            "ok": self.ok,
            "checks": self.checks,
            "speedups": self.speedups,
            "metrics": self.metrics,
            "cases": {k: v.summary() for k, v in self.cases.items()},
        }

    def to_json(self, path=None) -> str:
        text = json.dumps(_jsonable(self.to_dict()), indent=2)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if np.isfinite(v) else None
    return v


def _no_failures(cases):
    return all(not r.failures for c in cases.values() for r in c.algorithms.values())


def _ledgers(cases):
    return all(r.ledger_ok for c in cases.values() for r in c.algorithms.values())


# ---------------------------------------------------------------------------
# Presets


def _decen_quadratic(degree, n=32, iterations=20000):
    return ExperimentConfig(
        name=f"decen-quadratic-n{n}-N{degree}",
        topology={"kind": "regular", "n": n, "degree": degree, "seed": 0},
        problem={"kind": "quadratic", "params": {"d": 5, "c_big": 100.0}, "seed": 1},
        algorithms=["SU-CD", "SGS-CD"],
        iterations=iterations,
        seeds=[0, 1, 2, 3],
        window={"band": (1e-1, 1e-8)},
    )


def _parallel_crafted(n_sets, set_size):
    return ExperimentConfig(
        name=f"parallel-crafted-N{set_size}",
        problem={"kind": "separable", "n_sets": n_sets, "set_size": set_size, "exponent": 2,
                 "a": {"dist": "normal", "mean": 10.0, "std": 3.0, "clip": 1.0},
                 "x0": {"fill": 1.0, "crafted": 100.0}, "offset": 1.0, "seed": 0},
        algorithms=["SU-CD", "SGS-CD"],
        iterations=800,
        seeds=list(range(40)),
        window={"band": (0.5, 1e-2)},
    )


def _parallel_sl_sel(exponent):
    label = "quadratic" if exponent == 2 else "quartic"
    return ExperimentConfig(
        name=f"parallel-sl-vs-sel-{label}",
        problem={"kind": "separable", "n_sets": 12, "set_size": 8, "exponent": exponent,
                 "a": {"dist": "randint", "low": 1, "high": 100},
                 "x0": {"fill": 1.0}, "offset": 1.0, "seed": 0},
        algorithms=["SL-CD", "SeL-CD"],
        iterations=1500,
        seeds=list(range(10)),
        window=(0.1, 0.9),
        L0=100.0,
    )


def _lls(p):
    return ExperimentConfig(
        name=f"lls-p{p}",
        topology={"kind": "erdos_renyi", "n": 32, "p": p, "seed": 0},
        problem={"kind": "lls", "params": {"d": 5, "m": 30}, "seed": 0},
        algorithms=list(ALGORITHMS),
        iterations=8000,
        seeds=[0, 1, 2, 3, 4],
        window={"band": (0.3, 1e-3)},
    )


def _logistic(p):
    return ExperimentConfig(
        name=f"logistic-p{p}",
        topology={"kind": "erdos_renyi", "n": 32, "p": p, "seed": 0},
        problem={"kind": "logistic", "params": {"d": 5, "m": 30, "c": 0.1}, "seed": 0},
        algorithms=["SeL-CD", "SGSeL-CD"],
        iterations=3000,
        seeds=[0, 1, 2],
        window={"band": (0.3, 1e-4)},
    )


def _async(kappa, tau, mode, horizon=3000.0):
    return ExperimentConfig(
        name=f"async-N16-k{kappa}-t{tau}-{mode}",
        topology={"kind": "regular", "n": 32, "degree": 16, "seed": 0},
        problem={"kind": "quadratic", "params": {"d": 5, "c_big": 100.0}, "seed": 1},
        algorithms=["SU-CD", "SGS-CD"],
        mode="timed",
        seeds=[0, 1],
        window={"band": (1e-1, 1e-4)},
        timed={"activation": {"mode": mode, "kappa": kappa, "seed": 0}, "tau": tau,
               "horizon": horizon, "grid": 2001},
    )


def _checks_decen(cases, pairs):
    checks, speed, metrics = {}, {}, {}
    for label, case in cases.items():
        cert = case.certificate
        ratio = case.speedup("SGS-CD", "SU-CD")
        speed[label] = {"rho_G/rho_U": ratio}
        metrics[label] = {"su_bound": cert.su_factor, "N_max": cert.N_max}
        checks[f"{label}: rho_U >= 0.95 * SU bound"] = case.rho("SU-CD") >= 0.95 * cert.su_factor
        checks[f"{label}: 1 <= rho_G/rho_U <= N_max"] = 1.0 <= ratio <= cert.N_max
        checks[f"{label}: certificate consistent"] = cert.ok
    for lo, hi in pairs:
        checks[f"speedup grows with N_max ({lo} -> {hi})"] = (
            cases[hi].speedup("SGS-CD", "SU-CD") > cases[lo].speedup("SGS-CD", "SU-CD"))
    return checks, speed, metrics


def _checks_parallel_crafted(cases, set_size):
    (label, case), = cases.items()
    ratio = case.speedup("SGS-CD", "SU-CD")
    checks = {f"{label}: 0.8 N_max <= rho_G/rho_U <= N_max": 0.8 * set_size <= ratio <= set_size}
    return checks, {label: {"rho_G/rho_U": ratio}}, {label: {"N_max": set_size}}


def _mean_log(res):
    return float(np.mean(np.log(res.mean_subopt)))


def _checks_sl_sel(cases, exponent):
    (label, case), = cases.items()
    sl, sel = case.algorithms["SL-CD"], case.algorithms["SeL-CD"]
    metrics = {label: {"mean_log_subopt": {"SL-CD": _mean_log(sl), "SeL-CD": _mean_log(sel)},
                       "final_subopt": {"SL-CD": float(sl.mean_subopt[-1]),
                                        "SeL-CD": float(sel.mean_subopt[-1])}}}
    if exponent == 2:
        check = {f"{label}: exact constants win": _mean_log(sl) < _mean_log(sel)}
    else:
        check = {f"{label}: estimated constants win": _mean_log(sel) < _mean_log(sl)}
    return check, {}, metrics


def _checks_lls(cases, eps=0.05):
    checks, speed = {}, {}
    for label, case in cases.items():
        r = {a: case.rho(a) for a in case.algorithms}
        speed[label] = {"rho_SGS/rho_SU": r["SGS-CD"] / r["SU-CD"],
                        "rho_SL/rho_SU": r["SL-CD"] / r["SU-CD"],
                        "rho_SGSL/rho_SU": r["SGSL-CD"] / r["SU-CD"]}
        checks[f"{label}: rho_SL >= rho_SU (5%)"] = r["SL-CD"] >= (1 - eps) * r["SU-CD"]
        checks[f"{label}: rho_SGS >= rho_SU (5%)"] = r["SGS-CD"] >= (1 - eps) * r["SU-CD"]
        checks[f"{label}: rho_SGSL >= max(rho_SGS, rho_SL) (5%)"] = (
            r["SGSL-CD"] >= (1 - eps) * max(r["SGS-CD"], r["SL-CD"]))
        checks[f"{label}: certificate consistent"] = case.certificate.ok
    return checks, speed, {}


def _checks_logistic(cases):
    checks, speed, metrics = {}, {}, {}
    for label, case in cases.items():
        fits = {a: case.algorithms[a].fit for a in case.algorithms}
        for a, f in fits.items():
            checks[f"{label}: {a} linear (R^2 >= 0.95)"] = f is not None and f.r2 >= 0.95
        speed[label] = {"rho_SGSeL/rho_SeL": case.speedup("SGSeL-CD", "SeL-CD")}
        checks[f"{label}: rho_SGSeL >= rho_SeL"] = case.rho("SGSeL-CD") >= case.rho("SeL-CD")
        metrics[label] = {a: {"r2": None if f is None else f.r2} for a, f in fits.items()}
    return checks, speed, metrics


ASYNC_GRID = [(10, 0.0, "equal"), (5, 0.0, "equal"), (10, 1.0, "equal"),
              (5, 1.0, "equal"), (10, 1.0, "zipf"), (5, 1.0, "zipf")]


def _checks_async(cases):
    s = {k: c.speedup("SGS-CD", "SU-CD") for k, c in cases.items()}
    key = {(k_, t, m): f"async-N16-k{k_}-t{t}-{m}" for k_, t, m in ASYNC_GRID}
    checks = {}
    for kappa in (10, 5):
        zero, one, zipf = (s[key[(kappa, 0.0, "equal")]], s[key[(kappa, 1.0, "equal")]],
                           s[key[(kappa, 1.0, "zipf")]])
        checks[f"kappa={kappa}: speedup(tau=1) <= speedup(tau=0)"] = one <= zero
        checks[f"kappa={kappa}: speedup(zipf) <= speedup(equal), tau=1"] = zipf <= one
    checks["tau=1: faster activations shrink the speedup"] = (
        s[key[(5, 1.0, "equal")]] <= s[key[(10, 1.0, "equal")]])
    return checks, {k: {"rho_G/rho_U (time)": v} for k, v in s.items()}, {}


PRESETS = {
    "decen-quadratic-N8": (lambda: [_decen_quadratic(8)], lambda c: _checks_decen(c, [])),
    "decen-quadratic-N12": (lambda: [_decen_quadratic(12)], lambda c: _checks_decen(c, [])),
    "decen-quadratic": (
        lambda: [_decen_quadratic(8), _decen_quadratic(12)],
        lambda c: _checks_decen(c, [("decen-quadratic-n32-N8", "decen-quadratic-n32-N12")]),
    ),
    "scaling-N8": (
        lambda: [_decen_quadratic(8, n, 20000 * n // 32) for n in (16, 32, 64)],
        lambda c: _checks_scaling(c),
    ),
    "parallel-crafted-N8": (lambda: [_parallel_crafted(12, 8)],
                            lambda c: _checks_parallel_crafted(c, 8)),
    "parallel-crafted-N4": (lambda: [_parallel_crafted(24, 4)],
                            lambda c: _checks_parallel_crafted(c, 4)),
    "parallel-sl-vs-sel-quadratic": (lambda: [_parallel_sl_sel(2)],
                                     lambda c: _checks_sl_sel(c, 2)),
    "parallel-sl-vs-sel-quartic": (lambda: [_parallel_sl_sel(4)],
                                   lambda c: _checks_sl_sel(c, 4)),
    "lls-p0.1": (lambda: [_lls(0.1)], _checks_lls),
    "lls-p0.5": (lambda: [_lls(0.5)], _checks_lls),
    "async-N16": (lambda: [_async(*g) for g in ASYNC_GRID], _checks_async),
    "logistic-p0.1": (lambda: [_logistic(0.1)], _checks_logistic),
    "logistic-p0.5": (lambda: [_logistic(0.5)], _checks_logistic),
}


def _checks_scaling(cases):
    checks, speed, metrics = _checks_decen(cases, [])
    ratios = [v["rho_G/rho_U"] for v in speed.values()]
    metrics["speedup_spread"] = max(ratios) / min(ratios)
    return checks, speed, metrics


def preset_configs(name, seeds=None) -> list:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    configs = PRESETS[name][0]()
    if seeds is not None:
        for c in configs:
            c.seeds = [int(s) for s in seeds]
    return configs


def run_preset(name, seeds=None, out=None) -> SummaryReport:
    """Run a preset and evaluate its checks.

    ``seeds`` replaces every configuration's seed list; ``out`` receives the
    per-run CSV traces, averaged curves and ``<name>_summary.json``.
    """
    configs = preset_configs(name, seeds)
    out = Path(out) if out is not None else None
    cases = {c.name: run_experiment(c, out) for c in configs}
    return _report(name, cases, PRESETS[name][1], out)


def run_config(config: ExperimentConfig, out=None) -> SummaryReport:
    """Run a user configuration; checks cover failures, ledgers and certificates."""
    out = Path(out) if out is not None else (Path(config.output) if config.output else None)
    cases = {config.name: run_experiment(config, out)}

    def checks(c):
        case = c[config.name]
        flags, speed = {}, {}
        if case.certificate is not None:
            flags[f"{config.name}: certificate consistent"] = case.certificate.ok
        if "SU-CD" in case.algorithms:
            for other in case.algorithms:
                if other != "SU-CD":
                    speed[f"rho_{other}/rho_SU"] = case.speedup(other, "SU-CD")
        return flags, {config.name: speed}, {}

    return _report(config.name, cases, checks, out)


def _report(name, cases, check_fn, out):
    try:
        checks, speed, metrics = check_fn(cases)
    except Exception as exc:  # e.g. a missing fit after failed seeds
        checks, speed, metrics = {f"checks evaluated ({exc})": False}, {}, {}
    checks = {k: bool(v) for k, v in checks.items()}
    checks["no run failures"] = _no_failures(cases)
    checks["communication ledger matches per-update formulas"] = _ledgers(cases)
    seeds = sorted({s for c in cases.values() for s in c.config.seeds})
    report = SummaryReport(name, seeds, cases, speed, checks, metrics)
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        report.to_json(out / f"{name}_summary.json")
    return report
