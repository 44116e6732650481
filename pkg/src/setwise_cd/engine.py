"""Iteration-counting driver for the setwise coordinate-descent family.

One iteration: a node (set) is activated uniformly at random, picks one of
its coordinates with the configured rule and takes a coordinate step. The
activation and selection draws use separate random streams, so two runs
with the same seed see the same activation sequence whatever the rule.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .rules import (
    search_lipschitz_step,
    select_gs,
    select_gsl,
    select_lipschitz,
    select_uniform,
    state_block,
)

RULES = ("uniform", "gs", "lipschitz", "gsl")
STEPSIZES = ("global", "coordinate", "estimated")

# name -> (selection rule, stepsize policy)
ALGORITHMS = {
    "SU-CD": ("uniform", "global"),
    "SGS-CD": ("gs", "global"),
    "SL-CD": ("lipschitz", "coordinate"),
    "SGSL-CD": ("gsl", "coordinate"),
    "SeL-CD": ("lipschitz", "estimated"),
    "SGSeL-CD": ("gsl", "estimated"),
}

TRACE_COLUMNS = (
    "iteration",
    "F_value",
    "dual_subopt",
    "primal_subopt",
    "selected_coord",
    "vectors_tx_cum",
    "inner_loops_I",
    "consensus_residual",
)


@dataclass
class RunConfig:
    rule: str = "uniform"
    stepsize: str = "global"
    seed: int = 0
    iterations: int = 1000
    L0: float = 1.0
    name: str | None = None

    def __post_init__(self):
        if self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")
        if self.stepsize not in STEPSIZES:
            raise ValueError(f"unknown stepsize policy {self.stepsize!r}")
        if self.L0 <= 0:
            raise ValueError("L0 must be positive")
        if self.name is None:
            self.name = next(
                (k for k, v in ALGORITHMS.items() if v == (self.rule, self.stepsize)),
                f"{self.rule}/{self.stepsize}",
            )

    @classmethod
    def for_algorithm(cls, name: str, **kwargs) -> "RunConfig":
        rule, stepsize = ALGORITHMS[name]
        return cls(rule=rule, stepsize=stepsize, name=name, **kwargs)

    def streams(self):
        """``(activation_rng, selection_rng)`` derived from the seed."""
        act, sel = np.random.SeedSequence(self.seed).spawn(2)
        return np.random.default_rng(act), np.random.default_rng(sel)


@dataclass
class Reference:
    """Optimal values used to turn objective values into suboptimalities."""

    F_star: float
    primal_star: float = np.nan
    theta_star: np.ndarray | None = None


@dataclass
class Trace:
    name: str
    iteration: np.ndarray
    F_value: np.ndarray
    dual_subopt: np.ndarray
    primal_subopt: np.ndarray
    selected_coord: np.ndarray
    vectors_tx_cum: np.ndarray
    inner_loops_I: np.ndarray
    consensus_residual: np.ndarray
    node: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return self.iteration.size

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TRACE_COLUMNS)
            for row in zip(*(getattr(self, c) for c in TRACE_COLUMNS)):
                writer.writerow(_fmt(v) for v in row)


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


class StepPolicy:
    """Selection plus stepsize for one run; shared by the timed simulator."""

    def __init__(self, objective, config: RunConfig, state):
        self.objective = objective
        self.config = config
        self.rule = config.rule
        self.stepsize = config.stepsize
        exact = objective.coord_lipschitz(state)
        if self.stepsize == "estimated":
            self.L_hat = np.full(objective.num_coords, float(config.L0))
        else:
            self.L_hat = None
            needs_exact = self.stepsize == "coordinate" or self.rule in ("lipschitz", "gsl")
            if needs_exact and exact is None:
                raise ValueError(
                    "exact coordinate constants are unknown for this problem; "
                    "use the estimated stepsize policy"
                )

    def constants(self, state):
        if self.L_hat is not None:
            return self.L_hat
        return self.objective.coord_lipschitz(state)

    def global_L(self, state):
        obj = self.objective
        return obj.global_lipschitz(state) if hasattr(obj, "global_lipschitz") else obj.L

    def select(self, state, i, rng) -> int:
        cands = self.objective.sets[i]
        if self.rule == "uniform":
            return int(cands[select_uniform(cands.size, rng)])
        if self.rule == "lipschitz":
            return int(cands[select_lipschitz(self.constants(state)[cands], rng)])
        norm_sq = self.objective.norm_sq_gradients(state, i)
        if self.rule == "gs":
            return int(cands[select_gs(norm_sq)])
        return int(cands[select_gsl(norm_sq, self.constants(state)[cands])])

    def plan(self, state, l):
        """New block for coordinate ``l`` and the estimator loop count, without
        touching ``state``. The block is ``None`` when no move is made."""
        if self.stepsize == "estimated":
            self.L_hat[l], count, block = search_lipschitz_step(
                self.objective, state, l, self.L_hat[l]
            )
            return block, count
        if self.stepsize == "global":
            eta = 1.0 / self.global_L(state)
        else:
            eta = 1.0 / self.objective.coord_lipschitz(state)[l]
        return state_block(state, l) - eta * self.objective.coord_gradient(state, l), 0

    def commit(self, state, l, block) -> None:
        if block is not None:
            self.objective.set_block(state, l, block)

    def step(self, state, l) -> int:
        """Update coordinate ``l`` in place; returns the estimator loop count."""
        block, count = self.plan(state, l)
        self.commit(state, l, block)
        return count

    def vectors(self, i, inner_loops) -> int:
        """Vectors transmitted by one update started at node ``i``."""
        base = 2 if self.rule in ("uniform", "lipschitz") else int(self.objective.set_sizes[i]) + 1
        return base + 2 * inner_loops


def run_iterations(objective, config: RunConfig, reference: Reference | None = None, state=None):
    """Run ``config.iterations`` setwise CD iterations and record every one.

    Row 0 of the trace is the initial point (``selected_coord = -1``).

    Returns
    -------
    trace : Trace
    state : final state
    """
    if state is None:
        state = objective.init_state()
    act_rng, sel_rng = config.streams()
    policy = StepPolicy(objective, config, state)
    K = int(config.iterations)
    F_star = reference.F_star if reference is not None else np.nan
    P_star = reference.primal_star if reference is not None else np.nan

    F = np.empty(K + 1)
    P = np.empty(K + 1)
    res = np.empty(K + 1)
    coord = np.full(K + 1, -1, dtype=np.int64)
    node = np.full(K + 1, -1, dtype=np.int64)
    vec = np.zeros(K + 1, dtype=np.int64)
    inner = np.zeros(K + 1, dtype=np.int64)
    F[0] = objective.value(state)
    P[0] = objective.primal_value(state)
    res[0] = objective.consensus_residual(state)
    sent = 0
    for k in range(1, K + 1):
        i = int(act_rng.integers(objective.n))
        l = policy.select(state, i, sel_rng)
        count = policy.step(state, l)
        sent += policy.vectors(i, count)
        node[k], coord[k], inner[k], vec[k] = i, l, count, sent
        F[k] = objective.value(state)
        P[k] = objective.primal_value(state)
        res[k] = objective.consensus_residual(state)
    trace = Trace(
        name=config.name,
        iteration=np.arange(K + 1),
        F_value=F,
        dual_subopt=F - F_star,
        primal_subopt=P - P_star,
        selected_coord=coord,
        vectors_tx_cum=vec,
        inner_loops_I=inner,
        consensus_residual=res,
        node=node,
    )
    return trace, state


def one_step_decrease(objective, state, l, eta) -> float:
    """``F(state) - F(state after a step of size eta on l)``, without mutating."""
    grad = objective.coord_gradient(state, l)
    blocks = state.lam if hasattr(state, "lam") else state.x
    _, value = objective.trial(state, l, blocks[l] - eta * grad)
    return objective.value(state) - value
