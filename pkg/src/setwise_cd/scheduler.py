"""Discrete-event simulation of asynchronous setwise CD with blocking links.

Every node carries an exponential activation clock. A communication round
lasts ``tau`` time units and blocks every node taking part in it: blocked
nodes can neither start nor join another update. Updates involving disjoint
node groups proceed in parallel.

Event semantics
---------------
* An activation of a node that is busy or already waiting is dropped.
* ``uniform`` / ``lipschitz`` rules: the node picks a coordinate (a
  neighbour). If that neighbour is busy the activation is dropped
  (``busy_policy="drop"``) or the node waits for it (``"wait"``). Waiting
  nodes reserve nobody, themselves included, so they can still be picked as
  partners and no wait cycle can form. Otherwise
  both block for ``tau * (1 + I)`` and the update lands at completion.
* ``gs`` / ``gsl`` rules: the node waits, without reserving anyone, until no
  neighbour is busy. A gather round then blocks it and all neighbours for
  ``tau`` (``N_i * tau`` with ``sequential_gather``), after which the node
  and the chosen neighbour stay blocked for ``tau * (1 + I)``.

With ``tau = 0`` every activation completes on the spot, so the sequence of
updates follows the iteration-driven model.
"""

from __future__ import annotations

import csv
import heapq
from dataclasses import dataclass, field

import numpy as np

from .engine import Reference, RunConfig, StepPolicy

TIMED_COLUMNS = ("sim_time", "event", "node_i", "node_j", "F_value", "subopt", "vectors_tx_cum")
BUSY_POLICIES = ("drop", "wait")


class ConflictError(RuntimeError):
    """Two overlapping updates claimed the same node."""


@dataclass
class ActivationProcess:
    """Per-node exponential activation clocks.

    ``kappa[i]`` is the mean time between activations of node ``i``, so a
    smaller value means a faster node.
    """

    kappa: np.ndarray

    def __post_init__(self):
        self.kappa = np.asarray(self.kappa, dtype=float)
        if self.kappa.ndim != 1 or np.any(~(self.kappa > 0)) or np.any(~np.isfinite(self.kappa)):
            raise ValueError("activation intervals must be positive and finite")

    @classmethod
    def equal(cls, n, kappa) -> "ActivationProcess":
        return cls(np.full(n, float(kappa)))

    @classmethod
    def zipf(cls, n, kappa, seed, exponent=2.0) -> "ActivationProcess":
        """Zipf-distributed intervals rescaled to mean ``kappa``.

        Most draws are small, so most nodes are faster than ``kappa`` while a
        few are much slower.
        """
        rng = np.random.default_rng(seed)
        raw = rng.zipf(exponent, size=n).astype(float)
        return cls(raw * (float(kappa) / raw.mean()))

    @classmethod
    def from_spec(cls, spec, n, seed=0) -> "ActivationProcess":
        """``{"mode": "equal"|"zipf", "kappa": float}`` or a bare number."""
        if isinstance(spec, (int, float)):
            return cls.equal(n, spec)
        mode = spec.get("mode", "equal")
        if mode == "equal":
            return cls.equal(n, spec["kappa"])
        if mode == "zipf":
            return cls.zipf(n, spec["kappa"], spec.get("seed", seed), spec.get("exponent", 2.0))
        raise ValueError(f"unknown activation mode {mode!r}")

    @property
    def n(self) -> int:
        return self.kappa.size

    @property
    def rates(self) -> np.ndarray:
        return 1.0 / self.kappa

    def next_interval(self, i, rng) -> float:
        return float(rng.exponential(self.kappa[i]))


@dataclass
class TimedTrace:
    name: str
    sim_time: np.ndarray
    event: np.ndarray
    node_i: np.ndarray
    node_j: np.ndarray
    F_value: np.ndarray
    subopt: np.ndarray
    vectors_tx_cum: np.ndarray
    inner_loops_I: np.ndarray
    activations: np.ndarray
    horizon: float
    truncated: bool = False
    in_flight: int = 0
    rule: str = "uniform"
    stepsize: str = "global"
    set_sizes: np.ndarray = field(default=None, repr=False)

    def __len__(self):
        return self.sim_time.size

    @property
    def updates(self) -> np.ndarray:
        """Row mask of completed updates."""
        return self.event == "update"

    def update_curve(self):
        """``(sim_time, subopt)`` after each completed update, starting at ``t = 0``."""
        mask = self.updates.copy()
        mask[0] = True
        return self.sim_time[mask], self.subopt[mask]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(TIMED_COLUMNS)
            for row in zip(*(getattr(self, c) for c in TIMED_COLUMNS)):
                writer.writerow(_fmt(v) for v in row)


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


class _Groups:
    """Active update groups; enforces that busy nodes form disjoint groups."""

    def __init__(self, n):
        self.owner = np.full(n, -1, dtype=np.int64)
        self.members = {}
        self._next = 0

    def busy(self, i) -> bool:
        return self.owner[i] >= 0

    def open(self, nodes) -> int:
        nodes = list(nodes)
        if len(set(nodes)) != len(nodes) or np.any(self.owner[nodes] >= 0):
            raise ConflictError(f"nodes {nodes} overlap a running update")
        gid = self._next
        self._next += 1
        self.owner[nodes] = gid
        self.members[gid] = set(nodes)
        return gid

    def release(self, gid, nodes=None) -> None:
        nodes = self.members[gid] if nodes is None else set(nodes)
        for k in nodes:
            if self.owner[k] != gid:
                raise ConflictError(f"node {k} is not held by update {gid}")
            self.owner[k] = -1
        self.members[gid] -= nodes
        if not self.members[gid]:
            del self.members[gid]


def simulate(
    objective,
    config: RunConfig,
    activation: ActivationProcess,
    tau: float,
    horizon: float,
    reference: Reference | None = None,
    seed: int | None = None,
    busy_policy: str = "drop",
    sequential_gather: bool = False,
    max_events: int = 10_000_000,
    record_drops: bool = True,
    state=None,
) -> TimedTrace:
    """Run one timed simulation until ``horizon``.

    ``seed`` overrides ``config.seed``; ``state`` is the starting point
    (mutated in place). Stops early with ``truncated=True`` after
    ``max_events`` processed events.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if not horizon > 0:
        raise ValueError("horizon must be positive")
    if busy_policy not in BUSY_POLICIES:
        raise ValueError(f"busy_policy must be one of {BUSY_POLICIES}")
    if activation.n != objective.n:
        raise ValueError("activation process size differs from the number of nodes")
    if seed is not None:
        config = RunConfig(config.rule, config.stepsize, int(seed), config.iterations,
                           config.L0, config.name)
    act_rng, sel_rng = config.streams()
    if state is None:
        state = objective.init_state()
    policy = StepPolicy(objective, config, state)
    greedy = config.rule in ("gs", "gsl")
    F_star = reference.F_star if reference is not None else np.nan
    n = objective.n
    neighbours = [np.unique(objective.coord_nodes[s].ravel()) for s in objective.sets]
    neighbours = [nb[nb != i] for i, nb in enumerate(neighbours)]

    groups = _Groups(n)
    waiting = np.zeros(n, dtype=bool)
    wait_target = np.full(n, -1, dtype=np.int64)  # coordinate a "wait"-policy node wants
    activations = np.zeros(n, dtype=np.int64)

    rows = {c: [] for c in ("t", "ev", "i", "j", "F", "vec", "I")}
    F = objective.value(state)
    sent = 0

    def record(t, ev, i, j, count=0):
        rows["t"].append(t)
        rows["ev"].append(ev)
        rows["i"].append(i)
        rows["j"].append(j)
        rows["F"].append(F)
        rows["vec"].append(sent)
        rows["I"].append(count)

    record(0.0, "start", -1, -1)

    heap = []
    seq = 0

    def push(t, kind, payload):
        nonlocal seq
        heapq.heappush(heap, (t, seq, kind, payload))
        seq += 1

    for i in range(n):
        push(activation.next_interval(i, act_rng), "activate", i)

    def other_end(l, i):
        a, b = objective.coord_nodes[l]
        return int(b if a == i else a)

    def start_pair(t, i, l, gather_nodes=()):
        """Block ``i``, its partner and (for greedy rules) the gather group."""
        nonlocal F, sent
        j = other_end(l, i)
        block, count = policy.plan(state, l)
        gather = tau * (len(neighbours[i]) if sequential_gather else 1) if greedy else 0.0
        final = tau * (1 + count)
        gid = groups.open([i, *gather_nodes] if greedy else [i, j])
        if greedy and gather > 0:
            push(t + gather, "release", (gid, tuple(k for k in gather_nodes if k != j)))
        finish = (i, j, l, block, count, gid)
        if gather + final == 0:
            complete(t, finish)
        else:
            push(t + gather + final, "complete", finish)

    def complete(t, payload):
        nonlocal F, sent
        i, j, l, block, count, gid = payload
        policy.commit(state, l, block)
        groups.release(gid)
        F = objective.value(state)
        sent += policy.vectors(i, count)
        record(t, "update", i, j, count)

    def try_waiting(t):
        # nodes that became free may unblock waiting ones; lowest index first
        progressed = True
        while progressed:
            progressed = False
            for i in np.flatnonzero(waiting):
                if groups.busy(i):
                    continue
                if greedy:
                    nb = neighbours[i]
                    if np.any(groups.owner[nb] >= 0):
                        continue
                    waiting[i] = False
                    l = policy.select(state, i, sel_rng)
                    start_pair(t, i, l, gather_nodes=nb.tolist())
                else:
                    l = int(wait_target[i])
                    if groups.busy(other_end(l, i)):
                        continue
                    waiting[i] = False
                    wait_target[i] = -1
                    start_pair(t, i, l)
                progressed = True

    events = 0
    truncated = False
    while heap:
        t, _, kind, payload = heap[0]
        if t > horizon:
            break
        if events >= max_events:
            truncated = True
            break
        heapq.heappop(heap)
        events += 1
        if kind == "activate":
            i = payload
            activations[i] += 1
            push(t + activation.next_interval(i, act_rng), "activate", i)
            if groups.busy(i) or waiting[i]:
                if record_drops:
                    record(t, "drop", i, -1)
                continue
            if greedy:
                waiting[i] = True
                try_waiting(t)
                if waiting[i]:
                    record(t, "wait", i, -1)
                continue
            l = policy.select(state, i, sel_rng)
            j = other_end(l, i)
            if groups.busy(j):
                if busy_policy == "wait":
                    waiting[i] = True
                    wait_target[i] = l
                    record(t, "wait", i, j)
                elif record_drops:
                    record(t, "drop", i, j)
                continue
            start_pair(t, i, l)
        elif kind == "release":
            gid, nodes = payload
            groups.release(gid, nodes)
            try_waiting(t)
        else:
            complete(t, payload)
            try_waiting(t)

    F_arr = np.asarray(rows["F"], dtype=float)
    return TimedTrace(
        name=config.name,
        sim_time=np.asarray(rows["t"], dtype=float),
        event=np.asarray(rows["ev"], dtype=object),
        node_i=np.asarray(rows["i"], dtype=np.int64),
        node_j=np.asarray(rows["j"], dtype=np.int64),
        F_value=F_arr,
        subopt=F_arr - F_star,
        vectors_tx_cum=np.asarray(rows["vec"], dtype=np.int64),
        inner_loops_I=np.asarray(rows["I"], dtype=np.int64),
        activations=activations,
        horizon=float(horizon),
        truncated=truncated,
        in_flight=len(groups.members),
        rule=config.rule,
        stepsize=config.stepsize,
        set_sizes=np.asarray(objective.set_sizes),
    )


@dataclass
class CommunicationLedger:
    updates: int
    vectors: int
    expected_vectors: int
    per_node_updates: np.ndarray

    @property
    def consistent(self) -> bool:
        return self.vectors == self.expected_vectors


def expected_vectors(rule, stepsize, node_sizes, inner_loops) -> int:
    """Vector count of a sequence of updates from the per-update formulas.

    ``node_sizes`` holds ``N_i`` of each update's initiating node and
    ``inner_loops`` its estimator loop count ``I`` (zero unless estimated).
    """
    node_sizes = np.asarray(node_sizes, dtype=np.int64)
    inner = np.asarray(inner_loops, dtype=np.int64)
    base = np.full(node_sizes.size, 2) if rule in ("uniform", "lipschitz") else node_sizes + 1
    extra = 2 * inner if stepsize == "estimated" else 0 * inner
    return int(np.sum(base + extra))


def communication_ledger(trace) -> CommunicationLedger:
    """Totals of transmitted vectors for a timed or iteration trace."""
    if isinstance(trace, TimedTrace):
        mask = trace.updates
        nodes = trace.node_i[mask]
        inner = trace.inner_loops_I[mask]
        sizes = trace.set_sizes
        rule, stepsize = trace.rule, trace.stepsize
        n = sizes.size
    else:
        raise TypeError("communication_ledger expects a TimedTrace; use iteration_ledger")
    total = int(trace.vectors_tx_cum[-1])
    return CommunicationLedger(
        updates=int(mask.sum()),
        vectors=total,
        expected_vectors=expected_vectors(rule, stepsize, sizes[nodes], inner),
        per_node_updates=np.bincount(nodes, minlength=n),
    )


def iteration_ledger(trace, objective, config: RunConfig) -> CommunicationLedger:
    """Same totals for an iteration-driven :class:`~setwise_cd.engine.Trace`."""
    nodes = trace.node[1:]
    inner = trace.inner_loops_I[1:]
    return CommunicationLedger(
        updates=int(nodes.size),
        vectors=int(trace.vectors_tx_cum[-1]),
        expected_vectors=expected_vectors(config.rule, config.stepsize,
                                          objective.set_sizes[nodes], inner),
        per_node_updates=np.bincount(nodes, minlength=objective.n),
    )
