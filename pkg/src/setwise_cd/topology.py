"""Communication graphs: incidence structure, Laplacian spectrum, dual constants.

Edges are stored as ``(i, j)`` pairs with ``i < j``. The incidence matrix
carries ``+1`` at the lower-index endpoint and ``-1`` at the other one, so
the coordinate gradient of an edge is ``g_i - g_j``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

ZERO_EIG_THRESHOLD = 1e-10
MAX_GRAPH_RETRIES = 1000


class TopologyError(ValueError):
    """Raised for malformed or disconnected graphs."""


@dataclass(frozen=True)
class Topology:
    """Undirected connected graph with a fixed edge order.

    Parameters
    ----------
    n : int
        Number of nodes, labelled ``0..n-1``.
    edges : sequence of (int, int)
        Edge list. Each pair is normalised to ``(min, max)``; the position
        in the list is the edge (coordinate) index.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    node_sets: tuple[np.ndarray, ...] = field(init=False, repr=False, compare=False)

    def __init__(self, n, edges):
        n = int(n)
        if n < 2:
            raise TopologyError("a topology needs at least two nodes")
        norm = []
        seen = set()
        for e in edges:
            i, j = (int(v) for v in e)
            if i == j:
                raise TopologyError(f"self-loop at node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise TopologyError(f"edge ({i}, {j}) out of range for n={n}")
            pair = (min(i, j), max(i, j))
            if pair in seen:
                raise TopologyError(f"duplicate edge {pair}")
            seen.add(pair)
            norm.append(pair)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(norm))
        sets = [[] for _ in range(n)]
        for idx, (i, j) in enumerate(norm):
            sets[i].append(idx)
            sets[j].append(idx)
        object.__setattr__(
            self, "node_sets", tuple(np.asarray(s, dtype=np.intp) for s in sets)
        )
        if not _is_connected(n, norm):
            raise TopologyError("graph is not connected")

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(s) for s in self.node_sets], dtype=int)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max())

    @property
    def edge_array(self) -> np.ndarray:
        """``(E, 2)`` integer array of endpoints."""
        return np.asarray(self.edges, dtype=np.intp).reshape(-1, 2)

    def neighbors(self, i: int) -> np.ndarray:
        ends = self.edge_array[self.node_sets[i]]
        return np.where(ends[:, 0] == i, ends[:, 1], ends[:, 0])

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, data: dict) -> "Topology":
        return cls(data["n"], [tuple(e) for e in data["edges"]])

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "Topology":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class SpectralSummary:
    gamma_max: float
    gamma_min_plus: float


def _is_connected(n, edges) -> bool:
    adj = [[] for _ in range(n)]
    for i, j in edges:
        adj[i].append(j)
        adj[j].append(i)
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                queue.append(v)
    return bool(seen.all())


def build_incidence(topology: Topology) -> np.ndarray:
    """Signed ``n x E`` incidence matrix (+1 at the lower-index endpoint)."""
    A = np.zeros((topology.n, topology.num_edges))
    for idx, (i, j) in enumerate(topology.edges):
        A[i, idx] = 1.0
        A[j, idx] = -1.0
    return A


def laplacian_spectrum(topology: Topology) -> SpectralSummary:
    """Largest and smallest strictly positive eigenvalue of ``A A^T``."""
    A = build_incidence(topology)
    eigs = np.linalg.eigvalsh(A @ A.T)
    gamma_max = float(eigs[-1])
    zero = eigs <= ZERO_EIG_THRESHOLD * max(gamma_max, 1.0)
    if zero.sum() != 1:
        raise TopologyError(
            f"Laplacian has {int(zero.sum())} zero eigenvalues; graph is disconnected"
        )
    return SpectralSummary(gamma_max=gamma_max, gamma_min_plus=float(eigs[~zero].min()))


def global_constants(spectrum: SpectralSummary, mu_min: float, M_max: float):
    """Dual smoothness ``L`` and semi-norm strong convexity ``sigma_A``.

    ``L = gamma_max / mu_min`` and ``sigma_A = gamma_min_plus / M_max``.
    """
    if mu_min <= 0 or M_max <= 0:
        raise ValueError("mu_min and M_max must be positive")
    if mu_min > M_max:
        raise ValueError("mu_min cannot exceed M_max")
    return spectrum.gamma_max / mu_min, spectrum.gamma_min_plus / M_max


def generate_regular(n: int, degree: int, seed: int) -> Topology:
    """Random connected ``degree``-regular graph by random stub pairing.

    Stubs are paired uniformly among pairs that keep the graph simple. A draw
    that gets stuck or ends up disconnected is redrawn with ``seed + 1``.
    """
    if degree < 1 or degree >= n:
        raise ValueError("need 1 <= degree < n")
    if (n * degree) % 2:
        raise ValueError("n * degree must be even")
    for attempt in range(MAX_GRAPH_RETRIES):
        rng = np.random.default_rng(seed + attempt)
        edges = _pair_stubs(n, degree, rng)
        if edges is None:
            continue
        try:
            return Topology(n, sorted(edges))
        except TopologyError:
            continue
    raise TopologyError(f"no connected {degree}-regular graph after {MAX_GRAPH_RETRIES} draws")


def _pair_stubs(n, degree, rng):
    # Incremental pairing: only join stubs on distinct, not yet adjacent nodes;
    # restart the pairing (at most 50 times per seed) when stuck.
    for _ in range(50):
        remaining = rng.permutation(np.repeat(np.arange(n), degree)).tolist()
        pairs = set()
        stuck = False
        while remaining:
            found = False
            for _ in range(4 * len(remaining)):
                a, b = rng.choice(len(remaining), size=2, replace=False)
                u, v = remaining[a], remaining[b]
                key = (min(u, v), max(u, v))
                if u != v and key not in pairs:
                    found = True
                    break
            if not found:
                stuck = True
                break
            pairs.add(key)
            for k in sorted((a, b), reverse=True):
                remaining.pop(k)
        if not stuck:
            return pairs
    return None


def generate_erdos_renyi(n: int, p: float, seed: int) -> Topology:
    """Connected G(n, p) draw; disconnected draws are retried with ``seed + 1``."""
    if not 0 < p <= 1:
        raise ValueError("p must lie in (0, 1]")
    iu, ju = np.triu_indices(n, k=1)
    for attempt in range(MAX_GRAPH_RETRIES):
        rng = np.random.default_rng(seed + attempt)
        keep = rng.random(iu.size) < p
        edges = list(zip(iu[keep].tolist(), ju[keep].tolist()))
        try:
            return Topology(n, edges)
        except TopologyError:
            continue
    raise TopologyError(f"no connected G({n}, {p}) graph after {MAX_GRAPH_RETRIES} draws")


def path_graph(n: int) -> Topology:
    return Topology(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Topology:
    return Topology(n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)])


def star_graph(leaves: int) -> Topology:
    return Topology(leaves + 1, [(0, k) for k in range(1, leaves + 1)])


def complete_graph(n: int) -> Topology:
    return Topology(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
