"""Setwise objectives: the coordinate oracle every algorithm runs on.

Two realisations share one interface:

* :class:`DualConsensusObjective` -- the dual of the edge-constrained
  consensus problem, one block coordinate ``lambda_l`` per graph edge, and
  the coordinate sets are the edges incident to each node.
* :class:`SeparableObjective` -- a separable primal function held by a
  parameter server, with each coordinate writable by exactly two workers.

States are mutable and owned by one run. Objectives themselves are shared
read-only, except for the logistic warm-start cache inside the oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problems import SeparablePrimalObjective
from .topology import Topology, build_incidence, global_constants, laplacian_spectrum


@dataclass
class DualState:
    """Edge duals plus per-node caches.

    ``y[i] = sum_l A_il lambda_l`` is the conjugate argument of node ``i``,
    ``g[i]`` its conjugate gradient (the local primal iterate) and
    ``fstar[i]`` the conjugate value.
    """

    lam: np.ndarray
    y: np.ndarray
    g: np.ndarray
    fstar: np.ndarray

    def copy(self) -> "DualState":
        return DualState(self.lam.copy(), self.y.copy(), self.g.copy(), self.fstar.copy())


@dataclass
class ParallelState:
    x: np.ndarray
    box: np.ndarray

    def copy(self) -> "ParallelState":
        return ParallelState(self.x.copy(), self.box.copy())


class _SetwiseBase:
    """Shared bookkeeping over ``sets`` (one index array per node/worker)."""

    def _init_sets(self, sets, coord_nodes):
        self.sets = tuple(np.asarray(s, dtype=np.intp) for s in sets)
        self.coord_nodes = np.asarray(coord_nodes, dtype=np.intp)
        self.n = len(self.sets)
        self.num_coords = self.coord_nodes.shape[0]
        self.set_sizes = np.array([s.size for s in self.sets])
        self.max_set_size = int(self.set_sizes.max())
        self._lo = self.coord_nodes[:, 0]
        self._hi = self.coord_nodes[:, 1]

    def coord_gradient(self, state, l) -> np.ndarray:
        raise NotImplementedError

    def norm_sq_gradients(self, state, i) -> np.ndarray:
        grads = self.set_gradients(state, i)
        return np.einsum("ij,ij->i", grads, grads)


class DualConsensusObjective(_SetwiseBase):
    """``F(lambda) = sum_i f_i*(sum_l A_il lambda_l)`` over a communication graph."""

    def __init__(self, topology: Topology, oracles):
        if len(oracles) != topology.n:
            raise ValueError("need one local oracle per node")
        dims = {o.dim for o in oracles}
        if len(dims) != 1:
            raise ValueError("all local oracles must share the same dimension")
        self.topology = topology
        self.oracles = list(oracles)
        self.dim = dims.pop()
        self.incidence = build_incidence(topology)
        self._init_sets(topology.node_sets, topology.edge_array)
        # A_il for l in S_i, aligned with self.sets[i]
        self.set_signs = tuple(self.incidence[i, s] for i, s in enumerate(self.sets))
        self.spectrum = laplacian_spectrum(topology)
        self.mu_min = min(o.mu for o in self.oracles)
        self.M_max = max(o.M for o in self.oracles)
        self.L, self.sigma_A = global_constants(self.spectrum, self.mu_min, self.M_max)
        self._coord_L = self._exact_coord_lipschitz()
        # conjugate gradients from iterative inner solves are accurate to
        # about tol / mu per node; coordinate gradients below this are noise
        self.gradient_noise = 2.0 * max(getattr(o, "tol", 0.0) / o.mu for o in self.oracles)

    # -- construction ------------------------------------------------------
    def _exact_coord_lipschitz(self):
        if not all(hasattr(o, "conjugate_hessian") for o in self.oracles):
            return None
        hess = [o.conjugate_hessian() for o in self.oracles]
        out = np.empty(self.num_coords)
        for l, (i, j) in enumerate(self.coord_nodes):
            out[l] = np.linalg.eigvalsh(hess[i] + hess[j])[-1]
        return out

    def _node_conjugate(self, i, y):
        o = self.oracles[i]
        if hasattr(o, "conjugate_pair"):
            return o.conjugate_pair(y)
        return o.conjugate_gradient(y), float(o.conjugate_value(y))

    def init_state(self, lam=None) -> DualState:
        E, d = self.num_coords, self.dim
        lam = np.zeros((E, d)) if lam is None else np.array(lam, dtype=float).reshape(E, d)
        y = self.incidence @ lam
        g = np.empty((self.n, d))
        fstar = np.empty(self.n)
        for i in range(self.n):
            g[i], fstar[i] = self._node_conjugate(i, y[i])
        return DualState(lam, y, g, fstar)

    # -- oracle surface ----------------------------------------------------
    def coord_lipschitz(self, state=None):
        return self._coord_L

    def value(self, state) -> float:
        return float(state.fstar.sum())

    def coord_gradient(self, state, l) -> np.ndarray:
        return state.g[self._lo[l]] - state.g[self._hi[l]]

    def set_gradients(self, state, i) -> np.ndarray:
        s = self.sets[i]
        return state.g[self._lo[s]] - state.g[self._hi[s]]

    def full_gradient(self, state) -> np.ndarray:
        return state.g[self._lo] - state.g[self._hi]

    def set_block(self, state, l, new_block) -> None:
        """Overwrite ``lambda_l`` and refresh only the two endpoint caches."""
        state.lam[l] = new_block
        for i in self.coord_nodes[l]:
            s = self.sets[i]
            state.y[i] = self.set_signs[i] @ state.lam[s]
            state.g[i], state.fstar[i] = self._node_conjugate(i, state.y[i])

    def update(self, state, l, eta) -> DualState:
        """Coordinate step ``lambda_l <- lambda_l - eta * grad_l F``."""
        if eta != 0.0:
            self.set_block(state, l, state.lam[l] - eta * self.coord_gradient(state, l))
        return state

    def trial(self, state, l, new_block):
        """Coordinate gradient and objective value if ``lambda_l`` were ``new_block``.

        Leaves ``state`` untouched.
        """
        delta = np.asarray(new_block, dtype=float) - state.lam[l]
        i, j = self.coord_nodes[l]
        gi, fi = self._node_conjugate(i, state.y[i] + delta)
        gj, fj = self._node_conjugate(j, state.y[j] - delta)
        value = self.value(state) - state.fstar[i] - state.fstar[j] + fi + fj
        return gi - gj, value

    # -- diagnostics -------------------------------------------------------
    def primal_iterates(self, state) -> np.ndarray:
        return state.g.copy()

    def primal_value(self, state) -> float:
        """``sum_i f_i(theta_i)`` using Fenchel-Young at the cached points."""
        return float(np.einsum("ij,ij->", state.y, state.g) - state.fstar.sum())

    def consensus_residual(self, state) -> float:
        diff = state.g[self._lo] - state.g[self._hi]
        return float(np.sqrt(np.einsum("ij,ij->i", diff, diff).max()))

    def recompute(self, state) -> DualState:
        return self.init_state(state.lam)


def primal_recovery(objective: DualConsensusObjective, state: DualState) -> np.ndarray:
    """Per-node primal iterates ``theta_i = grad f_i*(u_i^T A lambda)``."""
    return objective.primal_iterates(state)


def dual_value(objective: DualConsensusObjective, state: DualState) -> float:
    return objective.value(state)


def coord_gradient_dual(objective: DualConsensusObjective, state: DualState, l: int):
    return objective.coord_gradient(state, l)


def coordinate_update(objective, state, l, eta):
    return objective.update(state, l, eta)


class SeparableObjective(_SetwiseBase):
    """Parallel-distributed view of a separable primal function.

    Parameters
    ----------
    primal : SeparablePrimalObjective
    sets : sequence of index arrays
        Coordinates writable by each worker; every coordinate must appear in
        exactly two sets.
    """

    dim = 1
    gradient_noise = 0.0

    def __init__(self, primal: SeparablePrimalObjective, sets):
        sets = [np.sort(np.asarray(s, dtype=np.intp)) for s in sets]
        owners = [[] for _ in range(primal.size)]
        for w, s in enumerate(sets):
            if np.unique(s).size != s.size:
                raise ValueError(f"set {w} lists a coordinate twice")
            for l in s:
                if not 0 <= l < primal.size:
                    raise ValueError(f"coordinate {l} out of range")
                owners[l].append(w)
        bad = [l for l, o in enumerate(owners) if len(o) != 2]
        if bad:
            raise ValueError(f"coordinates {bad[:5]} are not in exactly two sets")
        self.primal = primal
        self._init_sets(sets, owners)

    def init_state(self, x0) -> ParallelState:
        x = np.array(x0, dtype=float).reshape(self.num_coords, 1)
        box = np.abs(x[:, 0]).copy()
        box[box == 0] = 1.0
        return ParallelState(x, box)

    @property
    def L(self):
        raise AttributeError("use global_lipschitz(state) for the separable objective")

    def global_lipschitz(self, state) -> float:
        return float(self.coord_lipschitz(state).max())

    def coord_lipschitz(self, state=None):
        if self.primal.exponent == 2:
            return self.primal.coord_lipschitz()
        if state is None:
            return None
        return self.primal.coord_lipschitz(state.box)

    def value(self, state) -> float:
        return self.primal.value(state.x[:, 0])

    def coord_gradient(self, state, l) -> np.ndarray:
        return np.atleast_1d(self.primal.coord_gradient(state.x[l], l))

    def set_gradients(self, state, i) -> np.ndarray:
        s = self.sets[i]
        return self.primal.coord_gradient(state.x[s, 0], s)[:, None]

    def full_gradient(self, state) -> np.ndarray:
        return self.primal.coord_gradient(state.x[:, 0])[:, None]

    def set_block(self, state, l, new_block) -> None:
        state.x[l] = new_block
        v = abs(float(state.x[l, 0]))
        if v > state.box[l]:
            state.box[l] = v

    def update(self, state, l, eta):
        if eta != 0.0:
            self.set_block(state, l, state.x[l] - eta * self.coord_gradient(state, l))
        return state

    def trial(self, state, l, new_block):
        new = float(np.asarray(new_block).ravel()[0])
        old = float(state.x[l, 0])
        a, p = self.primal.a[l], self.primal.exponent
        value = self.value(state) - a * old**p + a * new**p
        return np.atleast_1d(p * a * new ** (p - 1)), value

    def primal_value(self, state) -> float:
        return self.value(state)

    def consensus_residual(self, state) -> float:
        return 0.0

    def recompute(self, state):
        return state.copy()


def make_parallel_objective(primal: SeparablePrimalObjective, sets) -> SeparableObjective:
    return SeparableObjective(primal, sets)


def double_cover_sets(n_sets: int, set_size: int, num_coords: int | None = None):
    """Coordinate sets of equal size where every coordinate is in exactly two sets.

    Sets are the nodes of a circulant ``set_size``-regular multigraph and
    coordinates its edges. The first ``n_sets // 2`` coordinates join sets
    ``(2k, 2k + 1)``, a perfect matching used for the crafted initialisation.
    """
    if (n_sets * set_size) % 2:
        raise ValueError("n_sets * set_size must be even")
    total = n_sets * set_size // 2
    if num_coords is not None and num_coords != total:
        raise ValueError(f"{n_sets} sets of size {set_size} cover {total} coordinates")
    if n_sets % 2:
        raise ValueError("n_sets must be even")
    pairs = [(2 * k, 2 * k + 1) for k in range(n_sets // 2)]
    remaining = set_size - 1
    if remaining % 2 == 0:
        offsets = range(2, 2 + remaining // 2)
        for off in offsets:
            pairs += [(w, (w + off) % n_sets) for w in range(n_sets)]
    else:
        # odd remainder: one more matching (2k+1, 2k+2) then even offsets
        pairs += [(2 * k + 1, (2 * k + 2) % n_sets) for k in range(n_sets // 2)]
        for off in range(2, 2 + (remaining - 1) // 2):
            pairs += [(w, (w + off) % n_sets) for w in range(n_sets)]
    sets = [[] for _ in range(n_sets)]
    for c, (u, v) in enumerate(pairs):
        sets[u].append(c)
        sets[v].append(c)
    if any(len(s) != set_size for s in sets):
        raise ValueError(f"cannot build {n_sets} sets of size {set_size}")
    return [np.array(s) for s in sets]
