"""Norms behind the rate analysis, small-instance dual-norm oracles and the
rate certificate.

Coordinates are graph edges (or shared parameters); ``sets`` lists, for
every node, the coordinates it may update. Block coordinates (``d > 1``)
enter every norm through their Euclidean length.

The dual-norm oracles exploit that a supremum of ``z^T x`` over a set-max
ball only depends on ``|z|``: with signs fixed to ``sign(z)`` the problem
becomes a concave maximisation over per-coordinate magnitudes, written as a
small smooth convex program and solved with SLSQP. Convexity makes the local
solution global; a few restarts guard against solver stalls.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import minimize

from .topology import Topology, build_incidence, laplacian_spectrum

SM_DUAL_MAX_COORDS = 7
ASSIGNMENT_MAX_COORDS = 12
PROJECTOR_ZERO_TOL = 1e-10


class SizeGuardError(ValueError):
    """A brute-force oracle was asked for an instance above its size limit."""


def _magnitudes(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.abs(x) if x.ndim == 1 else np.linalg.norm(x, axis=1)


def _sets_of(sets_or_topology):
    if isinstance(sets_or_topology, Topology):
        return sets_or_topology.node_sets
    return tuple(np.asarray(s, dtype=np.intp) for s in sets_or_topology)


def _guard(size, limit, what):
    if size > limit:
        raise SizeGuardError(f"{what} is limited to {limit} coordinates, got {size}")


# ---------------------------------------------------------------------------
# Projection semi-norm


def row_space_projector(incidence) -> np.ndarray:
    """``A^+ A``: orthogonal projector onto the row space of ``A`` (in R^E)."""
    A = np.asarray(incidence, dtype=float)
    _, s, vt = np.linalg.svd(A, full_matrices=False)
    keep = s > PROJECTOR_ZERO_TOL * max(s.max(initial=0.0), 1.0)
    V = vt[keep]
    return V.T @ V


def norm_A(x, topology_or_incidence) -> float:
    """``sqrt(x^T A^+ A x)``; zero exactly on the cycle space of the graph."""
    A = (build_incidence(topology_or_incidence)
         if isinstance(topology_or_incidence, Topology) else topology_or_incidence)
    P = row_space_projector(A)
    x = np.asarray(x, dtype=float)
    px = P @ x
    return float(np.sqrt(max(np.vdot(x, px), 0.0)))


# ---------------------------------------------------------------------------
# Set-max norms


def norm_sm(x, sets) -> float:
    """``sqrt(sum_i max_{l in S_i} x_l^2)``."""
    mag = _magnitudes(x)
    return float(np.sqrt(sum(mag[s].max() ** 2 for s in _sets_of(sets) if s.size)))


def norm_sml(x, sets, lipschitz) -> float:
    """``sqrt(sum_i max_{l in S_i} x_l^2 / L_l)``."""
    L = np.asarray(lipschitz, dtype=float)
    if np.any(L <= 0):
        raise ValueError("coordinate constants must be positive")
    return norm_sm(_magnitudes(x) / np.sqrt(L), sets)


def _setmax_dual(weights, groups, restarts=4, seed=0) -> float:
    """``max sum_l w_l m_l`` s.t. ``m_l <= t_g`` for every group ``g`` holding
    ``l``, ``sum_g t_g^2 <= 1`` and ``m, t >= 0``.

    Coordinates outside every group are unbounded; the oracle only receives
    covering group families.
    """
    w = np.asarray(weights, dtype=float)
    E, G = w.size, len(groups)
    if not np.any(w):
        return 0.0
    cols = [(int(l), g) for g, members in enumerate(groups) for l in members]
    # linear constraints t_g - m_l >= 0
    C = np.zeros((len(cols), E + G))
    for r, (l, g) in enumerate(cols):
        C[r, l] = -1.0
        C[r, E + g] = 1.0
    cons = [
        {"type": "ineq", "fun": lambda v: C @ v, "jac": lambda v: C},
        {"type": "ineq", "fun": lambda v: 1.0 - v[E:] @ v[E:],
         "jac": lambda v: np.concatenate([np.zeros(E), -2.0 * v[E:]])},
    ]
    bounds = [(0.0, None)] * (E + G)
    rng = np.random.default_rng(seed)
    best = -np.inf
    for k in range(restarts):
        t0 = np.full(G, 1.0 / np.sqrt(G)) if k == 0 else rng.random(G)
        t0 = t0 / max(np.linalg.norm(t0), 1e-12)
        m0 = np.array([min(t0[g] for g in range(G) if l in groups[g]) for l in range(E)])
        res = minimize(lambda v: -(w @ v[:E]), np.concatenate([m0, t0]),
                       jac=lambda v: np.concatenate([-w, np.zeros(G)]),
                       bounds=bounds, constraints=cons, method="SLSQP",
                       options={"ftol": 1e-14, "maxiter": 500})
        v = res.x
        # project back to feasibility before scoring
        t = np.clip(v[E:], 0.0, None)
        t = t / max(np.linalg.norm(t), 1.0)
        m = np.array([min(t[g] for g in range(G) if l in groups[g]) for l in range(E)])
        best = max(best, float(w @ m))
    return best


def _coverage(sets, E):
    groups = [set(map(int, s)) for s in sets]
    covered = set().union(*groups) if groups else set()
    if covered != set(range(E)):
        raise ValueError("every coordinate must belong to at least one set")
    return groups


def norm_sm_dual_bruteforce(z, sets, max_coords=SM_DUAL_MAX_COORDS) -> float:
    """``sup { z^T x : ||x||_SM <= 1 }`` on small instances."""
    w = _magnitudes(z)
    _guard(w.size, max_coords, "the set-max dual oracle")
    return _setmax_dual(w, _coverage(_sets_of(sets), w.size))


def norm_sml_dual_bruteforce(z, sets, lipschitz, max_coords=SM_DUAL_MAX_COORDS) -> float:
    """``sup { z^T x : ||x||_SML <= 1 }``; equals the set-max dual of ``|z| sqrt(L)``."""
    L = np.asarray(lipschitz, dtype=float)
    if np.any(L <= 0):
        raise ValueError("coordinate constants must be positive")
    return norm_sm_dual_bruteforce(_magnitudes(z) * np.sqrt(L), sets, max_coords)


# ---------------------------------------------------------------------------
# Weighted Euclidean pair


def norm_L(x, weights) -> float:
    """``sqrt(sum_l w_l x_l^2)``."""
    w = np.asarray(weights, dtype=float)
    if np.any(w <= 0):
        raise ValueError("weights must be positive")
    return float(np.sqrt(np.sum(w * _magnitudes(x) ** 2)))


def norm_L_dual(z, weights) -> float:
    """Dual of :func:`norm_L`: ``sqrt(sum_l z_l^2 / w_l)``."""
    return norm_L(z, 1.0 / np.asarray(weights, dtype=float))


def norm_L_dual_maximizer(z, weights) -> np.ndarray:
    """Unit-``norm_L`` vector attaining ``z^T x = norm_L_dual(z)``."""
    w = np.asarray(weights, dtype=float)
    x = np.asarray(z, dtype=float) / (w if np.ndim(z) == 1 else w[:, None])
    nrm = norm_L(x, w)
    return x / nrm if nrm > 0 else x


# ---------------------------------------------------------------------------
# Non-overlapping assignments


@dataclass(frozen=True)
class SetAssignment:
    """Each coordinate handed to exactly one of the two sets holding it."""

    owner: tuple

    def groups(self, n) -> list:
        out = [[] for _ in range(n)]
        for l, i in enumerate(self.owner):
            out[i].append(l)
        return [np.array(g, dtype=np.intp) for g in out]


def _coord_owners(sets, E):
    owners = [[] for _ in range(E)]
    for i, s in enumerate(sets):
        for l in s:
            owners[int(l)].append(i)
    if any(len(o) != 2 for o in owners):
        raise ValueError("every coordinate must lie in exactly two sets")
    return owners


def lower_endpoint_assignment(sets, E) -> SetAssignment:
    return SetAssignment(tuple(min(o) for o in _coord_owners(_sets_of(sets), E)))


def norm_smno_dual(z, assignment: SetAssignment, n=None) -> float:
    """Closed form ``sqrt(sum_i (sum_{l in T_i} |z_l|)^2)`` for a fixed assignment."""
    w = _magnitudes(z)
    if len(assignment.owner) != w.size:
        raise ValueError("assignment length differs from the number of coordinates")
    n = max(assignment.owner) + 1 if n is None else n
    sums = np.bincount(np.asarray(assignment.owner), weights=w, minlength=n)
    return float(np.sqrt(np.sum(sums**2)))


def norm_smno_dual_numeric(z, assignment: SetAssignment, n=None) -> float:
    """Same quantity as :func:`norm_smno_dual`, by direct maximisation."""
    w = _magnitudes(z)
    _guard(w.size, SM_DUAL_MAX_COORDS, "the numeric assignment oracle")
    n = max(assignment.owner) + 1 if n is None else n
    groups = [set(map(int, g)) for g in assignment.groups(n) if g.size]
    return _setmax_dual(w, groups)


def _all_assignments(owners):
    for choice in itertools.product((0, 1), repeat=len(owners)):
        yield SetAssignment(tuple(o[c] for o, c in zip(owners, choice)))


def _assignment_norm_sq(mag, assignment, n):
    best = np.zeros(n)
    np.maximum.at(best, np.asarray(assignment.owner), mag**2)
    return float(best.sum())


def _pickable(subset, owners):
    """Can every coordinate in ``subset`` get its own distinct set?"""
    match = {}

    def augment(l, seen):
        for i in owners[l]:
            if i in seen:
                continue
            seen.add(i)
            if i not in match or augment(match[i], seen):
                match[i] = l
                return True
        return False

    return all(augment(l, set()) for l in subset)


def _maximal_pickable(owners):
    E = len(owners)
    pick = [frozenset(c) for r in range(1, E + 1) for c in itertools.combinations(range(E), r)
            if _pickable(c, owners)]
    pick.sort(key=len, reverse=True)
    maximal = []
    for p in pick:
        if not any(p < q for q in maximal):
            maximal.append(p)
    return maximal


def _coupled_dual(w, owners):
    """``sup z^T x`` over ``max_assignment sum_i ||T_i x||_inf^2 <= 1``.

    The left side equals the largest ``sum_{l in P} x_l^2`` over coordinate
    sets ``P`` whose members can be given distinct owning sets, so the ball
    is cut by one quadratic constraint per maximal such ``P``.
    """
    E = w.size
    if not np.any(w):
        return 0.0, np.zeros(E)
    maximal = _maximal_pickable(owners)
    masks = np.array([[l in p for l in range(E)] for p in maximal], dtype=float)
    cons = [{"type": "ineq", "fun": lambda m, r=r: 1.0 - r @ (m * m),
             "jac": lambda m, r=r: -2.0 * r * m} for r in masks]
    best, best_m = -np.inf, None
    rng = np.random.default_rng(0)
    for k in range(4):
        m0 = w / np.linalg.norm(w) if k == 0 else rng.random(E)
        m0 = m0 / np.sqrt(max((masks @ (m0 * m0)).max(), 1e-300))
        res = minimize(lambda m: -(w @ m), m0, jac=lambda m: -w, method="SLSQP",
                       bounds=[(0.0, None)] * E, constraints=cons,
                       options={"ftol": 1e-14, "maxiter": 500})
        m = np.clip(res.x, 0.0, None)
        m = m / np.sqrt(max((masks @ (m * m)).max(), 1.0))
        val = float(w @ m)
        if val > best:
            best, best_m = val, m
    return best, best_m


@dataclass
class AssignmentReport:
    """Outcome of the coupled brute force on one ``z``."""

    coupled_value: float
    active_assignment: SetAssignment
    closed_form_at_active: float
    closed_form_max: float
    closed_form_min: float
    argmax_assignment: SetAssignment

    @property
    def max_closed_form_agrees(self) -> bool:
        """Does the max over assignments of the closed form equal the coupled value?"""
        return bool(np.isclose(self.closed_form_max, self.coupled_value, rtol=1e-6, atol=1e-9))


def assignment_report(z, sets, max_coords=ASSIGNMENT_MAX_COORDS) -> AssignmentReport:
    """Evaluate the coupled non-overlapping dual norm and every per-assignment
    closed form, so any disagreement between the two is visible."""
    sets = _sets_of(sets)
    w = _magnitudes(z)
    E, n = w.size, len(sets)
    _guard(E, max_coords, "assignment enumeration")
    owners = _coord_owners(sets, E)
    value, x_star = _coupled_dual(w, owners)
    best_sq, active = -np.inf, None
    cf_max, cf_min, arg = -np.inf, np.inf, None
    for a in _all_assignments(owners):
        sq = _assignment_norm_sq(x_star, a, n)
        if sq > best_sq + 1e-12:
            best_sq, active = sq, a
        cf = norm_smno_dual(w, a, n)
        if cf > cf_max:
            cf_max, arg = cf, a
        cf_min = min(cf_min, cf)
    return AssignmentReport(
        coupled_value=value,
        active_assignment=active,
        closed_form_at_active=norm_smno_dual(w, active, n),
        closed_form_max=cf_max,
        closed_form_min=cf_min,
        argmax_assignment=arg,
    )


def best_assignment_bruteforce(z, sets, max_coords=ASSIGNMENT_MAX_COORDS):
    """Coupled non-overlapping dual norm by enumeration.

    Returns the assignment that is active at the maximiser (the one attaining
    the inner maximum there) and the coupled value.
    """
    rep = assignment_report(z, sets, max_coords)
    return rep.active_assignment, rep.coupled_value


# ---------------------------------------------------------------------------
# Rate certificate


@dataclass
class RateCertificate:
    """Per-iteration contraction factors predicted for each algorithm.

    A factor ``r`` means ``E[F^{k+1} - F*] <= (1 - r) (F^k - F*)``. Where the
    exact strong-convexity constant is unknown the certificate keeps the
    interval the theory allows.
    """

    n: int
    num_coords: int
    N_max: int
    L: float
    sigma_A: float
    L_max: float | None
    calL_min: float | None
    calL_max: float | None
    su_factor: float
    sgs_interval: tuple
    sl_interval: tuple | None
    sgsl_lower: float
    checks: dict

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["sgs_interval"] = list(self.sgs_interval)
        d["sl_interval"] = None if self.sl_interval is None else list(self.sl_interval)
        d["ok"] = self.ok
        return d

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def rate_certificate(topology: Topology, mu_min, M_max, coord_lipschitz=None) -> RateCertificate:
    """Theoretical factors for a graph and problem constants.

    Parameters
    ----------
    topology : Topology
    mu_min, M_max : float
        Smallest strong-convexity and largest smoothness constant of the
        local functions.
    coord_lipschitz : array, optional
        Per-edge constants ``L_l``; without them the Lipschitz-informed
        entries are omitted.
    """
    from .topology import global_constants

    spec = laplacian_spectrum(topology)
    L, sigma_A = global_constants(spec, mu_min, M_max)
    n, N_max = topology.n, topology.max_degree
    su = 2.0 * sigma_A / (L * n * N_max)
    sgs = (sigma_A / (N_max * L * n), 2.0 * sigma_A / (L * n))
    checks = {
        "su_factor_in_(0,1]": bool(0.0 < su <= 1.0),
        "sgs_interval_contains_su": bool(sgs[0] <= su <= sgs[1]),
        "sigma_sm_interval_within_(0,2sigma_A]": bool(0.0 < sigma_A / N_max <= 2.0 * sigma_A),
    }
    L_max = calL_min = calL_max = sl = None
    if coord_lipschitz is not None:
        Ls = np.asarray(coord_lipschitz, dtype=float)
        if Ls.size != topology.num_edges or np.any(Ls <= 0):
            raise ValueError("need one positive constant per edge")
        L_max = float(Ls.max())
        node_sum = np.array([Ls[s].sum() for s in topology.node_sets])
        lo, hi = topology.edge_array[:, 0], topology.edge_array[:, 1]
        calL = 1.0 / node_sum[lo] + 1.0 / node_sum[hi]
        calL_min, calL_max = float(calL.min()), float(calL.max())
        sl = (sigma_A * calL_min / n, sigma_A * calL_max / n)
        tol = 1e-12
        checks["calL_min_ge_2/(L_max N_max)"] = bool(calL_min >= 2.0 / (L_max * N_max) * (1 - tol))
        checks["L_max_le_L"] = bool(L_max <= L * (1 + tol))
        checks["sl_lower_ge_su"] = bool(sl[0] >= su * (1 - tol))
    return RateCertificate(
        n=n,
        num_coords=topology.num_edges,
        N_max=N_max,
        L=float(L),
        sigma_A=float(sigma_A),
        L_max=L_max,
        calL_min=calL_min,
        calL_max=calL_max,
        su_factor=float(su),
        sgs_interval=tuple(float(v) for v in sgs),
        sl_interval=None if sl is None else tuple(float(v) for v in sl),
        sgsl_lower=float(sgs[0]),
        checks=checks,
    )


def certificate_for(objective) -> RateCertificate:
    """Certificate of a :class:`~setwise_cd.objectives.DualConsensusObjective`."""
    return rate_certificate(objective.topology, objective.mu_min, objective.M_max,
                            objective.coord_lipschitz())
