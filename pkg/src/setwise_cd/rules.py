"""Coordinate selection rules within an activated set, and the online
smoothness estimator.

Selection functions return a *position* into the candidate array ``S_i``
(sorted ascending), so lowest-position ties mean lowest coordinate index.
"""

from __future__ import annotations

import numpy as np

MAX_DOUBLINGS = 60


class EstimatorError(RuntimeError):
    """The doubling search hit its cap without finding a non-overshooting step."""


def select_uniform(size: int, rng: np.random.Generator) -> int:
    return int(rng.integers(size))


def select_gs(norm_sq: np.ndarray) -> int:
    """Largest squared gradient norm; ``np.argmax`` keeps the first maximum."""
    return int(np.argmax(norm_sq))


def lipschitz_probabilities(lipschitz: np.ndarray) -> np.ndarray:
    if lipschitz is None:
        raise ValueError("Lipschitz sampling needs coordinate constants")
    lipschitz = np.asarray(lipschitz, dtype=float)
    if np.any(~np.isfinite(lipschitz)) or np.any(lipschitz <= 0):
        raise ValueError("Lipschitz sampling needs positive finite constants")
    return lipschitz / lipschitz.sum()


def select_lipschitz(lipschitz: np.ndarray, rng: np.random.Generator) -> int:
    """Sample a position with probability proportional to its constant."""
    cdf = np.cumsum(lipschitz_probabilities(lipschitz))
    pos = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    return min(pos, cdf.size - 1)


def select_gsl(norm_sq: np.ndarray, lipschitz: np.ndarray) -> int:
    """Largest ``||grad_l|| / sqrt(L_l)``, compared through its square."""
    lipschitz = np.asarray(lipschitz, dtype=float)
    if np.any(lipschitz <= 0):
        raise ValueError("GSL selection needs positive constants")
    return int(np.argmax(norm_sq / lipschitz))


def search_lipschitz_step(objective, state, l, L0):
    """Doubling search for a step on coordinate ``l`` that does not overshoot.

    Starting from ``L0`` the trial constant is doubled until the coordinate
    gradient at ``lambda_l - grad / L_hat`` has positive inner product with
    the current one. ``state`` is not modified.

    Returns
    -------
    estimate : float
        ``L_hat / 2``, the new smoothness estimate for ``l``.
    inner_loops : int
        Number of doublings ``I``; each costs two transmitted vectors.
    new_block : ndarray or None
        The accepted block, or ``None`` when the gradient is at or below the
        objective's ``gradient_noise`` level and the coordinate is left alone.
    """
    grad = objective.coord_gradient(state, l)
    if np.linalg.norm(grad) <= getattr(objective, "gradient_noise", 0.0):
        return float(L0), 0, None
    block = state_block(state, l)
    L_hat = float(L0)
    for count in range(1, MAX_DOUBLINGS + 1):
        L_hat *= 2.0
        cand = block - grad / L_hat
        new_grad, _ = objective.trial(state, l, cand)
        if float(np.vdot(grad, new_grad)) > 0.0:
            return 0.5 * L_hat, count, cand
    raise EstimatorError(
        f"no non-overshooting step on coordinate {l} after {MAX_DOUBLINGS} doublings"
    )


def estimate_lipschitz_step(objective, state, l, L0):
    """Run :func:`search_lipschitz_step` and move coordinate ``l`` in place.

    Returns ``(estimate, inner_loops)``.
    """
    estimate, count, new_block = search_lipschitz_step(objective, state, l, L0)
    if new_block is not None:
        objective.set_block(state, l, new_block)
    return estimate, count


def state_block(state, l) -> np.ndarray:
    blocks = state.lam if hasattr(state, "lam") else state.x
    return blocks[l].copy()
