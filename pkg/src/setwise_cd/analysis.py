"""Reference optima and linear-rate fitting for suboptimality traces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import Reference
from .problems import InnerSolverError

DEFAULT_WINDOW = (0.3, 0.7)


def reference_optimum(oracles, tol=1e-12, max_iter=200) -> Reference:
    """Centralised solve of ``min_t sum_i f_i(t)``.

    Quadratic nodes are solved in closed form; otherwise damped Newton runs
    to gradient norm ``tol``. By strong duality the dual optimum is
    ``F* = -(primal optimum)``.
    """
    if all(hasattr(o, "Q") for o in oracles):
        H = sum(o.Q for o in oracles)
        theta = np.linalg.solve(H, sum(o.Q @ o.b for o in oracles))
    else:
        theta = _newton(oracles, tol, max_iter)
    p_star = float(sum(o.value(theta) for o in oracles))
    return Reference(F_star=-p_star, primal_star=p_star, theta_star=theta)


def _newton(oracles, tol, max_iter):
    d = oracles[0].dim
    theta = np.zeros(d)

    def total(t):
        return sum(o.value(t) for o in oracles)

    obj = total(theta)
    for _ in range(max_iter):
        grad = sum(o.gradient(theta) for o in oracles)
        if np.linalg.norm(grad) <= tol:
            return theta
        step = np.linalg.solve(sum(o.hessian(theta) for o in oracles), grad)
        t = 1.0
        while True:
            cand = theta - t * step
            cand_obj = total(cand)
            if cand_obj <= obj - 0.25 * t * (grad @ step) or t < 1e-12:
                break
            t *= 0.5
        theta, obj = cand, cand_obj
    grad = sum(o.gradient(theta) for o in oracles)
    if np.linalg.norm(grad) <= max(tol, 1e-9):
        return theta
    raise InnerSolverError(f"reference Newton solve stalled at {np.linalg.norm(grad):.3e}")


@dataclass
class RateFit:
    rho: float
    r2: float
    slope: float
    start: int
    stop: int

    @property
    def reduction_factor(self) -> float:
        return 1.0 - self.rho


def fit_window(subopt, window=DEFAULT_WINDOW):
    """Index range ``[start, stop)`` for a window spec.

    ``window`` is either ``(lo_frac, hi_frac)`` of the trace length, or
    ``{"band": (upper, lower)}`` selecting the stretch where the
    suboptimality relative to its first value lies between the two levels.
    """
    subopt = np.asarray(subopt, dtype=float)
    n = subopt.size
    if isinstance(window, dict):
        upper, lower = window["band"]
        rel = subopt / subopt[0]
        above = np.nonzero(rel <= upper)[0]
        start = int(above[0]) if above.size else n
        below = np.nonzero(rel[start:] < lower)[0]
        stop = start + int(below[0]) if below.size else n
    else:
        lo, hi = window
        start, stop = int(np.floor(lo * (n - 1))), int(np.ceil(hi * (n - 1))) + 1
    return start, min(stop, n)


def fit_rate(subopt, window=DEFAULT_WINDOW, x=None, floor=0.0) -> RateFit:
    """Least-squares slope of ``log(subopt)`` over a window.

    Returns ``rho = 1 - exp(slope)`` per unit of ``x`` (iterations by
    default). Entries at or below ``floor`` end the window early, since the
    trace has hit its numerical floor.
    """
    subopt = np.asarray(subopt, dtype=float)
    x = np.arange(subopt.size, dtype=float) if x is None else np.asarray(x, dtype=float)
    start, stop = fit_window(subopt, window)
    seg = subopt[start:stop]
    bad = np.nonzero(~(seg > floor))[0]
    if bad.size:
        stop = start + int(bad[0])
    if stop - start < 2:
        raise ValueError("rate-fit window holds fewer than two positive points")
    xs, ys = x[start:stop], np.log(subopt[start:stop])
    slope, icept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + icept)
    ss_tot = np.sum((ys - ys.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return RateFit(rho=float(1.0 - np.exp(slope)), r2=float(r2), slope=float(slope),
                   start=start, stop=stop)


def geometric_mean_trace(traces) -> np.ndarray:
    """Average suboptimality curves across seeds in log space."""
    arr = np.vstack([np.asarray(t, dtype=float) for t in traces])
    with np.errstate(divide="ignore"):
        logs = np.log(np.clip(arr, np.finfo(float).tiny, None))
    return np.exp(logs.mean(axis=0))
