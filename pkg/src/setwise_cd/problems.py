"""Per-node local functions and their Fenchel-conjugate oracles.

Every oracle exposes ``value``/``gradient`` of ``f`` and the conjugate pair
``conjugate_value(y) = f*(y)`` and ``conjugate_gradient(y) = argmin f(t) - y^T t``.
Quadratic and least-squares oracles are closed form; the logistic oracle
solves the per-node Lagrangian with a damped Newton method.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit


class InnerSolverError(RuntimeError):
    """The inner minimisation behind a conjugate oracle did not converge."""


class QuadraticOracle:
    """``f(t) = 0.5 (t - b)^T Q (t - b) + offset`` with ``Q`` positive definite."""

    kind = "quadratic"

    def __init__(self, b, Q, offset=0.0):
        b = np.atleast_1d(np.asarray(b, dtype=float))
        Q = np.atleast_2d(np.asarray(Q, dtype=float))
        if Q.shape != (b.size, b.size):
            raise ValueError("Q must be d x d with d = len(b)")
        if not np.allclose(Q, Q.T):
            raise ValueError("Q must be symmetric")
        eigs = np.linalg.eigvalsh(Q)
        if eigs[0] <= 0:
            raise ValueError("Q must be positive definite")
        self.b = b
        self.Q = 0.5 * (Q + Q.T)
        self.offset = float(offset)
        self.Q_inv = np.linalg.inv(self.Q)
        self.mu = float(eigs[0])
        self.M = float(eigs[-1])

    @property
    def dim(self) -> int:
        return self.b.size

    def value(self, theta):
        r = np.asarray(theta, dtype=float) - self.b
        return 0.5 * r @ self.Q @ r + self.offset

    def gradient(self, theta):
        return self.Q @ (np.asarray(theta, dtype=float) - self.b)

    def conjugate_gradient(self, y):
        return self.b + self.Q_inv @ np.asarray(y, dtype=float)

    def conjugate_value(self, y):
        y = np.asarray(y, dtype=float)
        return 0.5 * y @ self.Q_inv @ y + self.b @ y - self.offset

    def hessian(self, theta=None):
        return self.Q

    def conjugate_hessian(self, y=None):
        return self.Q_inv


class LogisticOracle:
    """Ridge-regularised logistic loss
    ``f(t) = mean(log(1 + exp(-Y X t))) + c ||t||^2``.

    The conjugate gradient solves ``min_t f(t) - y^T t`` by damped Newton
    with Armijo backtracking, warm-started from the previous solution.
    """

    kind = "logistic"

    def __init__(self, X, Y, c, tol=1e-12, max_iter=100):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        Y = np.asarray(Y, dtype=float).ravel()
        if c <= 0:
            raise ValueError("ridge weight c must be positive for strong convexity")
        if Y.size != X.shape[0]:
            raise ValueError("X and Y row counts differ")
        if not np.all(np.isin(Y, (-1.0, 1.0))):
            raise ValueError("labels must be in {-1, +1}")
        self.X = X
        self.Y = Y
        self.c = float(c)
        self.tol = tol
        self.max_iter = max_iter
        self._YX = Y[:, None] * X
        m = X.shape[0]
        self.mu = 2.0 * self.c
        self.M = 2.0 * self.c + np.linalg.eigvalsh(X.T @ X)[-1] / (4.0 * m)
        self._warm = np.zeros(X.shape[1])

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def value(self, theta):
        theta = np.asarray(theta, dtype=float)
        margins = self._YX @ theta
        return np.mean(np.logaddexp(0.0, -margins)) + self.c * theta @ theta

    def gradient(self, theta):
        theta = np.asarray(theta, dtype=float)
        s = expit(-(self._YX @ theta))
        return -(self._YX.T @ s) / self.Y.size + 2.0 * self.c * theta

    def hessian(self, theta):
        s = expit(self._YX @ np.asarray(theta, dtype=float))
        w = s * (1.0 - s) / self.Y.size
        return (self.X.T * w) @ self.X + 2.0 * self.c * np.eye(self.dim)

    def _solve(self, y):
        y = np.asarray(y, dtype=float)
        theta = self._warm.copy()
        obj = self.value(theta) - y @ theta
        tol = self.tol * max(1.0, float(np.linalg.norm(y)))
        for _ in range(self.max_iter):
            grad = self.gradient(theta) - y
            if np.linalg.norm(grad) <= tol:
                self._warm = theta
                return theta
            step = np.linalg.solve(self.hessian(theta), grad)
            slope = grad @ step
            if slope < 1e-12:
                # inside the quadratic-convergence region the objective change
                # is below rounding, so skip the line search
                theta = theta - step
                obj = self.value(theta) - y @ theta
                continue
            t = 1.0
            while True:
                cand = theta - t * step
                cand_obj = self.value(cand) - y @ cand
                if cand_obj <= obj - 0.25 * t * slope or t < 1e-10:
                    break
                t *= 0.5
            theta, obj = cand, cand_obj
        grad = self.gradient(theta) - y
        if np.linalg.norm(grad) <= tol:
            self._warm = theta
            return theta
        raise InnerSolverError(
            f"logistic conjugate solve stalled at gradient norm {np.linalg.norm(grad):.3e}"
        )

    def conjugate_gradient(self, y):
        return self._solve(y).copy()

    def conjugate_value(self, y):
        theta = self._solve(y)
        return float(np.asarray(y, dtype=float) @ theta - self.value(theta))

    def conjugate_pair(self, y):
        theta = self._solve(y).copy()
        return theta, float(np.asarray(y, dtype=float) @ theta - self.value(theta))


def make_quadratic(b, Q, offset=0.0) -> QuadraticOracle:
    return QuadraticOracle(b, Q, offset)


def make_lls(X, Y, ridge=0.0) -> QuadraticOracle:
    """Least-squares node ``f(t) = (1/M) ||X t - Y||^2 (+ ridge ||t||^2)``.

    Written as an equivalent quadratic around the least-squares solution, so
    the conjugate oracle is closed form.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.asarray(Y, dtype=float).ravel()
    m, d = X.shape
    if Y.size != m:
        raise ValueError("X and Y row counts differ")
    gram = X.T @ X
    if ridge == 0.0 and np.linalg.matrix_rank(gram) < d:
        raise ValueError(
            "X^T X is rank deficient: the local least-squares term is not strongly "
            "convex (pass ridge > 0 to regularise explicitly)"
        )
    H = 2.0 * gram / m + 2.0 * ridge * np.eye(d)
    b = np.linalg.solve(H, 2.0 * X.T @ Y / m)
    offset = float(np.sum((X @ b - Y) ** 2) / m + ridge * b @ b)
    oracle = QuadraticOracle(b, H, offset)
    oracle.kind = "lls"
    oracle.X, oracle.Y, oracle.ridge = X, Y, float(ridge)
    return oracle


def make_logistic(X, Y, c, tol=1e-12) -> LogisticOracle:
    return LogisticOracle(X, Y, c, tol=tol)


class SeparablePrimalObjective:
    """``F(x) = sum_l a_l x_l^p + offset`` with ``p`` in {2, 4}."""

    def __init__(self, a, exponent=2, offset=0.0):
        a = np.asarray(a, dtype=float).ravel()
        if np.any(a <= 0):
            raise ValueError("all coefficients a_l must be positive")
        if exponent not in (2, 4):
            raise ValueError("exponent must be 2 or 4")
        self.a = a
        self.exponent = int(exponent)
        self.offset = float(offset)

    @property
    def size(self) -> int:
        return self.a.size

    def value(self, x):
        return float(np.sum(self.a * np.asarray(x, dtype=float) ** self.exponent) + self.offset)

    def coord_gradient(self, x, idx=None):
        p = self.exponent
        a = self.a if idx is None else self.a[idx]
        return p * a * np.asarray(x, dtype=float) ** (p - 1)

    def coord_curvature(self, x, idx=None):
        p = self.exponent
        a = self.a if idx is None else self.a[idx]
        return p * (p - 1) * a * np.asarray(x, dtype=float) ** (p - 2)

    def coord_lipschitz(self, box=None):
        """Global per-coordinate constants; the quartic needs a box bound ``|x_l| <= box_l``."""
        if self.exponent == 2:
            return 2.0 * self.a
        if box is None:
            raise ValueError("quartic coordinate constants need a box bound")
        return 12.0 * self.a * np.asarray(box, dtype=float) ** 2


def make_separable(a, exponent=2, offset=0.0) -> SeparablePrimalObjective:
    return SeparablePrimalObjective(a, exponent, offset)


# ---------------------------------------------------------------------------
# Synthetic network problems


def quadratic_network(n, d, seed, c_base=1.0, c_big=100.0, big_nodes=1, b_scale=1.0):
    """Nodes ``f_i(t) = c_i ||t - b_i||^2``; ``c`` is much larger on ``big_nodes`` nodes."""
    rng = np.random.default_rng(seed)
    c = np.full(n, float(c_base))
    c[rng.choice(n, size=big_nodes, replace=False)] = c_big
    bs = b_scale * rng.standard_normal((n, d))
    return [make_quadratic(bs[i], 2.0 * c[i] * np.eye(d)) for i in range(n)]


def lls_data(n, d, m, seed, noise=0.1, scale_by_node=True):
    """Gaussian design, shared ground truth, labels scaled by ``node index + 1``."""
    rng = np.random.default_rng(seed)
    truth = rng.standard_normal(d)
    data = []
    for i in range(n):
        X = rng.standard_normal((m, d))
        Y = X @ truth + noise * rng.standard_normal(m)
        if scale_by_node:
            Y = Y * (i + 1)
        data.append((X, Y))
    return data


def lls_network(n, d, m, seed, ridge=0.0):
    return [make_lls(X, Y, ridge) for X, Y in lls_data(n, d, m, seed)]


def logistic_network(n, d, m, seed, c=0.1, flip=0.1):
    """Linearly generated labels with a fraction ``flip`` of sign flips."""
    rng = np.random.default_rng(seed)
    truth = rng.standard_normal(d)
    oracles = []
    for _ in range(n):
        X = rng.standard_normal((m, d))
        Y = np.sign(X @ truth + 1e-12)
        Y[rng.random(m) < flip] *= -1.0
        oracles.append(make_logistic(X, Y, c))
    return oracles


def load_csv_matrix(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", ndmin=2)


def problem_from_spec(spec: dict, n: int):
    """Build per-node oracles from ``{"kind", "params", "seed"}``.

    ``params`` may carry ``"data": [{"X": path, "Y": path}, ...]`` (one entry
    per node, CSV files) for the ``lls`` and ``logistic`` kinds.
    """
    kind = spec["kind"]
    params = dict(spec.get("params", {}))
    seed = int(spec.get("seed", 0))
    files = params.pop("data", None)
    if files is not None:
        if len(files) != n:
            raise ValueError("need one data entry per node")
        pairs = [(load_csv_matrix(f["X"]), load_csv_matrix(f["Y"]).ravel()) for f in files]
        if kind == "lls":
            return [make_lls(X, Y, params.get("ridge", 0.0)) for X, Y in pairs]
        if kind == "logistic":
            return [make_logistic(X, Y, params.get("c", 0.1)) for X, Y in pairs]
        raise ValueError(f"file data not supported for kind {kind!r}")
    if kind == "quadratic":
        return quadratic_network(n, seed=seed, **params)
    if kind == "lls":
        return lls_network(n, seed=seed, **params)
    if kind == "logistic":
        return logistic_network(n, seed=seed, **params)
    raise ValueError(f"unknown problem kind {kind!r}")
