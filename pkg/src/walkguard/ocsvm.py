"""One-class SVM with RBF kernel, trained by SMO on the dual problem.

Dual: minimize 0.5 * a' K a  subject to  0 <= a_i <= 1/(nu*n), sum(a) = 1.
The decision function is f(x) = sum_i a_i k(x, x_i) - bias; positive values
mean the query looks like the training class (recognized, non-hazardous).
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DimensionError


@dataclass(frozen=True)
class RbfKernelParams:
    gamma: float

    def __post_init__(self):
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")


@dataclass(frozen=True)
class OcsvmTrainConfig:
    nu: float = 0.5
    gamma: float = 0.5
    tolerance: float = 1e-5
    max_passes: int = 10_000

    def __post_init__(self):
        if not 0 < self.nu <= 1:
            raise ValueError("nu must be in (0, 1]")
        if self.gamma <= 0 or self.tolerance <= 0:
            raise ValueError("gamma and tolerance must be positive")


@dataclass
class OcsvmModel:
    support_vectors: np.ndarray  # (m, d)
    alphas: np.ndarray           # (m,), all > 0
    bias: float
    kernel: RbfKernelParams
    nu: float
    n_train: int
    converged: bool = True


def rbf_kernel(x, y, params: RbfKernelParams) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionError(f"vector lengths differ: {x.shape} vs {y.shape}")
    return float(np.exp(-params.gamma * np.sum((x - y) ** 2)))


def rbf_matrix(xs, ys, gamma):
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    sq = (np.sum(xs ** 2, axis=1)[:, None] + np.sum(ys ** 2, axis=1)[None, :]
          - 2.0 * xs @ ys.T)
    np.maximum(sq, 0.0, out=sq)
    return np.exp(-gamma * sq)


def fit(data, config: OcsvmTrainConfig) -> OcsvmModel:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DataError("training data must be a nonempty (n, d) array")
    if not np.all(np.isfinite(x)):
        raise DataError("training data must be finite")
    n = x.shape[0]
    c = 1.0 / (config.nu * n)
    k = rbf_matrix(x, x, config.gamma)

    alpha = np.full(n, 1.0 / n)
    grad = k @ alpha  # gradient of the dual objective
    converged = False
    for _ in range(config.max_passes):
        # maximal violating pair on the equality-constrained box problem
        up = alpha < c - 1e-12
        down = alpha > 1e-12
        gi = np.where(up, -grad, -np.inf)
        gj = np.where(down, -grad, np.inf)
        i = int(np.argmax(gi))
        j = int(np.argmin(gj))
        if gi[i] - gj[j] < config.tolerance:
            converged = True
            break
        # move mass from alpha_j to alpha_i along the feasible direction
        denom = k[i, i] + k[j, j] - 2.0 * k[i, j]
        if denom <= 1e-15:
            denom = 1e-15
        lam = (grad[j] - grad[i]) / denom
        lam = min(lam, c - alpha[i], alpha[j])
        if lam <= 0:
            converged = True
            break
        alpha[i] += lam
        alpha[j] -= lam
        grad += lam * (k[:, i] - k[:, j])

    bias = _solve_bias(alpha, grad, c)
    keep = alpha > 1e-10
    return OcsvmModel(
        support_vectors=x[keep].copy(),
        alphas=alpha[keep].copy(),
        bias=bias,
        kernel=RbfKernelParams(config.gamma),
        nu=config.nu,
        n_train=n,
        converged=converged,
    )


def _solve_bias(alpha, grad, c):
    """bias so that f = 0 at unbounded support vectors; grad = K @ alpha."""
    free = (alpha > 1e-8) & (alpha < c - 1e-8)
    if np.any(free):
        return float(np.mean(grad[free]))
    # no free vectors: midpoint of the KKT interval
    lo = grad[alpha > 1e-8]  # at upper bound (or all support): f <= 0 side
    hi = grad[alpha < c - 1e-8]
    lo_v = np.max(lo) if lo.size else np.min(grad)
    hi_v = np.min(hi) if hi.size else np.max(grad)
    return float(0.5 * (lo_v + hi_v))


def decision_values(model: OcsvmModel, xs) -> np.ndarray:
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim == 1:
        xs = xs[None]
    if xs.shape[1] != model.support_vectors.shape[1]:
        raise DimensionError(
            f"query length {xs.shape[1]} does not match support vectors "
            f"({model.support_vectors.shape[1]})")
    k = rbf_matrix(xs, model.support_vectors, model.kernel.gamma)
    return k @ model.alphas - model.bias


def decision_value(model: OcsvmModel, x) -> float:
    return float(decision_values(model, x)[0])


def predict(model: OcsvmModel, x) -> int:
    """+1 = recognized (non-hazardous), -1 = novel; f(x) = 0 maps to +1."""
    return 1 if decision_value(model, x) >= 0 else -1


def dual_objective(alpha, kmat) -> float:
    return 0.5 * float(alpha @ kmat @ alpha)
