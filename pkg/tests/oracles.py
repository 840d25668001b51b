"""Independent reference implementations used only as test oracles."""

import numpy as np


def naive_conv2d(x, w, stride, padding):
    """Direct six-nested-loop cross-correlation; deliberately unvectorized."""
    cout, cin, k, _ = w.shape
    c, h, wd = x.shape
    ho = (h + 2 * padding - k) // stride + 1
    wo = (wd + 2 * padding - k) // stride + 1
    y = np.zeros((cout, ho, wo), dtype=x.dtype)
    for co in range(cout):
        for oh in range(ho):
            for ow in range(wo):
                acc = 0.0
                for ci in range(cin):
                    for ki in range(k):
                        for kj in range(k):
                            ih = oh * stride - padding + ki
                            iw = ow * stride - padding + kj
                            if 0 <= ih < h and 0 <= iw < wd:
                                acc += x[ci, ih, iw] * w[co, ci, ki, kj]
                y[co, oh, ow] = acc
    return y


def flood_fill_components(mask):
    """4-connected component labeling by explicit BFS flood fill."""
    h, w = mask.shape
    labels = np.zeros((h, w), dtype=int)
    current = 0
    for sy in range(h):
        for sx in range(w):
            if not mask[sy, sx] or labels[sy, sx]:
                continue
            current += 1
            stack = [(sy, sx)]
            labels[sy, sx] = current
            while stack:
                y, x = stack.pop()
                for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
                    if (0 <= ny < h and 0 <= nx < w and mask[ny, nx]
                            and not labels[ny, nx]):
                        labels[ny, nx] = current
                        stack.append((ny, nx))
    return labels, current


def project_box_simplex(v, c):
    """Euclidean projection onto {0 <= a_i <= c, sum a = 1} by bisection."""
    lo, hi = v.min() - c - 1.0, v.max() + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.clip(v - mid, 0.0, c).sum() > 1.0:
            lo = mid
        else:
            hi = mid
    return np.clip(v - 0.5 * (lo + hi), 0.0, c)


def rbf_gram(xs, gamma):
    sq = (np.sum(xs ** 2, axis=1)[:, None] + np.sum(xs ** 2, axis=1)[None, :]
          - 2.0 * xs @ xs.T)
    return np.exp(-gamma * np.maximum(sq, 0.0))


def qp_fit_projected_gradient(xs, nu, gamma, iters=200_000, tol=1e-14):
    """Dense projected-gradient solve of the one-class dual.

    Returns (alpha, bias, objective). Bias follows the same KKT rule as the
    solver under test: f = 0 averaged over unbounded support vectors.
    """
    xs = np.asarray(xs, dtype=np.float64)
    n = xs.shape[0]
    c = 1.0 / (nu * n)
    kmat = rbf_gram(xs, gamma)
    step = 1.0 / max(np.linalg.eigvalsh(kmat).max(), 1e-12)
    alpha = np.full(n, 1.0 / n)
    for _ in range(iters):
        new = project_box_simplex(alpha - step * (kmat @ alpha), c)
        if np.max(np.abs(new - alpha)) < tol:
            alpha = new
            break
        alpha = new
    grad = kmat @ alpha
    free = (alpha > 1e-8) & (alpha < c - 1e-8)
    if np.any(free):
        bias = float(np.mean(grad[free]))
    else:
        lo = grad[alpha > 1e-8]
        hi = grad[alpha < c - 1e-8]
        lo_v = np.max(lo) if lo.size else np.min(grad)
        hi_v = np.min(hi) if hi.size else np.max(grad)
        bias = float(0.5 * (lo_v + hi_v))
    objective = 0.5 * float(alpha @ kmat @ alpha)
    return alpha, bias, objective


def qp_decision_values(xs_train, alpha, bias, gamma, queries):
    sq = (np.sum(queries ** 2, axis=1)[:, None]
          + np.sum(xs_train ** 2, axis=1)[None, :] - 2.0 * queries @ xs_train.T)
    return np.exp(-gamma * np.maximum(sq, 0.0)) @ alpha - bias


def top_eigenpairs_power_iteration(cov, k, iters=5000, seed=0):
    """Leading eigenpairs by power iteration with deflation."""
    rng = np.random.default_rng(seed)
    a = np.array(cov, dtype=np.float64)
    d = a.shape[0]
    vals, vecs = [], []
    for _ in range(k):
        v = rng.normal(size=d)
        v /= np.linalg.norm(v)
        for _ in range(iters):
            v = a @ v
            norm = np.linalg.norm(v)
            if norm == 0:
                break
            v /= norm
        lam = float(v @ a @ v)
        vals.append(lam)
        vecs.append(v.copy())
        a = a - lam * np.outer(v, v)
    return np.array(vals), np.array(vecs)
