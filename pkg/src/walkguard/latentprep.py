"""Feature conditioning between the VAE latent space and the OCSVM.

Fixed order: per-feature min-max normalization to [-1, 1] first, then PCA.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError, DimensionError


@dataclass
class NormalizerModel:
    mins: np.ndarray
    maxs: np.ndarray

    @property
    def n_features(self):
        return self.mins.shape[0]


@dataclass
class PcaModel:
    mean: np.ndarray
    components: np.ndarray        # (k, d), orthonormal rows
    explained_variance: np.ndarray  # (k,), non-increasing
    retained_variance: float


def normalizer_fit(data) -> NormalizerModel:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise DataError("normalizer needs a nonempty (n, d) array")
    return NormalizerModel(mins=x.min(axis=0), maxs=x.max(axis=0))


def normalizer_apply(model: NormalizerModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.n_features:
        raise DimensionError(
            f"feature length {x.shape[-1]} does not match normalizer "
            f"({model.n_features})")
    span = model.maxs - model.mins
    # degenerate (constant) features map to 0
    safe = np.where(span > 0, span, 1.0)
    out = 2.0 * (x - model.mins) / safe - 1.0
    out = np.where(span > 0, out, 0.0)
    return np.clip(out, -1.0, 1.0)


def pca_fit(data, retained_variance=0.95) -> PcaModel:
    x = np.asarray(data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise DataError("PCA needs at least 2 samples")
    if not 0 < retained_variance <= 1:
        raise ValueError("retained_variance must be in (0, 1]")
    mean = x.mean(axis=0)
    cov = np.cov(x - mean, rowvar=False, ddof=1)
    cov = np.atleast_2d(cov)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evals = np.maximum(evals[order], 0.0)
    evecs = evecs[:, order]

    total = float(np.sum(evals))
    if total <= 0:
        k = 1
    else:
        cum = np.cumsum(evals) / total
        k = int(np.searchsorted(cum, retained_variance - 1e-12) + 1)
        k = min(k, evals.shape[0])
    return PcaModel(
        mean=mean,
        components=evecs[:, :k].T.copy(),
        explained_variance=evals[:k].copy(),
        retained_variance=float(retained_variance),
    )


def pca_apply(model: PcaModel, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.mean.shape[0]:
        raise DimensionError(
            f"feature length {x.shape[-1]} does not match PCA input "
            f"({model.mean.shape[0]})")
    return (x - model.mean) @ model.components.T
