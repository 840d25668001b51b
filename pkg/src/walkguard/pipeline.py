"""Hybrid decision flow: VAE score -> threshold -> OCSVM -> three-way verdict.

Frames below the score threshold are clean; the rest are anomalies whose
normalized, PCA-reduced encoder mean is handed to the OCSVM. Rejected
anomalies are hazards and get a reconstruction-error heatmap plus a bounding
box over the largest connected hot region.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import ndimage

from . import latentprep, ocsvm, vae
from .errors import ConfigError, DimensionError


class VerdictKind(Enum):
    NO_ANOMALY = "no_anomaly"
    NONHAZARD_ANOMALY = "nonhazard_anomaly"
    HAZARD = "hazard"


@dataclass(frozen=True)
class PipelineConfig:
    threshold: float
    sample_count: int = 10
    mask_sigmas: float = 2.0      # heatmap mask cut: mean + mask_sigmas * std
    min_blob_frac: float = 0.005  # smallest blob worth a box, fraction of frame

    def __post_init__(self):
        if self.threshold <= 0:
            raise ConfigError("threshold must be positive")
        if self.sample_count < 1:
            raise ConfigError("sample_count must be >= 1")


@dataclass
class HazardVerdict:
    kind: VerdictKind
    vae_score: float
    ocsvm_value: Optional[float] = None
    bbox: Optional[tuple] = None      # (x, y, w, h), origin top-left
    heatmap: Optional[np.ndarray] = None


@dataclass
class Models:
    vae: "vae.VaeModel"
    normalizer: Optional[latentprep.NormalizerModel] = None
    pca: Optional[latentprep.PcaModel] = None
    ocsvm: Optional[ocsvm.OcsvmModel] = None

    def check_compatible(self):
        missing = [name for name in ("normalizer", "pca", "ocsvm")
                   if getattr(self, name) is None]
        if missing:
            raise ConfigError(
                "model bundle is missing stages: " + ", ".join(missing))
        if self.normalizer is not None:
            if self.normalizer.n_features != self.vae.config.latent_dim:
                raise ConfigError(
                    f"normalizer expects {self.normalizer.n_features} features, "
                    f"VAE latent dim is {self.vae.config.latent_dim}")
        if self.pca is not None and self.normalizer is not None:
            if self.pca.mean.shape[0] != self.normalizer.n_features:
                raise ConfigError("PCA input dim does not match normalizer")
        if self.ocsvm is not None and self.pca is not None:
            if self.ocsvm.support_vectors.shape[1] != self.pca.components.shape[0]:
                raise ConfigError("OCSVM feature dim does not match PCA output")


def frame_seed(run_seed: int, frame_index: int) -> np.random.Generator:
    """Per-frame generator so concurrent frame order cannot change results."""
    return np.random.default_rng(np.random.SeedSequence([run_seed, frame_index]))


def error_heatmap(x, reconstruction) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    reconstruction = np.asarray(reconstruction, dtype=np.float64)
    if x.shape != reconstruction.shape:
        raise DimensionError(
            f"frame {x.shape} and reconstruction {reconstruction.shape} differ")
    return np.mean((x - reconstruction) ** 2, axis=0)


def heatmap_to_bbox(heatmap, config: PipelineConfig) -> Optional[tuple]:
    hm = np.asarray(heatmap, dtype=np.float64)
    cut = hm.mean() + config.mask_sigmas * hm.std()
    mask = hm > cut  # strict, so a constant heatmap yields an empty mask
    if not mask.any():
        return None
    labels, count = ndimage.label(mask)  # 4-connected by default
    sizes = ndimage.sum_labels(mask, labels, index=np.arange(1, count + 1))
    best = int(np.argmax(sizes)) + 1
    if sizes[best - 1] < config.min_blob_frac * hm.size:
        return None
    rows, cols = np.nonzero(labels == best)
    x0, y0 = int(cols.min()), int(rows.min())
    return (x0, y0, int(cols.max()) - x0 + 1, int(rows.max()) - y0 + 1)


def classify_frame(models: Models, config: PipelineConfig, frame,
                   rng=None, seed=0) -> HazardVerdict:
    if rng is None:
        rng = np.random.default_rng(seed)
    score = vae.reconstruction_score(models.vae, frame,
                                     sample_count=config.sample_count, rng=rng)
    if score < config.threshold:
        return HazardVerdict(kind=VerdictKind.NO_ANOMALY, vae_score=score)

    enc = models.vae.encode(frame)
    feat = latentprep.normalizer_apply(models.normalizer, enc.mu)
    feat = latentprep.pca_apply(models.pca, feat)
    value = ocsvm.decision_value(models.ocsvm, feat)
    if value >= 0:
        return HazardVerdict(kind=VerdictKind.NONHAZARD_ANOMALY, vae_score=score,
                             ocsvm_value=value)

    recon = models.vae.decode(enc.mu)
    heatmap = error_heatmap(frame, recon)
    bbox = heatmap_to_bbox(heatmap, config)
    return HazardVerdict(kind=VerdictKind.HAZARD, vae_score=score,
                         ocsvm_value=value, bbox=bbox, heatmap=heatmap)


ALERT_FIELDS = ("frame", "kind", "vae_score", "ocsvm_value",
                "bbox_x", "bbox_y", "bbox_w", "bbox_h")


def alert_line(frame_id: str, verdict: HazardVerdict) -> str:
    """One CSV record per frame; absent fields stay empty."""
    vals = [frame_id, verdict.kind.value, f"{verdict.vae_score:.6f}"]
    vals.append("" if verdict.ocsvm_value is None else f"{verdict.ocsvm_value:.6f}")
    if verdict.bbox is None:
        vals += ["", "", "", ""]
    else:
        vals += [str(v) for v in verdict.bbox]
    return ",".join(vals)
