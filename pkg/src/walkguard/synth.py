"""Deterministic synthetic sidewalk corpus.

Normal frames are gray value-noise concrete with periodic darker
expansion-joint lines. Non-hazardous anomalies add a dark filled disk
(manhole-cover analog); hazards add an irregular bright high-contrast blob.
Every frame's noise stream is seeded by (corpus seed, frame index), so a spec
generates a byte-identical corpus every time.
"""

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dataio import resize_bilinear, write_frame, write_labels_csv
from .evalkit import FrameLabel

CHANNEL_GAINS = (1.0, 0.97, 0.94)


@dataclass(frozen=True)
class SynthSpec:
    seed: int = 0
    height: int = 64
    width: int = 64
    train_normal: int = 2000
    test_normal: int = 300
    test_nonhazard: int = 150
    test_hazard: int = 150
    # optional training contamination with non-hazardous anomalies
    train_nonhazard: int = 0


def _frame_rng(seed, index):
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def normal_frame(rng, h, w):
    base = rng.uniform(0.50, 0.68)
    coarse = rng.uniform(-0.08, 0.08, (h // 16 + 2, w // 16 + 2))
    tex = resize_bilinear(coarse[None], (h, w))[0]
    tex = base + tex + rng.normal(0.0, 0.012, (h, w))
    # expansion joints: darker double rows at a random phase
    spacing = max(h // 4, 8)
    phase = int(rng.integers(0, spacing))
    rows = (np.arange(h) - phase) % spacing < 2
    tex[rows] -= 0.15
    frame = np.stack([tex * g for g in CHANNEL_GAINS])
    return np.clip(frame, 0.0, 1.0)


def add_disk(frame, rng):
    """Dark filled disk; returns the anomaly mask."""
    h, w = frame.shape[1:]
    radius = rng.uniform(0.10, 0.16) * min(h, w)
    cy = rng.uniform(0.30, 0.70) * h
    cx = rng.uniform(0.30, 0.70) * w
    yy, xx = np.mgrid[0:h, 0:w]
    mask = (yy - cy) ** 2 + (xx - cx) ** 2 <= radius ** 2
    for c, level in enumerate((0.10, 0.10, 0.12)):
        frame[c][mask] = level
    return mask


def add_hazard_blob(frame, rng):
    """Irregular bright star-shaped blob; returns the anomaly mask."""
    h, w = frame.shape[1:]
    cy = rng.uniform(0.30, 0.70) * h
    cx = rng.uniform(0.30, 0.70) * w
    n_spokes = 12
    angles = np.linspace(-np.pi, np.pi, n_spokes, endpoint=False)
    angles = angles + rng.uniform(-0.1, 0.1, n_spokes)
    radii = rng.uniform(0.08, 0.20, n_spokes) * min(h, w)
    order = np.argsort(angles)
    angles, radii = angles[order], radii[order]

    yy, xx = np.mgrid[0:h, 0:w]
    theta = np.arctan2(yy - cy, xx - cx)
    dist = np.hypot(yy - cy, xx - cx)
    boundary = np.interp(theta, angles, radii, period=2 * np.pi)
    mask = dist <= boundary
    for c, level in enumerate((0.98, 0.92, 0.55)):
        frame[c][mask] = level
    return mask


def _mask_frame(mask):
    return np.repeat(mask[None].astype(np.float64), 3, axis=0)


def generate_corpus(spec: SynthSpec, out_dir):
    """Write the corpus tree; returns the root path.

    Layout: train/normal/ (plus train/nonhazard/ when contaminated),
    test/{normal,nonhazard,hazard}/, masks/ (test anomalies), labels.csv
    covering the test split.
    """
    root = Path(out_dir)
    (root / "masks").mkdir(parents=True, exist_ok=True)

    index = 0
    labels = []

    def emit(subdir, stem, kind, with_mask_label=None):
        nonlocal index
        rng = _frame_rng(spec.seed, index)
        frame = normal_frame(rng, spec.height, spec.width)
        mask = None
        if kind == FrameLabel.ANOMALY_NONHAZARD:
            mask = add_disk(frame, rng)
        elif kind == FrameLabel.HAZARD:
            mask = add_hazard_blob(frame, rng)
        path = root / subdir / f"{stem}_{index:05d}.ppm"
        path.parent.mkdir(parents=True, exist_ok=True)
        write_frame(path, frame)
        if mask is not None and with_mask_label:
            write_frame(root / "masks" / path.name, _mask_frame(mask))
        if with_mask_label:
            labels.append((str(path.relative_to(root)), kind))
        index += 1

    for _ in range(spec.train_normal):
        emit("train/normal", "normal", FrameLabel.NORMAL)
    for _ in range(spec.train_nonhazard):
        emit("train/nonhazard", "nonhaz", FrameLabel.ANOMALY_NONHAZARD)
    for _ in range(spec.test_normal):
        emit("test/normal", "normal", FrameLabel.NORMAL, with_mask_label=True)
    for _ in range(spec.test_nonhazard):
        emit("test/nonhazard", "nonhaz", FrameLabel.ANOMALY_NONHAZARD,
             with_mask_label=True)
    for _ in range(spec.test_hazard):
        emit("test/hazard", "hazard", FrameLabel.HAZARD, with_mask_label=True)

    write_labels_csv(root / "labels.csv", labels)
    return root
