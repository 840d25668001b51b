import filecmp
from pathlib import Path

import numpy as np
import pytest

from walkguard import dataio, synth
from walkguard.evalkit import FrameLabel

SMALL = synth.SynthSpec(seed=5, height=32, width=32, train_normal=6,
                        test_normal=4, test_nonhazard=3, test_hazard=3)


def _tree_bytes(root):
    return {p.relative_to(root): p.read_bytes()
            for p in sorted(Path(root).rglob("*")) if p.is_file()}


def test_same_seed_gives_byte_identical_corpus(tmp_path):
    a = synth.generate_corpus(SMALL, tmp_path / "a")
    b = synth.generate_corpus(SMALL, tmp_path / "b")
    ta, tb = _tree_bytes(a), _tree_bytes(b)
    assert set(ta) == set(tb)
    for rel, data in ta.items():
        assert data == tb[rel], rel


def test_different_seed_differs(tmp_path):
    a = synth.generate_corpus(SMALL, tmp_path / "a")
    other = synth.SynthSpec(**{**SMALL.__dict__, "seed": 6})
    b = synth.generate_corpus(other, tmp_path / "b")
    match, mismatch, errors = filecmp.cmpfiles(
        a / "train/normal", b / "train/normal",
        [p.name for p in (a / "train/normal").iterdir()], shallow=False)
    assert not match and not errors


def test_layout_and_label_counts(tmp_path):
    root = synth.generate_corpus(SMALL, tmp_path / "c")
    assert len(list((root / "train/normal").glob("*.ppm"))) == 6
    assert len(list((root / "test/normal").glob("*.ppm"))) == 4
    assert len(list((root / "test/nonhazard").glob("*.ppm"))) == 3
    assert len(list((root / "test/hazard").glob("*.ppm"))) == 3
    assert len(list((root / "masks").glob("*.ppm"))) == 6  # test anomalies only

    rows = dataio.read_labels_csv(root / "labels.csv")
    counts = {}
    for rel, label in rows:
        counts[label] = counts.get(label, 0) + 1
        assert (root / rel).is_file()
    assert counts == {FrameLabel.NORMAL: 4,
                      FrameLabel.ANOMALY_NONHAZARD: 3,
                      FrameLabel.HAZARD: 3}


def test_disk_region_is_darker_than_surroundings():
    rng = np.random.default_rng(0)
    frame = synth.normal_frame(rng, 48, 48)
    mask = synth.add_disk(frame, rng)
    assert mask.any() and not mask.all()
    inside = frame[:, mask].mean()
    outside = frame[:, ~mask].mean()
    assert outside - inside >= 0.2


def test_hazard_region_is_brighter_and_masks_line_up(tmp_path):
    root = synth.generate_corpus(SMALL, tmp_path / "d")
    for path in (root / "test/hazard").glob("*.ppm"):
        frame = dataio.read_frame(path)
        mask = dataio.read_frame(root / "masks" / path.name)[0] > 0.5
        assert mask.any()
        assert frame[0][mask].mean() > frame[0][~mask].mean() + 0.2


def test_normal_frames_stay_in_range_and_have_joints():
    rng = np.random.default_rng(3)
    frame = synth.normal_frame(rng, 64, 64)
    assert frame.shape == (3, 64, 64)
    assert frame.min() >= 0.0 and frame.max() <= 1.0
    # the darker joint rows drag some row means well below the others
    row_means = frame.mean(axis=(0, 2))
    assert row_means.min() < row_means.max() - 0.08
