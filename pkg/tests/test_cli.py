"""End-to-end checks of the command-line interface on a tiny corpus."""

import numpy as np
import pytest

from walkguard import cli, dataio


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Tiny corpus plus trained bundles shared by the CLI tests."""
    root = tmp_path_factory.mktemp("cliws")
    corpus = root / "corpus"
    rc = cli.main(["synth", "--out", str(corpus), "--train", "12",
                   "--test-normal", "6", "--test-nonhazard", "4",
                   "--test-hazard", "4", "--width", "64", "--height", "64",
                   "--seed", "21"])
    assert rc == 0
    vae_bundle = root / "vae.bundle"
    rc = cli.main(["train-vae", "--data", str(corpus / "train/normal"),
                   "--preset", "desk", "--epochs", "2", "--batch", "4",
                   "--seed", "1", "--out", str(vae_bundle)])
    assert rc == 0
    full_bundle = root / "full.bundle"
    rc = cli.main(["train-ocsvm", "--bundle", str(vae_bundle),
                   "--data", str(corpus / "test/nonhazard"),
                   "--nu", "0.5", "--gamma", "0.5", "--pca-var", "0.95",
                   "--out", str(full_bundle)])
    assert rc == 0
    return {"root": root, "corpus": corpus,
            "vae_bundle": vae_bundle, "full_bundle": full_bundle}


def test_train_vae_logs_epochs(workspace, capsys, tmp_path):
    out = tmp_path / "v.bundle"
    rc = cli.main(["train-vae", "--data", str(workspace["corpus"] / "train/normal"),
                   "--preset", "desk", "--epochs", "2", "--batch", "4",
                   "--seed", "1", "--out", str(out)])
    captured = capsys.readouterr().out
    assert rc == 0 and out.is_file()
    epoch_lines = [l for l in captured.splitlines() if "\t" in l]
    assert len(epoch_lines) == 2
    # epoch, total loss, reconstruction term, KL term
    assert all(len(l.split("\t")) == 4 for l in epoch_lines)
    assert epoch_lines[0].split("\t")[0] == "1"


def test_calibrate_prints_a_number(workspace, capsys):
    rc = cli.main(["calibrate", "--bundle", str(workspace["vae_bundle"]),
                   "--data", str(workspace["corpus"] / "train/normal"),
                   "--quantile", "0.9", "--seed", "7"])
    assert rc == 0
    value = float(capsys.readouterr().out.strip())
    assert value > 0


def test_infer_writes_alert_stream(workspace, capsys, tmp_path):
    alerts = tmp_path / "alerts.csv"
    heat = tmp_path / "heat"
    rc = cli.main(["infer", "--bundle", str(workspace["full_bundle"]),
                   "--threshold", "50", "--frames",
                   str(workspace["corpus"] / "test/hazard"),
                   "--alerts", str(alerts), "--heatmaps", str(heat),
                   "--seed", "3"])
    assert rc == 0
    lines = alerts.read_text().splitlines()
    assert lines[0] == ("frame,kind,vae_score,ocsvm_value,"
                        "bbox_x,bbox_y,bbox_w,bbox_h")
    assert len(lines) == 5  # header + 4 hazard frames
    kinds = {l.split(",")[1] for l in lines[1:]}
    assert kinds <= {"no_anomaly", "nonhazard_anomaly", "hazard"}
    hazard_rows = [l for l in lines[1:] if l.split(",")[1] == "hazard"]
    for name in (l.split(",")[0] for l in hazard_rows):
        written = heat / name
        if written.is_file():
            hm = dataio.read_frame(written)
            assert hm.shape == (3, 64, 64)


def test_infer_identical_seeds_identical_alerts(workspace, tmp_path):
    outs = []
    for tag in ("a", "b"):
        alerts = tmp_path / f"{tag}.csv"
        rc = cli.main(["infer", "--bundle", str(workspace["full_bundle"]),
                       "--threshold", "50", "--frames",
                       str(workspace["corpus"] / "test/normal"),
                       "--alerts", str(alerts), "--seed", "11"])
        assert rc == 0
        outs.append(alerts.read_bytes())
    assert outs[0] == outs[1]


def test_eval_both_modes(workspace, capsys, tmp_path):
    roc = tmp_path / "roc.csv"
    for mode in ("vae-only", "hybrid"):
        rc = cli.main(["eval", "--bundle", str(workspace["full_bundle"]),
                       "--threshold", "50", "--data", str(workspace["corpus"]),
                       "--labels", str(workspace["corpus"] / "labels.csv"),
                       "--roc", str(roc), "--mode", mode, "--seed", "5"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "AUC:" in out
        summary = [l for l in out.splitlines() if l.startswith("cm,")][0]
        cells = summary.split(",")[1:5]
        assert sum(int(c) for c in cells) == 14  # 6 + 4 + 4 test frames
    roc_lines = roc.read_text().splitlines()
    assert roc_lines[0] == "threshold,fpr,tpr"
    assert len(roc_lines) == 51


def test_usage_errors_exit_1(capsys):
    assert cli.main([]) == 1
    assert cli.main(["no-such-command"]) == 1
    assert cli.main(["synth"]) == 1  # missing --out
    assert cli.main(["infer", "--bundle", "x", "--threshold", "nope",
                     "--frames", "y", "--alerts", "z"]) == 1
    capsys.readouterr()


def test_missing_data_exits_2(workspace, tmp_path, capsys):
    assert cli.main(["train-vae", "--data", str(tmp_path / "nowhere"),
                     "--out", str(tmp_path / "o.bundle")]) == 2
    assert cli.main(["calibrate", "--bundle", str(tmp_path / "missing.bundle"),
                     "--data", str(workspace["corpus"] / "train/normal")]) == 2
    capsys.readouterr()


def test_corrupt_bundle_exits_2(workspace, tmp_path, capsys):
    bad = tmp_path / "bad.bundle"
    bad.write_bytes(b"not a bundle at all")
    assert cli.main(["calibrate", "--bundle", str(bad),
                     "--data", str(workspace["corpus"] / "train/normal")]) == 2
    capsys.readouterr()


def test_incomplete_bundle_for_infer_exits_1(workspace, tmp_path, capsys):
    # the VAE-only bundle lacks the OCSVM stage
    assert cli.main(["infer", "--bundle", str(workspace["vae_bundle"]),
                     "--threshold", "50",
                     "--frames", str(workspace["corpus"] / "test/normal"),
                     "--alerts", str(tmp_path / "a.csv")]) == 1
    capsys.readouterr()


def test_bad_config_values_exit_1(workspace, tmp_path, capsys):
    assert cli.main(["infer", "--bundle", str(workspace["full_bundle"]),
                     "--threshold", "-5",
                     "--frames", str(workspace["corpus"] / "test/normal"),
                     "--alerts", str(tmp_path / "a.csv")]) == 1
    assert cli.main(["train-ocsvm", "--bundle", str(workspace["vae_bundle"]),
                     "--data", str(workspace["corpus"] / "test/nonhazard"),
                     "--nu", "1.5", "--out", str(tmp_path / "o.bundle")]) == 1
    capsys.readouterr()
