"""Command-line interface.

Exit codes: 0 success, 1 usage/config error, 2 data or file-format error,
3 numeric or training failure.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import dataio, evalkit, latentprep, ocsvm, pipeline, synth, vae
from .errors import (ConfigError, DataError, FormatError, NumericError,
                     TrainingError, WalkguardError)


class UsageError(WalkguardError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _load_resized(directory, config):
    paths, frames = dataio.load_frames(directory)
    c, h, w = config.input_shape
    if frames.shape[1:] != (c, h, w):
        frames = np.stack([dataio.resize_bilinear(f, (h, w)) for f in frames])
    return paths, frames


def _scores(models, frames, sample_count, seed):
    return np.array([
        vae.reconstruction_score(models.vae, f, sample_count=sample_count,
                                 rng=pipeline.frame_seed(seed, i))
        for i, f in enumerate(frames)
    ])


def cmd_synth(args):
    spec = synth.SynthSpec(seed=args.seed, height=args.height, width=args.width,
                           train_normal=args.train, test_normal=args.test_normal,
                           test_nonhazard=args.test_nonhazard,
                           test_hazard=args.test_hazard)
    generated = synth.generate_corpus(spec, args.out)
    print(f"wrote corpus to {generated}")
    return 0


def cmd_train_vae(args):
    config = vae.VaeConfig.from_preset(args.preset)
    _, frames = _load_resized(args.data, config)
    settings = vae.TrainSettings(epochs=args.epochs, batch_size=args.batch,
                                 lr=args.lr)
    log = []
    model = vae.train_vae(frames, config, settings, seed=args.seed, log_lines=log)
    for line in log:
        print(line)
    models = pipeline.Models(vae=model)
    dataio.save_bundle(dataio.pack_models(models), args.out)
    print(f"saved bundle to {args.out}")
    return 0


def cmd_calibrate(args):
    models, _ = dataio.unpack_models(dataio.load_bundle(args.bundle))
    _, frames = _load_resized(args.data, models.vae.config)
    scores = _scores(models, frames, args.samples, args.seed)
    value = float(np.quantile(scores, args.quantile))
    print(f"{value:.6f}")
    return 0


def cmd_train_ocsvm(args):
    models, cfg = dataio.unpack_models(dataio.load_bundle(args.bundle))
    _, frames = _load_resized(args.data, models.vae.config)
    latents = np.stack([models.vae.encode(f).mu for f in frames])
    normalizer = latentprep.normalizer_fit(latents)
    normed = latentprep.normalizer_apply(normalizer, latents)
    pca = latentprep.pca_fit(normed, retained_variance=args.pca_var)
    feats = latentprep.pca_apply(pca, normed)
    svm = ocsvm.fit(feats, ocsvm.OcsvmTrainConfig(nu=args.nu, gamma=args.gamma))
    if not svm.converged:
        print("warning: OCSVM did not converge within max_passes", file=sys.stderr)
    models.normalizer = normalizer
    models.pca = pca
    models.ocsvm = svm
    dataio.save_bundle(dataio.pack_models(models, cfg), args.out)
    print(f"saved bundle to {args.out} "
          f"({feats.shape[1]} PCA features, {svm.alphas.size} support vectors)")
    return 0


def cmd_infer(args):
    models, _ = dataio.unpack_models(dataio.load_bundle(args.bundle))
    models.check_compatible()
    config = pipeline.PipelineConfig(threshold=args.threshold)
    paths, frames = _load_resized(args.frames, models.vae.config)
    heat_dir = Path(args.heatmaps) if args.heatmaps else None
    if heat_dir:
        heat_dir.mkdir(parents=True, exist_ok=True)
    lines = [",".join(pipeline.ALERT_FIELDS)]
    for i, (path, frame) in enumerate(zip(paths, frames)):
        verdict = pipeline.classify_frame(models, config, frame,
                                          rng=pipeline.frame_seed(args.seed, i))
        lines.append(pipeline.alert_line(path.name, verdict))
        if heat_dir and verdict.heatmap is not None:
            hm = verdict.heatmap
            peak = hm.max()
            gray = hm / peak if peak > 0 else hm
            dataio.write_frame(heat_dir / path.name, np.repeat(gray[None], 3, 0))
    Path(args.alerts).write_text("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} alerts to {args.alerts}")
    return 0


def cmd_eval(args):
    models, _ = dataio.unpack_models(dataio.load_bundle(args.bundle))
    if args.mode == "hybrid":
        models.check_compatible()
    rows = dataio.read_labels_csv(args.labels)
    root = Path(args.data)
    frames = np.stack([dataio.read_frame(root / rel) for rel, _ in rows])
    labels = [lab for _, lab in rows]
    c, h, w = models.vae.config.input_shape
    if frames.shape[1:] != (c, h, w):
        frames = np.stack([dataio.resize_bilinear(f, (h, w)) for f in frames])

    scores = _scores(models, frames, 10, args.seed)
    is_anomaly = [lab != evalkit.FrameLabel.NORMAL for lab in labels]
    points = evalkit.roc_curve(scores, is_anomaly, evalkit.default_thresholds())
    if args.roc:
        with open(args.roc, "w") as fh:
            fh.write("threshold,fpr,tpr\n")
            for p in points:
                fh.write(f"{p.threshold:.6f},{p.false_positive_rate:.6f},"
                         f"{p.true_positive_rate:.6f}\n")
    area = evalkit.auc(points)

    if args.mode == "vae-only":
        pred_hazard = [s >= args.threshold for s in scores]
    else:
        config = pipeline.PipelineConfig(threshold=args.threshold)
        pred_hazard = []
        for i, frame in enumerate(frames):
            verdict = pipeline.classify_frame(models, config, frame,
                                              rng=pipeline.frame_seed(args.seed, i))
            pred_hazard.append(verdict.kind == pipeline.VerdictKind.HAZARD)

    cm = evalkit.confusion_matrix(pred_hazard, labels)
    acc = evalkit.accuracy(cm)
    print(f"mode: {args.mode} (positive class for ROC: anomaly vs normal)")
    print(f"AUC: {area:.4f}")
    print(f"true non-hazardous:  {cm.true_nonhazard}")
    print(f"false hazardous:     {cm.false_hazard}")
    print(f"false non-hazardous: {cm.false_nonhazard}")
    print(f"true hazardous:      {cm.true_hazard}")
    print(f"accuracy: {acc:.3f}")
    print(f"cm,{cm.true_nonhazard},{cm.false_hazard},{cm.false_nonhazard},"
          f"{cm.true_hazard},{acc:.6f}")
    return 0


def build_parser():
    parser = _Parser(prog="walkguard",
                     description="Hybrid VAE + OCSVM sidewalk hazard detector")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate the synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--train", type=int, default=2000)
    p.add_argument("--test-normal", type=int, default=300)
    p.add_argument("--test-nonhazard", type=int, default=150)
    p.add_argument("--test-hazard", type=int, default=150)
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--height", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train-vae", help="train the VAE on normal frames")
    p.add_argument("--data", required=True)
    p.add_argument("--preset", choices=["desk", "canonical"], default="desk")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--batch", type=int, default=16)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_vae)

    p = sub.add_parser("calibrate", help="print the score quantile of a frame set")
    p.add_argument("--bundle", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--quantile", type=float, default=0.995)
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("train-ocsvm",
                       help="fit normalizer, PCA and OCSVM on anomaly frames")
    p.add_argument("--bundle", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--nu", type=float, default=0.5)
    p.add_argument("--gamma", type=float, default=0.5)
    p.add_argument("--pca-var", type=float, default=0.95)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_ocsvm)

    p = sub.add_parser("infer", help="classify frames and write the alert stream")
    p.add_argument("--bundle", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--frames", required=True)
    p.add_argument("--alerts", required=True)
    p.add_argument("--heatmaps", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("eval", help="ROC/AUC and confusion matrix on a labeled set")
    p.add_argument("--bundle", required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--roc", default=None)
    p.add_argument("--mode", choices=["vae-only", "hybrid"], default="vae-only")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (DataError, FormatError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except (TrainingError, NumericError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except (UsageError, ConfigError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
