"""Frame codecs (binary PPM), resize, brightness, labels CSV, model bundle.

The bundle is a flat binary container of named float tensors grouped into
sections; it round-trips every stored value bit-exactly.
"""

import csv
import io
import struct
from pathlib import Path

import numpy as np

from . import latentprep, ocsvm, pipeline, vae
from .errors import BundleVersionError, DataError, FormatError
from .evalkit import FrameLabel

# ---------------------------------------------------------------------------
# PPM (NetPBM P6) codec


def _read_token(stream) -> bytes:
    """Next whitespace-delimited header token, skipping '#' comment lines."""
    token = b""
    while True:
        ch = stream.read(1)
        if ch == b"":
            raise FormatError("truncated PPM header")
        if ch == b"#":
            while ch not in (b"\n", b""):
                ch = stream.read(1)
            continue
        if ch.isspace():
            if token:
                return token
            continue
        token += ch


def decode_ppm(data: bytes) -> np.ndarray:
    """P6 bytes -> (3, H, W) float array in [0, 1]."""
    stream = io.BytesIO(data)
    magic = stream.read(2)
    if magic != b"P6":
        raise FormatError(f"not a binary PPM stream (magic {magic!r})")
    width = int(_read_token(stream))
    height = int(_read_token(stream))
    maxval = int(_read_token(stream))
    if maxval != 255:
        raise FormatError(f"unsupported maxval {maxval} (only 255)")
    raw = stream.read(3 * width * height)
    if len(raw) != 3 * width * height:
        raise FormatError("truncated PPM pixel data")
    img = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3)
    return img.transpose(2, 0, 1).astype(np.float64) / 255.0


def encode_ppm(frame) -> bytes:
    """(3, H, W) values in [0, 1] -> P6 bytes, round-half-up to 8 bit."""
    frame = np.asarray(frame)
    if frame.ndim != 3 or frame.shape[0] != 3:
        raise FormatError(f"expected (3, H, W) frame, got {frame.shape}")
    h, w = frame.shape[1:]
    vals = np.floor(np.clip(frame, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    header = f"P6\n{w} {h}\n255\n".encode("ascii")
    return header + vals.transpose(1, 2, 0).tobytes()


def read_frame(path) -> np.ndarray:
    return decode_ppm(Path(path).read_bytes())


def write_frame(path, frame) -> None:
    Path(path).write_bytes(encode_ppm(frame))


# ---------------------------------------------------------------------------
# Resize and brightness


def resize_bilinear(frame, new_hw):
    """Bilinear resample with half-pixel-centered sampling."""
    frame = np.asarray(frame, dtype=np.float64)
    nh, nw = new_hw
    if nh <= 0 or nw <= 0:
        raise ValueError("target dims must be positive")
    c, h, w = frame.shape
    if (nh, nw) == (h, w):
        return frame.copy()

    def axis_coords(n_new, n_old):
        src = (np.arange(n_new) + 0.5) * (n_old / n_new) - 0.5
        src = np.clip(src, 0, n_old - 1)
        lo = np.floor(src).astype(int)
        hi = np.minimum(lo + 1, n_old - 1)
        return lo, hi, src - lo

    ylo, yhi, yt = axis_coords(nh, h)
    xlo, xhi, xt = axis_coords(nw, w)
    top = frame[:, ylo][:, :, xlo] * (1 - xt) + frame[:, ylo][:, :, xhi] * xt
    bot = frame[:, yhi][:, :, xlo] * (1 - xt) + frame[:, yhi][:, :, xhi] * xt
    return top * (1 - yt[None, :, None]) + bot * yt[None, :, None]


def augment_brightness(frame, factor):
    if factor <= 0:
        raise ValueError("brightness factor must be positive")
    return np.clip(np.asarray(frame, dtype=np.float64) * factor, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Dataset loading and labels CSV

LABEL_NAMES = {lab.value: lab for lab in FrameLabel}


def list_frames(directory):
    """Sorted .ppm paths under a directory tree (masks/ excluded)."""
    root = Path(directory)
    if not root.is_dir():
        raise DataError(f"not a directory: {root}")
    return sorted(p for p in root.rglob("*.ppm") if "masks" not in p.parts)


def load_frames(directory):
    paths = list_frames(directory)
    if not paths:
        raise DataError(f"no .ppm frames under {directory}")
    return paths, np.stack([read_frame(p) for p in paths])


def write_labels_csv(path, rows) -> None:
    """rows: iterable of (relative frame path, FrameLabel)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["frame_path", "label"])
        for frame_path, label in rows:
            writer.writerow([frame_path, label.value])


def read_labels_csv(path):
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["frame_path", "label"]:
            raise FormatError(f"bad labels header {header!r}")
        for rec in reader:
            if not rec:
                continue
            if len(rec) != 2 or rec[1] not in LABEL_NAMES:
                raise FormatError(f"bad labels row {rec!r}")
            rows.append((rec[0], LABEL_NAMES[rec[1]]))
    return rows


# ---------------------------------------------------------------------------
# Model bundle

BUNDLE_MAGIC = b"VOCS"
BUNDLE_VERSION = 1
_SECTION_PREFIX = "@section/"
_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}
_DTYPE_CODES = {np.dtype(np.float32): 0, np.dtype(np.float64): 1}


def _write_entry(out, name, array):
    array = np.asarray(array)
    code = _DTYPE_CODES.get(array.dtype)
    if code is None:
        raise FormatError(f"unsupported dtype {array.dtype} for entry {name!r}")
    nb = name.encode("utf-8")
    out.write(struct.pack("<H", len(nb)))
    out.write(nb)
    out.write(struct.pack("<B", array.ndim))
    for d in array.shape:
        out.write(struct.pack("<I", d))
    out.write(struct.pack("<B", code))
    out.write(np.ascontiguousarray(array, dtype=_DTYPES[code]).tobytes())


def save_bundle(bundle, path) -> None:
    """bundle: dict section -> dict name -> array (float32/float64)."""
    with open(path, "wb") as out:
        out.write(BUNDLE_MAGIC)
        out.write(struct.pack("<I", BUNDLE_VERSION))
        for section, entries in bundle.items():
            _write_entry(out, _SECTION_PREFIX + section, np.float64(0.0))
            for name, array in entries.items():
                _write_entry(out, name, array)


def _read_exact(fh, n, what):
    data = fh.read(n)
    if len(data) != n:
        raise FormatError(f"truncated bundle while reading {what}")
    return data


def load_bundle(path):
    bundle = {}
    with open(path, "rb") as fh:
        if _read_exact(fh, 4, "magic") != BUNDLE_MAGIC:
            raise FormatError("bad bundle magic")
        (version,) = struct.unpack("<I", _read_exact(fh, 4, "version"))
        if version > BUNDLE_VERSION:
            raise BundleVersionError(f"bundle version {version} is newer than "
                                     f"supported {BUNDLE_VERSION}")
        section = None
        while True:
            head = fh.read(2)
            if head == b"":
                break
            (name_len,) = struct.unpack("<H", head)
            name = _read_exact(fh, name_len, "entry name").decode("utf-8")
            (rank,) = struct.unpack("<B", _read_exact(fh, 1, "rank"))
            dims = [struct.unpack("<I", _read_exact(fh, 4, "dims"))[0]
                    for _ in range(rank)]
            (code,) = struct.unpack("<B", _read_exact(fh, 1, "dtype"))
            if code not in _DTYPES:
                raise FormatError(f"unknown dtype code {code} in entry {name!r}")
            dtype = _DTYPES[code]
            count = int(np.prod(dims, dtype=np.int64)) if dims else 1
            raw = _read_exact(fh, count * dtype.itemsize, f"data of {name!r}")
            array = np.frombuffer(raw, dtype=dtype).reshape(dims).copy()
            if name.startswith(_SECTION_PREFIX):
                section = name[len(_SECTION_PREFIX):]
                bundle[section] = {}
            else:
                if section is None:
                    raise FormatError(f"entry {name!r} before any section")
                bundle[section][name] = array
    return bundle


# -- packing models into bundle sections ------------------------------------


def pack_models(models: "pipeline.Models", config=None):
    bundle = {}
    vm = models.vae
    sec = {
        "input_shape": np.asarray(vm.config.input_shape, dtype=np.float64),
        "channels": np.asarray(vm.config.channels, dtype=np.float64),
        "latent_dim": np.float64(vm.config.latent_dim),
    }
    for name, param in vm.parameters().items():
        sec["param/" + name] = param
    bundle["vae"] = sec

    if models.normalizer is not None:
        bundle["normalizer"] = {
            "mins": models.normalizer.mins,
            "maxs": models.normalizer.maxs,
        }
    if models.pca is not None:
        bundle["pca"] = {
            "mean": models.pca.mean,
            "components": models.pca.components,
            "explained_variance": models.pca.explained_variance,
            "retained_variance": np.float64(models.pca.retained_variance),
        }
    if models.ocsvm is not None:
        m = models.ocsvm
        bundle["ocsvm"] = {
            "support_vectors": m.support_vectors,
            "alphas": m.alphas,
            "bias": np.float64(m.bias),
            "gamma": np.float64(m.kernel.gamma),
            "nu": np.float64(m.nu),
            "n_train": np.float64(m.n_train),
            "converged": np.float64(1.0 if m.converged else 0.0),
        }
    if config is not None:
        bundle["pipeline"] = {
            "threshold": np.float64(config.threshold),
            "sample_count": np.float64(config.sample_count),
            "mask_sigmas": np.float64(config.mask_sigmas),
            "min_blob_frac": np.float64(config.min_blob_frac),
        }
    return bundle


def unpack_models(bundle):
    if "vae" not in bundle:
        raise FormatError("bundle has no vae section")
    sec = bundle["vae"]
    config = vae.VaeConfig(
        input_shape=tuple(int(v) for v in sec["input_shape"]),
        channels=tuple(int(v) for v in sec["channels"]),
        latent_dim=int(sec["latent_dim"]),
    )
    vm = vae.VaeModel(config, seed=0)
    for name, param in vm.parameters().items():
        key = "param/" + name
        if key not in sec:
            raise FormatError(f"bundle missing VAE parameter {name!r}")
        stored = sec[key]
        if stored.shape != param.shape:
            raise FormatError(f"VAE parameter {name!r} has shape {stored.shape}, "
                              f"expected {param.shape}")
        param[...] = stored

    normalizer = pca = svm = None
    if "normalizer" in bundle:
        normalizer = latentprep.NormalizerModel(
            mins=bundle["normalizer"]["mins"], maxs=bundle["normalizer"]["maxs"])
    if "pca" in bundle:
        s = bundle["pca"]
        pca = latentprep.PcaModel(
            mean=s["mean"], components=s["components"],
            explained_variance=s["explained_variance"],
            retained_variance=float(s["retained_variance"]))
    if "ocsvm" in bundle:
        s = bundle["ocsvm"]
        svm = ocsvm.OcsvmModel(
            support_vectors=s["support_vectors"], alphas=s["alphas"],
            bias=float(s["bias"]), kernel=ocsvm.RbfKernelParams(float(s["gamma"])),
            nu=float(s["nu"]), n_train=int(s["n_train"]),
            converged=bool(s["converged"]))

    config_out = None
    if "pipeline" in bundle:
        s = bundle["pipeline"]
        config_out = pipeline.PipelineConfig(
            threshold=float(s["threshold"]),
            sample_count=int(s["sample_count"]),
            mask_sigmas=float(s["mask_sigmas"]),
            min_blob_frac=float(s["min_blob_frac"]))
    return pipeline.Models(vae=vm, normalizer=normalizer, pca=pca,
                           ocsvm=svm), config_out
