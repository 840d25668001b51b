"""Benchmark the convolution backends and the full encoder forward pass.

Usage:
    python3 benchmarks/bench_conv.py [--repeats N] [--canonical]

Times the three convolution primitives on both backends (numpy im2col vs the
compiled direct-loop extension, when built) at the compact-preset layer sizes,
then reports full-model reconstruction-scoring throughput. The im2col path
delegates its inner product to BLAS and wins comfortably on typical installs,
which is why it is the default backend; set WALKGUARD_BACKEND=ext to override.
"""

import argparse
import time

import numpy as np

from walkguard import vae
from walkguard.nn import kernels

# (label, in_channels, out_channels, spatial, kernel, stride, padding)
LAYERS = [
    ("conv 3->8   64x64 k5 s2", 3, 8, 64, 5, 2, 2),
    ("conv 8->16  32x32 k5 s2", 8, 16, 32, 5, 2, 2),
    ("conv 16->32 16x16 k5 s2", 16, 32, 16, 5, 2, 2),
    ("conv 32->64 8x8   k5 s2", 32, 64, 8, 5, 2, 2),
]


def _time(fn, repeats):
    fn()  # warm up
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_primitives(repeats):
    backends = ["numpy"] + (["ext"] if kernels.ext_available() else [])
    rng = np.random.default_rng(0)
    print(f"{'layer':28s} {'primitive':16s} " +
          " ".join(f"{b + ' (ms)':>12s}" for b in backends) +
          ("        ratio" if len(backends) == 2 else ""))
    for label, cin, cout, hw, k, stride, pad in LAYERS:
        x = rng.random((cin, hw, hw), dtype=np.float32)
        w = rng.random((cout, cin, k, k), dtype=np.float32)
        out_hw = (hw + 2 * pad - k) // stride + 1
        gy = rng.random((cout, out_hw, out_hw), dtype=np.float32)
        cases = [
            ("forward", lambda: kernels.conv2d_forward(x, w, stride, pad)),
            ("backward_weight",
             lambda: kernels.conv2d_backward_weight(x, gy, k, stride, pad)),
            ("backward_input",
             lambda: kernels.conv2d_backward_input(gy, w, stride, pad, (hw, hw))),
        ]
        for prim, fn in cases:
            times = []
            for backend in backends:
                kernels.set_backend(backend)
                times.append(_time(fn, repeats) * 1e3)
            kernels.set_backend("numpy")
            row = f"{label:28s} {prim:16s} " + \
                " ".join(f"{t:12.3f}" for t in times)
            if len(times) == 2:
                row += f" {times[1] / times[0]:11.1f}x"
            print(row)


def bench_model(preset, repeats):
    config = vae.VaeConfig.from_preset(preset)
    model = vae.build_vae(config, seed=0)
    rng = np.random.default_rng(1)
    frame = rng.random(config.input_shape, dtype=np.float32)
    for backend in ["numpy"] + (["ext"] if kernels.ext_available() else []):
        kernels.set_backend(backend)
        t = _time(lambda: vae.reconstruction_score(model, frame, sample_count=1,
                                                   seed=0), repeats)
        print(f"{preset} preset, {backend:5s} backend: "
              f"{t * 1e3:8.1f} ms/frame  ({1.0 / t:6.1f} fps at 1 sample)")
    kernels.set_backend("numpy")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20)
    parser.add_argument("--canonical", action="store_true",
                        help="also time the full-scale preset (slow)")
    args = parser.parse_args()

    print(f"compiled extension available: {kernels.ext_available()}\n")
    bench_primitives(args.repeats)
    print()
    bench_model("desk", max(3, args.repeats // 2))
    if args.canonical:
        bench_model("canonical", 3)


if __name__ == "__main__":
    main()
