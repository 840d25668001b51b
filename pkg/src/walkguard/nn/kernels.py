"""Backend selection for the convolution kernels.

Two interchangeable backends: the numpy im2col path (default, rides BLAS
matmuls) and the compiled direct-loop extension (WALKGUARD_BACKEND=ext).
Both share the same contracts and are compared in benchmarks/bench_conv.py;
the im2col path wins on BLAS-backed installs, which is why it is the default.
"""

import os

import numpy as np

from . import kernels_numpy

try:
    from . import _convext
except ImportError:
    _convext = None

_requested = os.environ.get("WALKGUARD_BACKEND", "numpy")
if _requested == "ext" and _convext is not None:
    _active = "ext"
else:
    _active = "numpy"


def backend_name() -> str:
    return _active


def ext_available() -> bool:
    return _convext is not None


def set_backend(name: str) -> None:
    """Switch backend at runtime ('numpy' or 'ext'); used by the benchmark."""
    global _active
    if name == "ext" and _convext is None:
        raise RuntimeError("compiled extension is not available")
    if name not in ("numpy", "ext"):
        raise ValueError(f"unknown backend {name!r}")
    _active = name


def _c(a):
    return np.ascontiguousarray(a)


def conv2d_forward(x, w, stride, padding):
    if _active == "ext":
        return _convext.conv2d_forward(_c(x), _c(w), stride, padding)
    return kernels_numpy.conv2d_forward(x, w, stride, padding)


def conv2d_backward_weight(x, gy, k, stride, padding):
    if _active == "ext":
        return _convext.conv2d_backward_weight(_c(x), _c(gy), k, stride, padding)
    return kernels_numpy.conv2d_backward_weight(x, gy, k, stride, padding)


def conv2d_backward_input(gy, w, stride, padding, in_hw):
    if _active == "ext":
        return _convext.conv2d_backward_input(_c(gy), _c(w), stride, padding,
                                              in_hw[0], in_hw[1])
    return kernels_numpy.conv2d_backward_input(gy, w, stride, padding, in_hw)
