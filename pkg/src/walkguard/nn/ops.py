"""Functional layer arithmetic on single images / vectors.

Shapes follow the usual conventions: images are C x H x W, conv weights are
(out_ch, in_ch, k, k), transposed-conv weights are (in_ch, out_ch, k, k).
"""

import numpy as np

from ..errors import DimensionError
from . import kernels


def conv_out_size(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size + 2 * padding - kernel) // stride + 1


def conv_transpose_out_size(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size - 1) * stride - 2 * padding + kernel


def conv2d(x, w, b, stride=1, padding=0):
    if x.ndim != 3:
        raise DimensionError(f"conv2d input must be 3-D C x H x W, got {x.ndim}-D")
    if w.ndim != 4 or w.shape[2] != w.shape[3]:
        raise DimensionError(f"conv2d weights must be (out, in, k, k), got {w.shape}")
    if x.shape[0] != w.shape[1]:
        raise DimensionError(
            f"channel axis mismatch: input has {x.shape[0]} channels, "
            f"weights expect {w.shape[1]}")
    if b.shape != (w.shape[0],):
        raise DimensionError(
            f"bias axis mismatch: expected length {w.shape[0]}, got {b.shape}")
    y = kernels.conv2d_forward(x, w, stride, padding)
    return y + b[:, None, None]


def conv_transpose2d(x, w, b, stride=1, padding=0):
    if x.ndim != 3:
        raise DimensionError(f"conv_transpose2d input must be 3-D, got {x.ndim}-D")
    if w.ndim != 4 or w.shape[2] != w.shape[3]:
        raise DimensionError(
            f"conv_transpose2d weights must be (in, out, k, k), got {w.shape}")
    if x.shape[0] != w.shape[0]:
        raise DimensionError(
            f"channel axis mismatch: input has {x.shape[0]} channels, "
            f"weights expect {w.shape[0]}")
    if b.shape != (w.shape[1],):
        raise DimensionError(
            f"bias axis mismatch: expected length {w.shape[1]}, got {b.shape}")
    k = w.shape[2]
    out_hw = (conv_transpose_out_size(x.shape[1], k, stride, padding),
              conv_transpose_out_size(x.shape[2], k, stride, padding))
    y = kernels.conv2d_backward_input(x, w, stride, padding, out_hw)
    return y + b[:, None, None]


def linear(x, w, b):
    flat = np.ravel(x)
    if flat.shape[0] != w.shape[1]:
        raise DimensionError(
            f"feature axis mismatch: input length {flat.shape[0]}, "
            f"weights expect {w.shape[1]}")
    if b.shape != (w.shape[0],):
        raise DimensionError(
            f"bias axis mismatch: expected length {w.shape[0]}, got {b.shape}")
    return w @ flat + b


def relu(x):
    return np.maximum(x, 0)
