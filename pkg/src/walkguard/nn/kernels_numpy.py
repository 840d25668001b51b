"""Convolution kernels, numpy im2col implementation.

This is the pure-Python fallback backend. All three primitives operate on a
single image laid out C x H x W; batching is handled by the layer above.
Cross-correlation convention (no kernel flip) throughout.
"""

import numpy as np


def _im2col(xp: np.ndarray, k: int, stride: int, ho: int, wo: int) -> np.ndarray:
    """Unfold a padded C x Hp x Wp image into a (C*k*k, ho*wo) patch matrix."""
    c = xp.shape[0]
    s0, s1, s2 = xp.strides
    windows = np.lib.stride_tricks.as_strided(
        xp,
        shape=(c, k, k, ho, wo),
        strides=(s0, s1, s2, s1 * stride, s2 * stride),
        writeable=False,
    )
    return windows.reshape(c * k * k, ho * wo)


def conv2d_forward(x, w, stride, padding):
    """x: (cin, h, w), w: (cout, cin, k, k) -> (cout, ho, wo), no bias."""
    cout, cin, k, _ = w.shape
    h, wd = x.shape[1], x.shape[2]
    ho = (h + 2 * padding - k) // stride + 1
    wo = (wd + 2 * padding - k) // stride + 1
    xp = np.pad(x, ((0, 0), (padding, padding), (padding, padding)))
    cols = _im2col(xp, k, stride, ho, wo)
    return (w.reshape(cout, -1) @ cols).reshape(cout, ho, wo)


def conv2d_backward_weight(x, gy, k, stride, padding):
    """Gradient of the forward output gy w.r.t. w; returns (cout, cin, k, k)."""
    cout, ho, wo = gy.shape
    cin = x.shape[0]
    xp = np.pad(x, ((0, 0), (padding, padding), (padding, padding)))
    cols = _im2col(xp, k, stride, ho, wo)
    gw = gy.reshape(cout, -1) @ cols.T
    return gw.reshape(cout, cin, k, k)


def conv2d_backward_input(gy, w, stride, padding, in_hw):
    """Gradient of the forward output gy w.r.t. x; returns (cin, *in_hw).

    Also serves as the transposed-convolution forward map.
    """
    cout, cin, k, _ = w.shape
    h, wd = in_hw
    ho, wo = gy.shape[1], gy.shape[2]
    cols_g = w.reshape(cout, -1).T @ gy.reshape(cout, -1)
    cols_g = cols_g.reshape(cin, k, k, ho, wo)
    gxp = np.zeros((cin, h + 2 * padding, wd + 2 * padding), dtype=gy.dtype)
    for i in range(k):
        for j in range(k):
            gxp[:, i : i + stride * ho : stride, j : j + stride * wo : stride] += cols_g[:, i, j]
    if padding == 0:
        return gxp
    return gxp[:, padding : padding + h, padding : padding + wd]
