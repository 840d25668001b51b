# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled convolution core: direct kernels for the training hot path.

Same contracts as kernels_numpy; single image C x H x W, cross-correlation.
Loops are ordered so the innermost axis walks contiguous output memory and
boundary checks are hoisted into precomputed valid ranges.
"""

import numpy as np

cimport cython

ctypedef fused real:
    float
    double


cdef inline int _lo(int k_off, int padding, int stride) nogil:
    # smallest output index whose input index k_off - padding + o*stride >= 0
    cdef int num = padding - k_off
    if num <= 0:
        return 0
    return (num + stride - 1) // stride


cdef inline int _hi(int k_off, int padding, int stride, int in_size, int out_size) nogil:
    # one past the largest output index with input index < in_size
    cdef int num = in_size - 1 + padding - k_off
    if num < 0:
        return 0
    cdef int v = num // stride + 1
    return v if v < out_size else out_size


def conv2d_forward(real[:, :, ::1] x, real[:, :, :, ::1] w, int stride, int padding):
    cdef int cout = w.shape[0]
    cdef int cin = w.shape[1]
    cdef int k = w.shape[2]
    cdef int h = x.shape[1]
    cdef int wd = x.shape[2]
    cdef int ho = (h + 2 * padding - k) // stride + 1
    cdef int wo = (wd + 2 * padding - k) // stride + 1

    if real is float:
        out_np = np.zeros((cout, ho, wo), dtype=np.float32)
    else:
        out_np = np.zeros((cout, ho, wo), dtype=np.float64)
    cdef real[:, :, ::1] y = out_np

    cdef int co, ci, ki, kj, oh, ow, ih, iw0
    cdef int oh_lo, oh_hi, ow_lo, ow_hi
    cdef real wv
    with nogil:
        for co in range(cout):
            for ci in range(cin):
                for ki in range(k):
                    oh_lo = _lo(ki, padding, stride)
                    oh_hi = _hi(ki, padding, stride, h, ho)
                    for kj in range(k):
                        ow_lo = _lo(kj, padding, stride)
                        ow_hi = _hi(kj, padding, stride, wd, wo)
                        wv = w[co, ci, ki, kj]
                        for oh in range(oh_lo, oh_hi):
                            ih = oh * stride - padding + ki
                            iw0 = -padding + kj
                            for ow in range(ow_lo, ow_hi):
                                y[co, oh, ow] += x[ci, ih, iw0 + ow * stride] * wv
    return out_np


def conv2d_backward_weight(real[:, :, ::1] x, real[:, :, ::1] gy, int k,
                           int stride, int padding):
    cdef int cout = gy.shape[0]
    cdef int ho = gy.shape[1]
    cdef int wo = gy.shape[2]
    cdef int cin = x.shape[0]
    cdef int h = x.shape[1]
    cdef int wd = x.shape[2]

    if real is float:
        gw_np = np.zeros((cout, cin, k, k), dtype=np.float32)
    else:
        gw_np = np.zeros((cout, cin, k, k), dtype=np.float64)
    cdef real[:, :, :, ::1] gw = gw_np

    cdef int co, ci, ki, kj, oh, ow, ih, iw0
    cdef int oh_lo, oh_hi, ow_lo, ow_hi
    cdef real acc
    with nogil:
        for co in range(cout):
            for ci in range(cin):
                for ki in range(k):
                    oh_lo = _lo(ki, padding, stride)
                    oh_hi = _hi(ki, padding, stride, h, ho)
                    for kj in range(k):
                        ow_lo = _lo(kj, padding, stride)
                        ow_hi = _hi(kj, padding, stride, wd, wo)
                        acc = 0
                        for oh in range(oh_lo, oh_hi):
                            ih = oh * stride - padding + ki
                            iw0 = -padding + kj
                            for ow in range(ow_lo, ow_hi):
                                acc += x[ci, ih, iw0 + ow * stride] * gy[co, oh, ow]
                        gw[co, ci, ki, kj] = acc
    return gw_np


def conv2d_backward_input(real[:, :, ::1] gy, real[:, :, :, ::1] w, int stride,
                          int padding, int h, int wd):
    cdef int cout = w.shape[0]
    cdef int cin = w.shape[1]
    cdef int k = w.shape[2]
    cdef int ho = gy.shape[1]
    cdef int wo = gy.shape[2]

    if real is float:
        gx_np = np.zeros((cin, h, wd), dtype=np.float32)
    else:
        gx_np = np.zeros((cin, h, wd), dtype=np.float64)
    cdef real[:, :, ::1] gx = gx_np

    cdef int co, ci, ki, kj, oh, ow, ih, iw0
    cdef int oh_lo, oh_hi, ow_lo, ow_hi
    cdef real wv
    with nogil:
        for ci in range(cin):
            for co in range(cout):
                for ki in range(k):
                    oh_lo = _lo(ki, padding, stride)
                    oh_hi = _hi(ki, padding, stride, h, ho)
                    for kj in range(k):
                        ow_lo = _lo(kj, padding, stride)
                        ow_hi = _hi(kj, padding, stride, wd, wo)
                        wv = w[co, ci, ki, kj]
                        for oh in range(oh_lo, oh_hi):
                            ih = oh * stride - padding + ki
                            iw0 = -padding + kj
                            for ow in range(ow_lo, ow_hi):
                                gx[ci, ih, iw0 + ow * stride] += gy[co, oh, ow] * wv
    return gx_np
