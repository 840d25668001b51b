"""Trainable layers with explicit forward/backward over batched inputs.

Each layer caches the values from its last forward pass; backward() consumes
that cache and accumulates parameter gradients in-place. A full network is an
ordered list of layers, so parameter iteration order is deterministic.
"""

import numpy as np

from ..errors import DimensionError, StateError
from . import kernels


class Layer:
    """Parameterless base; forward caches, backward consumes the cache."""

    name = ""

    def parameters(self):
        return {}

    def gradients(self):
        return {}

    def zero_grad(self):
        pass

    def forward(self, x):
        raise NotImplementedError

    def backward(self, gy):
        raise NotImplementedError


def _init_weight(rng, shape, fan_in, dtype):
    bound = 1.0 / np.sqrt(fan_in)
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


class Conv2d(Layer):
    def __init__(self, in_ch, out_ch, kernel, stride, padding, rng, dtype=np.float32,
                 name="conv"):
        self.in_ch, self.out_ch = in_ch, out_ch
        self.kernel, self.stride, self.padding = kernel, stride, padding
        self.name = name
        fan_in = in_ch * kernel * kernel
        self.w = _init_weight(rng, (out_ch, in_ch, kernel, kernel), fan_in, dtype)
        self.b = _init_weight(rng, (out_ch,), fan_in, dtype)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._x = None

    def parameters(self):
        return {f"{self.name}.w": self.w, f"{self.name}.b": self.b}

    def gradients(self):
        return {f"{self.name}.w": self.gw, f"{self.name}.b": self.gb}

    def zero_grad(self):
        self.gw[...] = 0
        self.gb[...] = 0

    def forward(self, x):
        if x.ndim != 4 or x.shape[1] != self.in_ch:
            raise DimensionError(
                f"{self.name}: expected (N, {self.in_ch}, H, W), got {x.shape}")
        self._x = x
        outs = [kernels.conv2d_forward(xi, self.w, self.stride, self.padding)
                for xi in x]
        return np.stack(outs) + self.b[None, :, None, None]

    def backward(self, gy):
        if self._x is None:
            raise StateError(f"{self.name}: backward called before forward")
        x = self._x
        self.gb += gy.sum(axis=(0, 2, 3))
        gx = np.empty_like(x)
        for n in range(x.shape[0]):
            self.gw += kernels.conv2d_backward_weight(
                x[n], gy[n], self.kernel, self.stride, self.padding)
            gx[n] = kernels.conv2d_backward_input(
                gy[n], self.w, self.stride, self.padding, x.shape[2:])
        return gx


class ConvTranspose2d(Layer):
    """Weights laid out (in_ch, out_ch, k, k); forward is the adjoint of Conv2d."""

    def __init__(self, in_ch, out_ch, kernel, stride, padding, rng, dtype=np.float32,
                 name="convt"):
        self.in_ch, self.out_ch = in_ch, out_ch
        self.kernel, self.stride, self.padding = kernel, stride, padding
        self.name = name
        fan_in = in_ch * kernel * kernel
        self.w = _init_weight(rng, (in_ch, out_ch, kernel, kernel), fan_in, dtype)
        self.b = _init_weight(rng, (out_ch,), fan_in, dtype)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._x = None

    def parameters(self):
        return {f"{self.name}.w": self.w, f"{self.name}.b": self.b}

    def gradients(self):
        return {f"{self.name}.w": self.gw, f"{self.name}.b": self.gb}

    def zero_grad(self):
        self.gw[...] = 0
        self.gb[...] = 0

    def _out_hw(self, h, w):
        k, s, p = self.kernel, self.stride, self.padding
        return ((h - 1) * s - 2 * p + k, (w - 1) * s - 2 * p + k)

    def forward(self, x):
        if x.ndim != 4 or x.shape[1] != self.in_ch:
            raise DimensionError(
                f"{self.name}: expected (N, {self.in_ch}, H, W), got {x.shape}")
        self._x = x
        out_hw = self._out_hw(x.shape[2], x.shape[3])
        outs = [kernels.conv2d_backward_input(xi, self.w, self.stride, self.padding,
                                              out_hw)
                for xi in x]
        return np.stack(outs) + self.b[None, :, None, None]

    def backward(self, gy):
        if self._x is None:
            raise StateError(f"{self.name}: backward called before forward")
        x = self._x
        self.gb += gy.sum(axis=(0, 2, 3))
        gx = np.empty_like(x)
        for n in range(x.shape[0]):
            self.gw += kernels.conv2d_backward_weight(
                gy[n], x[n], self.kernel, self.stride, self.padding)
            gx[n] = kernels.conv2d_forward(gy[n], self.w, self.stride, self.padding)
        return gx


class Linear(Layer):
    def __init__(self, in_features, out_features, rng, dtype=np.float32, name="fc"):
        self.in_features, self.out_features = in_features, out_features
        self.name = name
        self.w = _init_weight(rng, (out_features, in_features), in_features, dtype)
        self.b = _init_weight(rng, (out_features,), in_features, dtype)
        self.gw = np.zeros_like(self.w)
        self.gb = np.zeros_like(self.b)
        self._x = None

    def parameters(self):
        return {f"{self.name}.w": self.w, f"{self.name}.b": self.b}

    def gradients(self):
        return {f"{self.name}.w": self.gw, f"{self.name}.b": self.gb}

    def zero_grad(self):
        self.gw[...] = 0
        self.gb[...] = 0

    def forward(self, x):
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise DimensionError(
                f"{self.name}: expected (N, {self.in_features}), got {x.shape}")
        self._x = x
        return x @ self.w.T + self.b

    def backward(self, gy):
        if self._x is None:
            raise StateError(f"{self.name}: backward called before forward")
        self.gw += gy.T @ self._x
        self.gb += gy.sum(axis=0)
        return gy @ self.w


class ReLU(Layer):
    def __init__(self):
        self._mask = None

    def forward(self, x):
        self._mask = x > 0
        return np.where(self._mask, x, 0)

    def backward(self, gy):
        if self._mask is None:
            raise StateError("relu: backward called before forward")
        return np.where(self._mask, gy, 0)
