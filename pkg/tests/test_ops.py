import numpy as np
import pytest

from walkguard.errors import DimensionError
from walkguard.nn import ops


def test_conv2d_encoder_stage_shape_and_param_count():
    # 3x240x320 in, 32 filters 5x5, stride 2, padding 2 -> 32x120x160
    rng = np.random.default_rng(0)
    x = rng.random((3, 240, 320))
    w = rng.random((32, 3, 5, 5))
    b = rng.random(32)
    y = ops.conv2d(x, w, b, stride=2, padding=2)
    assert y.shape == (32, 120, 160)
    assert w.size + b.size == 2432


def test_conv2d_scalar_multiply_add():
    x = np.array([[[5.0]]])
    w = np.array([[[[2.0]]]])
    b = np.array([1.0])
    assert ops.conv2d(x, w, b) == pytest.approx(np.array([[[11.0]]]))


def test_conv2d_shape_errors_name_the_axis():
    x = np.zeros((2, 4, 4))
    w = np.zeros((3, 5, 3, 3))
    with pytest.raises(DimensionError, match="channel"):
        ops.conv2d(x, w, np.zeros(3))
    with pytest.raises(DimensionError, match="bias"):
        ops.conv2d(x, np.zeros((3, 2, 3, 3)), np.zeros(4))


def test_conv_transpose2d_decoder_stage_shape_and_param_count():
    # 256x15x20 in, kernel 4, stride 2, padding 1, 128 out -> 128x30x40
    rng = np.random.default_rng(1)
    x = rng.random((256, 15, 20))
    w = rng.random((256, 128, 4, 4))
    b = rng.random(128)
    y = ops.conv_transpose2d(x, w, b, stride=2, padding=1)
    assert y.shape == (128, 30, 40)
    assert w.size + b.size == 524_416


def test_conv_transpose2d_scalar():
    x = np.array([[[1.0]]])
    w = np.array([[[[3.0]]]])
    b = np.array([0.0])
    assert ops.conv_transpose2d(x, w, b) == pytest.approx(np.array([[[3.0]]]))


def test_linear_identity_and_hand_arithmetic():
    x = np.array([2.0, -1.0, 7.0])
    assert ops.linear(x, np.eye(3), np.zeros(3)) == pytest.approx(x)

    w = np.array([[1.0, 2.0], [3.0, 4.0]])
    b = np.array([1.0, 1.0])
    assert ops.linear(np.array([1.0, 1.0]), w, b) == pytest.approx([4.0, 8.0])


def test_linear_canonical_param_count():
    assert 1024 * 76_800 + 1024 == 78_644_224


def test_linear_length_mismatch():
    with pytest.raises(DimensionError, match="feature"):
        ops.linear(np.zeros(3), np.zeros((2, 4)), np.zeros(2))


def test_relu():
    assert ops.relu(np.array([-2.0, 0.0, 3.0])) == pytest.approx([0.0, 0.0, 3.0])
    assert np.all(ops.relu(-np.ones((2, 3))) == 0)
    x = np.random.default_rng(2).normal(size=(4, 5))
    assert np.array_equal(ops.relu(ops.relu(x)), ops.relu(x))
