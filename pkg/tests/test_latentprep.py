import numpy as np
import pytest

from walkguard import latentprep
from walkguard.errors import DataError, DimensionError

import oracles


def test_normalizer_fit_and_apply():
    model = latentprep.normalizer_fit([[0.0], [10.0]])
    assert model.mins == pytest.approx([0.0])
    assert model.maxs == pytest.approx([10.0])
    assert latentprep.normalizer_apply(model, [5.0]) == pytest.approx([0.0])
    assert latentprep.normalizer_apply(model, [0.0]) == pytest.approx([-1.0])
    assert latentprep.normalizer_apply(model, [15.0]) == pytest.approx([1.0])  # clamp


def test_normalizer_degenerate_feature_maps_to_zero():
    model = latentprep.normalizer_fit([[3.0, 1.0], [3.0, 2.0]])
    out = latentprep.normalizer_apply(model, [3.0, 1.5])
    assert out == pytest.approx([0.0, 0.0])
    assert latentprep.normalizer_apply(model, [99.0, 1.5])[0] == 0.0


def test_normalizer_fitting_set_lands_in_unit_box():
    rng = np.random.default_rng(0)
    data = rng.normal(size=(50, 4)) * 10
    model = latentprep.normalizer_fit(data)
    out = latentprep.normalizer_apply(model, data)
    assert np.all(out >= -1) and np.all(out <= 1)


def test_normalizer_errors():
    with pytest.raises(DataError):
        latentprep.normalizer_fit(np.zeros((0, 3)))
    model = latentprep.normalizer_fit(np.zeros((2, 3)))
    with pytest.raises(DimensionError):
        latentprep.normalizer_apply(model, np.zeros(4))


def test_pca_line_data_has_one_component():
    t = np.linspace(-2, 2, 30)
    data = np.stack([t, t], axis=1)  # exactly on y = x
    model = latentprep.pca_fit(data, retained_variance=0.95)
    assert model.components.shape == (1, 2)
    assert np.abs(model.components[0]) == pytest.approx([1 / np.sqrt(2)] * 2)
    total = model.explained_variance.sum()
    assert model.explained_variance[0] / total == pytest.approx(1.0)


def test_pca_isotropic_full_retention_keeps_all_dims():
    rng = np.random.default_rng(1)
    data = rng.standard_normal((200, 5))
    model = latentprep.pca_fit(data, retained_variance=1.0)
    assert model.components.shape == (5, 5)


def test_pca_components_are_orthonormal():
    rng = np.random.default_rng(2)
    data = rng.normal(size=(60, 8)) @ np.diag([5, 3, 2, 1, 0.5, 0.2, 0.1, 0.05])
    model = latentprep.pca_fit(data, retained_variance=0.99)
    k = model.components.shape[0]
    gram = model.components @ model.components.T
    assert np.allclose(gram, np.eye(k), atol=1e-6)
    assert np.all(np.diff(model.explained_variance) <= 1e-9)


def test_pca_matches_power_iteration_oracle():
    rng = np.random.default_rng(3)
    data = rng.normal(size=(100, 6)) @ np.diag([4.0, 2.5, 1.5, 0.9, 0.4, 0.1])
    model = latentprep.pca_fit(data, retained_variance=1.0)
    cov = np.cov(data - data.mean(axis=0), rowvar=False, ddof=1)
    vals, vecs = oracles.top_eigenpairs_power_iteration(cov, 6)
    assert np.allclose(model.explained_variance, vals, atol=1e-6)
    for got, want in zip(model.components, vecs):
        assert min(np.abs(got - want).max(), np.abs(got + want).max()) < 1e-5


def test_pca_apply():
    rng = np.random.default_rng(4)
    data = rng.normal(size=(40, 4))
    model = latentprep.pca_fit(data, retained_variance=1.0)
    assert latentprep.pca_apply(model, model.mean) == pytest.approx(np.zeros(4))
    # full-dimension projection is lossless
    x = rng.normal(size=4)
    recon = model.mean + latentprep.pca_apply(model, x) @ model.components
    assert np.allclose(recon, x, atol=1e-10)
    with pytest.raises(DimensionError):
        latentprep.pca_apply(model, np.zeros(5))


def test_pca_reconstruction_error_monotone_in_k():
    rng = np.random.default_rng(5)
    data = rng.normal(size=(80, 6)) @ rng.normal(size=(6, 6))
    centered = data - data.mean(axis=0)
    full = latentprep.pca_fit(data, retained_variance=1.0)
    errs = []
    for k in range(1, 7):
        comps = full.components[:k]
        proj = centered @ comps.T @ comps
        errs.append(float(np.sum((centered - proj) ** 2)))
    assert all(a >= b - 1e-9 for a, b in zip(errs, errs[1:]))


def test_pca_errors():
    with pytest.raises(DataError):
        latentprep.pca_fit(np.zeros((1, 3)))
    with pytest.raises(ValueError):
        latentprep.pca_fit(np.zeros((5, 3)), retained_variance=0.0)
