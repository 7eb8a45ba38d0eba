import numpy as np
import pytest

from ppii import AugmentSpec, ElasticSpec, InvalidInput, augment


def _gaussian_blob(size=96, sigma=0.18):
    ax = np.linspace(-1.0, 1.0, size)
    y, x = np.meshgrid(ax, ax, indexing="ij")
    return np.exp(-(x**2 + y**2) / (2.0 * sigma**2))


def test_identity_spec_is_identity():
    rng = np.random.default_rng(0)
    img = rng.uniform(size=(32, 32))
    out = augment(img, AugmentSpec())
    assert np.abs(out - img).max() <= 1e-12


def test_rotation_round_trip_on_smooth_image():
    img = _gaussian_blob()
    once = augment(img, AugmentSpec(rotation_degrees=10.0))
    back = augment(once, AugmentSpec(rotation_degrees=-10.0))
    assert np.abs(back - img).mean() <= 0.02


def test_rotation_moves_an_off_center_blob():
    img = np.zeros((64, 64))
    img[20:24, 44:48] = 1.0
    out = augment(img, AugmentSpec(rotation_degrees=10.0))
    assert np.abs(out - img).max() > 0.5


def test_rotation_limit_enforced():
    with pytest.raises(InvalidInput):
        AugmentSpec(rotation_degrees=10.5)
    with pytest.raises(InvalidInput):
        AugmentSpec(rotation_degrees=-11.0)


def test_scale_limits_enforced():
    with pytest.raises(InvalidInput):
        AugmentSpec(scale_factor=1.2)
    with pytest.raises(InvalidInput):
        AugmentSpec(scale_factor=0.5)
    with pytest.raises(InvalidInput):
        AugmentSpec(scale_limits=(0.0, 1.1))
    # widened limits admit a larger factor
    spec = AugmentSpec(scale_factor=1.5, scale_limits=(0.5, 2.0))
    assert spec.scale_factor == 1.5


def test_scaling_preserves_shape_and_center():
    # odd size puts the blob peak exactly on the scaling center
    img = _gaussian_blob(65)
    out = augment(img, AugmentSpec(scale_factor=1.1))
    assert out.shape == img.shape
    # the blob peak stays at the center under scaling about the center
    assert np.unravel_index(np.argmax(out), out.shape) == np.unravel_index(
        np.argmax(img), img.shape
    )


def test_elastic_zero_sigma_is_identity():
    rng = np.random.default_rng(1)
    img = rng.uniform(size=(48, 48))
    spec = AugmentSpec(elastic=ElasticSpec(grid_spacing=16, displacement_sigma=0.0))
    assert np.array_equal(augment(img, spec), img)


def test_elastic_is_seed_deterministic():
    img = _gaussian_blob(64)
    spec = AugmentSpec(elastic=ElasticSpec(grid_spacing=16, displacement_sigma=2.0, seed=7))
    a = augment(img, spec)
    b = augment(img, spec)
    assert np.array_equal(a, b)
    other = AugmentSpec(elastic=ElasticSpec(grid_spacing=16, displacement_sigma=2.0, seed=8))
    assert not np.array_equal(a, augment(img, other))


def test_elastic_rng_argument_overrides_spec_seed():
    img = _gaussian_blob(64)
    spec = AugmentSpec(elastic=ElasticSpec(grid_spacing=16, displacement_sigma=2.0, seed=7))
    a = augment(img, spec, rng=np.random.default_rng(0))
    b = augment(img, spec, rng=np.random.default_rng(0))
    c = augment(img, spec, rng=np.random.default_rng(1))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_elastic_grid_spacing_validated():
    with pytest.raises(InvalidInput):
        AugmentSpec(elastic=ElasticSpec(grid_spacing=0, displacement_sigma=1.0))


def test_augment_stays_within_input_range():
    rng = np.random.default_rng(2)
    img = rng.uniform(size=(40, 40))
    spec = AugmentSpec(
        rotation_degrees=7.0,
        scale_factor=0.95,
        elastic=ElasticSpec(grid_spacing=8, displacement_sigma=1.5, seed=3),
    )
    out = augment(img, spec)
    assert out.min() >= img.min() - 1e-12
    assert out.max() <= img.max() + 1e-12
