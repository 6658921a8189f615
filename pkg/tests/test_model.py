import numpy as np
import pytest

from spi_recon.errors import InvalidArgumentError
from spi_recon.model import (
    Image,
    MeasurementSet,
    NoiseModel,
    PatternSet,
    add_noise,
    devectorize,
    generate_patterns,
    synthesize,
    vectorize,
)


def test_generate_patterns_zero_count_rejected():
    with pytest.raises(InvalidArgumentError):
        generate_patterns(0, 4, 4)
    with pytest.raises(InvalidArgumentError):
        generate_patterns(5, 0, 4)


def test_generate_patterns_deterministic():
    a = generate_patterns(20, 4, 3, "uniform01", seed=123)
    b = generate_patterns(20, 4, 3, "uniform01", seed=123)
    assert np.array_equal(a.rows, b.rows)
    c = generate_patterns(20, 4, 3, "binary", seed=123)
    d = generate_patterns(20, 4, 3, "binary", seed=123)
    assert np.array_equal(c.rows, d.rows)
    assert not np.array_equal(a.rows, generate_patterns(20, 4, 3, seed=124).rows)


def test_generate_patterns_uniform_mean():
    # law of large numbers: per-pixel mean of 1e5 uniform draws within 5 sigma
    ps = generate_patterns(10**5, 2, 2, "uniform01", seed=7)
    means = ps.rows.mean(axis=0)
    assert np.all(means > 0.49) and np.all(means < 0.51)


def test_generate_patterns_binary_values():
    ps = generate_patterns(50, 3, 3, "binary", seed=1)
    assert set(np.unique(ps.rows)) <= {0.0, 1.0}


def test_intensities_are_row_sums():
    ps = generate_patterns(40, 5, 5, seed=3)
    recomputed = ps.rows.sum(axis=1)
    assert np.allclose(ps.intensities, recomputed, rtol=1e-12)


def test_patterns_reject_negative_entries():
    with pytest.raises(InvalidArgumentError):
        PatternSet.from_matrix(np.array([[1.0, -0.5]]))


def test_vectorize_row_major():
    img = Image.from_array(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert np.array_equal(vectorize(img), [1, 2, 3, 4])


def test_devectorize_roundtrip():
    img = Image.from_array(np.arange(12.0).reshape(3, 4) / 12)
    back = devectorize(vectorize(img), img.width, img.height)
    assert np.array_equal(back.data, img.data)
    assert (back.width, back.height) == (img.width, img.height)


def test_devectorize_length_mismatch():
    with pytest.raises(InvalidArgumentError):
        devectorize(np.zeros(3), 2, 2)


def test_synthesize_identity():
    ps = PatternSet.from_matrix(np.eye(4))
    img = devectorize(np.array([1.0, 2.0, 3.0, 4.0]), 2, 2)
    assert np.array_equal(synthesize(ps, img).values, [1, 2, 3, 4])


def test_synthesize_zero_scene():
    ps = generate_patterns(10, 3, 3, seed=0)
    img = devectorize(np.zeros(9), 3, 3)
    assert np.array_equal(synthesize(ps, img).values, np.zeros(10))


def test_synthesize_forced_2x3():
    ps = PatternSet.from_matrix(np.array([[1.0, 0, 1], [0, 1, 1]]))
    img = devectorize(np.array([1.0, 2.0, 3.0]), 3, 1)
    assert np.array_equal(synthesize(ps, img).values, [4, 5])


def test_synthesize_dimension_mismatch():
    ps = generate_patterns(4, 2, 2, seed=0)
    img = devectorize(np.zeros(9), 3, 3)
    with pytest.raises(InvalidArgumentError):
        synthesize(ps, img)


def test_synthesize_linearity():
    rng = np.random.default_rng(5)
    ps = generate_patterns(30, 4, 4, seed=9)
    x1, x2 = rng.random(16), rng.random(16)
    a, b = 2.5, -1.25
    lhs = synthesize(ps, devectorize(a * x1 + b * x2, 4, 4)).values
    rhs = a * synthesize(ps, devectorize(x1, 4, 4)).values + b * synthesize(
        ps, devectorize(x2, 4, 4)
    ).values
    assert np.allclose(lhs, rhs, rtol=1e-10)


def test_uniform_allones_expected_measurement():
    # mean measurement of all-ones scene under uniform01 patterns approaches n/2
    n = 16
    ps = generate_patterns(10**4, 4, 4, seed=11)
    b = synthesize(ps, devectorize(np.ones(n), 4, 4)).values
    se = b.std() / np.sqrt(b.size)
    assert abs(b.mean() - n / 2) < 3 * se


def test_noise_model_sigma():
    nm = NoiseModel(level=3e-3, pixel_count=4096)
    assert nm.sigma == pytest.approx(12.288, abs=0)


def test_add_noise_sigma_zero_identity():
    meas = MeasurementSet(values=np.array([1.0, 2.0, 3.0]))
    out = add_noise(meas, NoiseModel(level=0.0, pixel_count=100), seed=5)
    assert np.array_equal(out.values, meas.values)


def test_add_noise_deterministic_and_recorded():
    meas = MeasurementSet(values=np.zeros(100))
    nm = NoiseModel(level=0.01, pixel_count=100)
    a = add_noise(meas, nm, seed=8)
    b = add_noise(meas, nm, seed=8)
    assert np.array_equal(a.values, b.values)
    assert a.noise_sigma == nm.sigma and a.noise_seed == 8


def test_add_noise_sample_std():
    # chi-square concentration: sample std over 1e6 draws within 3 per mille
    meas = MeasurementSet(values=np.zeros(10**6))
    nm = NoiseModel(level=1.0, pixel_count=1)
    out = add_noise(meas, nm, seed=21)
    assert 0.997 < out.values.std() < 1.003
