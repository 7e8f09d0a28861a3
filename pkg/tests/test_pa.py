"""Polynomial amplifier evaluation and the Bussgang decomposition oracle."""

import numpy as np
import pytest

from mmwlink import pa
from mmwlink.errors import ConfigurationError

_CUBIC = pa.PaModel(coeffs=(1.0, -0.1, 0.0, 0.0, 0.0))


def test_identity_preset_is_transparent():
    model = pa.preset("identity")
    rng = np.random.default_rng(1)
    x = rng.standard_normal(1000) + 1j * rng.standard_normal(1000)
    assert np.array_equal(pa.apply(model, x), x)


def test_cubic_compression_on_unit_input():
    y = pa.apply(_CUBIC, np.array([1.0 + 0.0j]))
    assert abs(y[0] - 0.9) < 1e-12


def test_hand_evaluated_complex_cubic():
    model = pa.PaModel(coeffs=(1.0, -0.1 + 0.05j, 0.0, 0.0, 0.0))
    y = pa.apply(model, np.array([2.0j]))
    assert abs(y[0] - (-0.4 + 1.2j)) < 1e-12


def test_backoff_scales_input_before_polynomial():
    model = pa.PaModel(coeffs=(1.0, -0.1, 0.0, 0.0, 0.0), input_backoff_db=20.0)
    # u = 0.1 * 1 -> y = 0.1 - 0.1 * 0.001
    y = pa.apply(model, np.array([1.0 + 0.0j]))
    assert abs(y[0] - (0.1 - 0.1 * 0.1**3)) < 1e-12


def test_closed_form_gaussian_gain_examples():
    assert abs(pa.bussgang_closed_form(_CUBIC, 1.0) - 0.8) < 1e-12
    assert abs(pa.bussgang_closed_form(_CUBIC, 0.5) - 0.9) < 1e-12


def test_closed_form_identity_is_a1():
    assert pa.bussgang_closed_form(pa.preset("identity"), 3.7) == 1.0


def test_closed_form_respects_backoff():
    model = pa.PaModel(coeffs=(1.0, -0.1, 0.0, 0.0, 0.0), input_backoff_db=10.0)
    # post-backoff variance 0.1 -> alpha1 = 1 - 0.02
    assert abs(pa.bussgang_closed_form(model, 1.0) - 0.98) < 1e-12
    assert abs(pa.effective_linear_gain(model, 1.0) - model.input_scale * 0.98) < 1e-12


def test_identity_bussgang_mc_has_no_distortion():
    dec = pa.bussgang_mc(pa.preset("identity"), 1.0, 10_000, seed=3)
    assert abs(dec.alpha1 - 1.0) < 1e-6
    assert dec.distortion_power < 1e-9 * dec.input_power


def test_linear_gain_model_has_exact_bussgang_gain():
    model = pa.PaModel(coeffs=(0.5 + 0.25j, 0.0, 0.0, 0.0, 0.0))
    dec = pa.bussgang_mc(model, 2.0, 10_000, seed=3)
    assert abs(dec.alpha1 - (0.5 + 0.25j)) < 1e-9
    assert dec.distortion_power < 1e-12


def test_mc_matches_closed_form_within_one_percent():
    model = pa.preset("default")
    dec = pa.bussgang_mc(model, 1.0, 1_000_000, seed=11)
    cf = pa.bussgang_closed_form(model, 1.0)
    assert abs(dec.alpha1 - cf) / abs(cf) < 0.01


def test_residual_is_uncorrelated_with_input():
    model = pa.preset("default")
    rng = np.random.default_rng(5)
    n = 1_000_000
    x = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    alpha1 = pa.bussgang_closed_form(model, 1.0)
    resid = pa.distortion_residual(model, x, alpha1)
    corr = abs(np.vdot(x, resid)) / (np.linalg.norm(x) * np.linalg.norm(resid))
    assert corr < 0.01


def test_residual_power_matches_mc_decomposition():
    model = pa.preset("default")
    rng = np.random.default_rng(7)
    n = 1_000_000
    x = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2.0)
    alpha1 = pa.bussgang_closed_form(model, 1.0)
    resid_power = float(np.mean(np.abs(pa.distortion_residual(model, x, alpha1)) ** 2))
    dec = pa.bussgang_mc(model, 1.0, n, seed=7)
    assert abs(resid_power - dec.distortion_power) / dec.distortion_power < 0.02


def test_default_preset_sits_near_minus_30_dbc():
    model = pa.preset("default")
    dec = pa.bussgang_mc(model, 1.0, 1_000_000, seed=13)
    dbc = 10.0 * np.log10(dec.distortion_power / (abs(dec.alpha1) ** 2 * dec.input_power))
    assert -31.0 < dbc < -29.0


def test_mc_converges_with_sample_count():
    model = pa.preset("default")
    cf = pa.bussgang_closed_form(model, 1.0)
    small = pa.bussgang_mc(model, 1.0, 10_000, seed=2)
    big = pa.bussgang_mc(model, 1.0, 1_000_000, seed=2)
    assert abs(big.alpha1 - cf) <= abs(small.alpha1 - cf) + 1e-4


def test_validation_errors():
    with pytest.raises(ConfigurationError):
        pa.PaModel(coeffs=(1.0, 0.0))
    with pytest.raises(ConfigurationError):
        pa.PaModel(coeffs=(1.0, 0.0, 0.0, 0.0, 0.0), input_backoff_db=np.inf)
    with pytest.raises(ConfigurationError):
        pa.bussgang_closed_form(_CUBIC, -1.0)
    with pytest.raises(ConfigurationError):
        pa.bussgang_mc(_CUBIC, 1.0, 1, seed=0)
    with pytest.raises(ConfigurationError):
        pa.preset("loud")
