"""Profile algebra, trajectory synthesis PSD, and leakage coefficients."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mmwlink import phasenoise as pn
from mmwlink.errors import ConfigurationError, ShapeError


def _flat_profile(level_db=-100.0, corner_hz=1e3):
    return pn.PhaseNoiseProfile(
        segments=(pn.Segment(corner_hz, level_db, 0.0),), ref_carrier_hz=50e9
    )


# ---------------------------------------------------------------------------
# profiles


def test_profile_requires_segments():
    with pytest.raises(ConfigurationError):
        pn.PhaseNoiseProfile(segments=())


def test_corners_must_ascend():
    segs = (pn.Segment(1e4, -90.0, 0.0), pn.Segment(1e3, -90.0, 0.0))
    with pytest.raises(ConfigurationError):
        pn.PhaseNoiseProfile(segments=segs)


def test_slope_whitelist():
    with pytest.raises(ConfigurationError):
        pn.PhaseNoiseProfile(segments=(pn.Segment(1e3, -90.0, -10.0),))


def test_interior_levels_must_be_continuous():
    # -20 dB/dec over one decade reaches -110, not -100
    segs = (pn.Segment(1e3, -90.0, -20.0), pn.Segment(1e4, -100.0, 0.0))
    with pytest.raises(ConfigurationError):
        pn.PhaseNoiseProfile(segments=segs)


def test_level_evaluation_piecewise():
    prof = pn.profile_from_corners((1e3, 1e5), -80.0, (-20.0, 0.0), 50e9)
    assert abs(prof.level_db(1e3) - (-80.0)) < 1e-9
    assert abs(prof.level_db(1e4) - (-100.0)) < 1e-9
    assert abs(prof.level_db(1e5) - (-120.0)) < 1e-9
    assert abs(prof.level_db(1e7) - (-120.0)) < 1e-9  # last segment extends flat
    assert abs(prof.level_db(10.0) - (-80.0)) < 1e-9  # below first corner: flat
    with pytest.raises(ShapeError):
        prof.level_db(0.0)


def test_silent_level_gives_zero_psd():
    prof = _flat_profile(pn.SILENT_LEVEL_DB)
    assert np.all(prof.psd(np.array([1e3, 1e6])) == 0.0)


def test_scale_to_carrier_identity_and_octave():
    prof = _flat_profile(-100.0)
    same = pn.scale_to_carrier(prof, 50e9)
    assert abs(same.segments[0].level_db - (-100.0)) < 1e-12
    doubled = pn.scale_to_carrier(prof, 100e9)
    assert abs(doubled.segments[0].level_db - (-100.0 + 20.0 * np.log10(2.0))) < 1e-9
    down = pn.scale_to_carrier(prof, 28e9)
    assert abs(down.segments[0].level_db - (-100.0 + 20.0 * np.log10(28.0 / 50.0))) < 1e-9
    assert abs(down.segments[0].level_db - (-105.0362)) < 1e-3


def test_scale_round_trip_restores_levels():
    prof = pn.preset("low")
    back = pn.scale_to_carrier(pn.scale_to_carrier(prof, 82e9), 50e9)
    for a, b in zip(prof.segments, back.segments):
        assert abs(a.level_db - b.level_db) < 1e-9


@settings(deadline=None, max_examples=30)
@given(
    st.floats(min_value=-120.0, max_value=-60.0),
    st.sampled_from([(0.0, -20.0), (-20.0, 0.0), (0.0, -30.0), (-30.0, 0.0)]),
)
def test_profile_from_corners_is_always_continuous(first_level, slopes):
    prof = pn.profile_from_corners((1e3, 1e5), first_level, slopes, 50e9)
    left = prof.level_db(1e5 * (1 - 1e-9))
    right = prof.level_db(1e5)
    assert abs(left - right) < 1e-3


def test_presets_exist_and_differ():
    low, high = pn.preset("low"), pn.preset("high")
    assert high.segments[0].level_db > low.segments[0].level_db
    with pytest.raises(ConfigurationError):
        pn.preset("medium")


# ---------------------------------------------------------------------------
# synthesis


def test_silent_profile_synthesizes_zero_phase():
    traj = pn.synthesize_trajectory(_flat_profile(pn.SILENT_LEVEL_DB), 4096, 1e6, seed=1)
    assert np.max(np.abs(traj.phi)) < 1e-10


def test_synthesis_is_deterministic_per_seed():
    prof = _flat_profile(-100.0)
    a = pn.synthesize_trajectory(prof, 10000, 1e6, seed=42)
    b = pn.synthesize_trajectory(prof, 10000, 1e6, seed=42)
    c = pn.synthesize_trajectory(prof, 10000, 1e6, seed=43)
    assert np.array_equal(a.phi, b.phi)
    assert not np.array_equal(a.phi, c.phi)


def test_welch_psd_matches_flat_profile_level():
    scipy_signal = pytest.importorskip("scipy.signal")
    fs = 10e6
    level_db = -100.0
    traj = pn.synthesize_trajectory(_flat_profile(level_db), 2**20, fs, seed=7)
    freqs, pxx = scipy_signal.welch(traj.phi, fs=fs, nperseg=2**11)
    band = (freqs >= 10e3) & (freqs <= 2e6)
    est_db = 10.0 * np.log10(pxx[band])
    assert np.max(np.abs(est_db - level_db)) < 1.0


# ---------------------------------------------------------------------------
# leakage coefficients


def test_zero_phase_gives_delta_coefficients():
    j = pn.spectral_coefficients(np.zeros(256), 0, 256)
    assert abs(j[0] - 1.0) < 1e-12
    assert np.max(np.abs(j[1:])) < 1e-12
    assert abs(pn.cpe(j) - 1.0) < 1e-12
    assert abs(pn.ici_power(j)) < 1e-12


def test_constant_phase_gives_pure_rotation():
    c = np.pi / 4
    j = pn.spectral_coefficients(np.full(128, c), 0, 128)
    assert abs(j[0] - np.exp(1j * c)) < 1e-12
    assert np.max(np.abs(j[1:])) < 1e-12
    assert abs(pn.ici_power(j)) < 1e-12


def test_linear_ramp_leaks_into_other_bins_but_conserves_energy():
    phi = 1e-2 * np.arange(512)
    j = pn.spectral_coefficients(phi, 0, 512)
    assert abs(j[0]) < 1.0
    assert np.sum(np.abs(j[1:]) ** 2) > 0
    assert abs(np.sum(np.abs(j) ** 2) - 1.0) < 1e-9


@settings(deadline=None, max_examples=20)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_parseval_holds_for_any_phase_window(seed):
    rng = np.random.default_rng(seed)
    phi = rng.standard_normal(256) * rng.uniform(0, 2)
    j = pn.spectral_coefficients(phi, 0, 256)
    assert abs(np.sum(np.abs(j) ** 2) - 1.0) < 1e-9
    assert abs(pn.ici_power(j) - np.sum(np.abs(j[1:]) ** 2)) < 1e-9


def test_window_bounds_are_checked():
    with pytest.raises(ShapeError):
        pn.spectral_coefficients(np.zeros(100), 50, 100)


def test_low_preset_keeps_j0_near_unity_at_60khz():
    prof = pn.preset("low")
    n_fft, n_windows = 2048, 1000
    fs = n_fft * 60e3
    traj = pn.synthesize_trajectory(prof, n_windows * n_fft, fs, seed=17)
    mags = []
    for w in range(n_windows):
        j = pn.spectral_coefficients(traj, w * n_fft, n_fft)
        mags.append(abs(pn.cpe(j)))
    mags = np.array(mags)
    assert np.all(mags > 0.9)
    assert np.all(mags <= 1.0 + 1e-12)
