"""Oscillator phase noise: piecewise power-law profiles and synthesis.

A profile is a list of spectral segments.  Each segment starts at its
corner frequency and runs to the next corner (the last one extends to
infinity); below the first corner the first level extends flat.  The level
is the one-sided power spectral density of the phase process in
dB(rad^2/Hz), which is the usual small-angle reading of a single-sideband
phase noise plot; levels at or below SILENT_LEVEL_DB are treated as zero
power.  Slopes are restricted to 0, -20, or -30 dB/decade and the levels
at interior corners must be continuous.

Profiles are quoted at a reference carrier and rescale with carrier
frequency as 20*log10(f_target / f_ref), applied uniformly to every level.

Trajectories are synthesized in the frequency domain: a Hermitian spectrum
with independent complex Gaussian bins shaped to the profile PSD, zero DC
(phase is zero-mean over the synthesis window) and zero Nyquist bin, then
one inverse real FFT.  The synthesis length is rounded up to a power of
two; content below sample_rate/n_fft_internal is absent, so callers choose
the trajectory length to match the lowest frequency they care about.

Leakage of the multiplicative phasor exp(1j*phi) across subcarriers is
summarized by the coefficients

    J[i] = (1/N) * sum_n exp(1j*phi[start+n]) * exp(-2j*pi*n*i/N)

J[0] is the common phase error of the window, 1 - |J[0]|^2 the total
inter-carrier interference power (the coefficients satisfy
sum_i |J[i]|^2 = 1 because |exp(1j*phi)| = 1).
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, ShapeError

SILENT_LEVEL_DB = -300.0
REF_CARRIER_HZ = 50e9
ALLOWED_SLOPES = (0.0, -20.0, -30.0)

# Calibrated plateau levels at the 50 GHz reference carrier; see
# tools/calibrate_presets.py for the procedure and docs/calibration.md for
# the recorded results.  "low" is tuned so a single oscillator gives close
# to 35 dB SIR at 28 GHz / 60 kHz spacing and 30 dB at 82 GHz / 480 kHz;
# "high" so the Case II channel-estimation CNR floor at 82 GHz sits near
# 12 dB.
_LOW_PLATEAU_DB = -83.2
_HIGH_PLATEAU_DB = -65.3
_PLATEAU_END_HZ = 150e3
_FLOOR_DB_BELOW_PLATEAU = 52.0


@dataclass(frozen=True)
class Segment:
    """One spectral segment: level_db at corner_hz, then slope_db_decade."""

    corner_hz: float
    level_db: float
    slope_db_decade: float


@dataclass(frozen=True)
class PhaseNoiseProfile:
    """Piecewise power-law phase PSD quoted at ref_carrier_hz."""

    segments: tuple
    ref_carrier_hz: float = REF_CARRIER_HZ

    def __post_init__(self):
        if not self.segments:
            raise ConfigurationError("profile needs at least one segment")
        if self.ref_carrier_hz <= 0:
            raise ConfigurationError("ref_carrier_hz must be positive")
        corners = [s.corner_hz for s in self.segments]
        if any(c <= 0 for c in corners) or any(b <= a for a, b in zip(corners, corners[1:])):
            raise ConfigurationError("corner frequencies must be positive and strictly ascending")
        for s in self.segments:
            if s.slope_db_decade not in ALLOWED_SLOPES:
                raise ConfigurationError(
                    f"slope {s.slope_db_decade} dB/decade not in {ALLOWED_SLOPES}"
                )
            if not np.isfinite(s.level_db):
                raise ConfigurationError("segment levels must be finite")
        for a, b in zip(self.segments, self.segments[1:]):
            reached = a.level_db + a.slope_db_decade * np.log10(b.corner_hz / a.corner_hz)
            if abs(reached - b.level_db) > 1e-3:
                raise ConfigurationError(
                    f"discontinuous level at {b.corner_hz} Hz: "
                    f"{reached:.6f} dB from the left, {b.level_db:.6f} dB declared"
                )

    def level_db(self, freqs_hz):
        """Evaluate the profile level in dB(rad^2/Hz) at positive frequencies."""
        f = np.asarray(freqs_hz, dtype=np.float64)
        if np.any(f <= 0):
            raise ShapeError("profile level is defined for positive frequencies only")
        corners = np.array([s.corner_hz for s in self.segments])
        levels = np.array([s.level_db for s in self.segments])
        slopes = np.array([s.slope_db_decade for s in self.segments])
        idx = np.clip(np.searchsorted(corners, f, side="right") - 1, 0, len(corners) - 1)
        out = levels[idx] + slopes[idx] * np.log10(np.maximum(f, corners[0]) / corners[idx])
        return np.where(f < corners[0], levels[0], out)

    def psd(self, freqs_hz):
        """One-sided phase PSD in rad^2/Hz; silent levels give exactly zero."""
        lvl = self.level_db(freqs_hz)
        return np.where(lvl <= SILENT_LEVEL_DB, 0.0, 10.0 ** (lvl / 10.0))


def profile_from_corners(corners_hz, first_level_db, slopes_db_decade, ref_carrier_hz):
    """Build a continuous profile: levels follow from the first one and the slopes."""
    if len(corners_hz) != len(slopes_db_decade):
        raise ConfigurationError("need one slope per corner")
    levels = [float(first_level_db)]
    for i in range(1, len(corners_hz)):
        step = slopes_db_decade[i - 1] * np.log10(corners_hz[i] / corners_hz[i - 1])
        levels.append(levels[-1] + step)
    segs = tuple(
        Segment(corner_hz=float(c), level_db=float(l), slope_db_decade=float(s))
        for c, l, s in zip(corners_hz, levels, slopes_db_decade)
    )
    return PhaseNoiseProfile(segments=segs, ref_carrier_hz=float(ref_carrier_hz))


def scale_to_carrier(profile, carrier_hz):
    """Rescale every level by 20*log10(carrier / ref); the result is quoted at carrier."""
    if carrier_hz <= 0:
        raise ConfigurationError("carrier_hz must be positive")
    shift = 20.0 * np.log10(carrier_hz / profile.ref_carrier_hz)
    segs = tuple(replace(s, level_db=s.level_db + shift) for s in profile.segments)
    return PhaseNoiseProfile(segments=segs, ref_carrier_hz=float(carrier_hz))


def _plateau_profile(plateau_db):
    corners = (1e3, _PLATEAU_END_HZ, _PLATEAU_END_HZ * 10 ** (_FLOOR_DB_BELOW_PLATEAU / 30.0))
    return profile_from_corners(corners, plateau_db, (0.0, -30.0, 0.0), REF_CARRIER_HZ)


def preset(name):
    """Named oscillator profiles at the 50 GHz reference carrier."""
    if name == "low":
        return _plateau_profile(_LOW_PLATEAU_DB)
    if name == "high":
        return _plateau_profile(_HIGH_PLATEAU_DB)
    raise ConfigurationError(f"unknown phase noise preset {name!r}; expected 'low' or 'high'")


@dataclass(frozen=True)
class PhaseTrajectory:
    """Sampled phase in radians at a fixed sample rate."""

    phi: np.ndarray
    sample_rate: float


def synthesize_trajectory(profile, n_samples, sample_rate, seed):
    """Draw one deterministic phase trajectory of n_samples at sample_rate.

    The same (profile, n_samples, sample_rate, seed) quadruple always
    returns bit-identical samples.
    """
    if n_samples < 2:
        raise ConfigurationError("n_samples must be at least 2")
    if sample_rate <= 0:
        raise ConfigurationError("sample_rate must be positive")
    n = 1 << (int(n_samples) - 1).bit_length()
    freqs = np.arange(1, n // 2) * (sample_rate / n)
    psd = profile.psd(freqs)
    rng = np.random.default_rng(seed)
    re = rng.standard_normal(freqs.shape[0])
    im = rng.standard_normal(freqs.shape[0])
    half = np.zeros(n // 2 + 1, dtype=np.complex128)
    # E|half_k|^2 = n * fs * S1(f_k) / 2 gives a one-sided periodogram of S1
    half[1 : n // 2] = (np.sqrt(n * sample_rate * psd) / 2.0) * (re + 1j * im)
    phi = np.fft.irfft(half, n)[:n_samples]
    return PhaseTrajectory(phi=phi, sample_rate=float(sample_rate))


def spectral_coefficients(traj, window_start, n_fft):
    """Leakage coefficients J of one n_fft window of the trajectory."""
    phi = traj.phi if isinstance(traj, PhaseTrajectory) else np.asarray(traj)
    if window_start < 0 or window_start + n_fft > phi.shape[0]:
        raise ShapeError(
            f"window [{window_start}, {window_start + n_fft}) outside trajectory "
            f"of {phi.shape[0]} samples"
        )
    window = phi[window_start : window_start + n_fft]
    return np.fft.fft(np.exp(1j * window)) / n_fft


def cpe(coeffs):
    """Common phase error of the window: J[0]."""
    return coeffs[0]


def ici_power(coeffs):
    """Total inter-carrier interference power: 1 - |J[0]|^2."""
    j0 = coeffs[0]
    return 1.0 - (j0.real * j0.real + j0.imag * j0.imag)
