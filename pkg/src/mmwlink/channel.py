"""Sparse tapped-delay-line channel and additive white Gaussian noise.

A channel is a handful of (integer delay, complex gain) taps applied
causally with zero initial state:

    y[n] = sum_i gain_i * x[n - delay_i]

Tap energy is normalized to exactly one, so the expected received power
equals the transmitted power and SNR settings stay calibrated.  Random
realizations draw circular Gaussian gains against a power delay profile
and renormalize each draw to unit energy; delays are fixed by the profile
and must stay inside the cyclic prefix of the scenario using them.

Receiver array gain is not modeled geometrically anywhere in the package;
it enters only as an SNR offset (NoiseSpec / scenario configuration).
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import tapped_delay_line
from .errors import ConfigurationError, ShapeError

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class ChannelModel:
    """Unit-energy sparse tapped delay line."""

    tap_delays: tuple
    tap_gains: tuple

    def __post_init__(self):
        if len(self.tap_delays) == 0 or len(self.tap_delays) != len(self.tap_gains):
            raise ConfigurationError("need equally many tap delays and gains, at least one")
        d = self.tap_delays
        if any(int(x) != x or x < 0 for x in d) or any(b <= a for a, b in zip(d, d[1:])):
            raise ConfigurationError("tap delays must be non-negative integers, strictly ascending")
        power = float(np.sum(np.abs(np.asarray(self.tap_gains)) ** 2))
        if abs(power - 1.0) > _NORM_TOL:
            raise ConfigurationError(f"tap energy must be 1, got {power!r}")

    @property
    def max_delay(self):
        return int(self.tap_delays[-1])


@dataclass(frozen=True)
class PowerDelayProfile:
    """Fixed delays with mean tap powers summing to one."""

    delays: tuple
    powers: tuple

    def __post_init__(self):
        if abs(float(np.sum(self.powers)) - 1.0) > 1e-9:
            raise ConfigurationError("profile powers must sum to 1")


def pdp_preset(name):
    """Named power delay profiles: 'flat' (single tap) or 'exp8'."""
    if name == "flat":
        return PowerDelayProfile(delays=(0,), powers=(1.0,))
    if name == "exp8":
        delays = (0, 4, 9, 15, 22, 30, 39, 49)
        raw = np.exp(-np.asarray(delays) / 18.0)
        powers = tuple(float(p) for p in raw / raw.sum())
        return PowerDelayProfile(delays=delays, powers=powers)
    raise ConfigurationError(f"unknown channel preset {name!r}; expected 'flat' or 'exp8'")


def mean_model(pdp):
    """Deterministic channel with gains sqrt(powers) (zero phase)."""
    gains = tuple(np.sqrt(p) for p in pdp.powers)
    return ChannelModel(tap_delays=pdp.delays, tap_gains=gains)


def draw_realization(pdp, seed):
    """Rayleigh draw against the profile, renormalized to unit energy."""
    rng = np.random.default_rng(seed)
    powers = np.asarray(pdp.powers)
    g = np.sqrt(powers / 2.0) * (
        rng.standard_normal(powers.shape[0]) + 1j * rng.standard_normal(powers.shape[0])
    )
    g /= np.sqrt(np.sum(np.abs(g) ** 2))
    return ChannelModel(tap_delays=pdp.delays, tap_gains=tuple(g))


def apply_channel(ch, samples):
    """Convolve samples with the tap line, causal, same length."""
    x = np.ascontiguousarray(samples, dtype=np.complex128)
    delays = np.ascontiguousarray(ch.tap_delays, dtype=np.int64)
    gains = np.ascontiguousarray(ch.tap_gains, dtype=np.complex128)
    return tapped_delay_line(x, delays, gains)


def freq_response(ch, n_fft):
    """Channel transfer function H_k on the n_fft-point subcarrier grid."""
    if ch.max_delay >= n_fft:
        raise ShapeError(f"max tap delay {ch.max_delay} must be below n_fft {n_fft}")
    impulse = np.zeros(n_fft, dtype=np.complex128)
    for d, g in zip(ch.tap_delays, ch.tap_gains):
        impulse[int(d)] = g
    return np.fft.fft(impulse)


@dataclass(frozen=True)
class NoiseSpec:
    """Receiver SNR in dB against a reference signal power (default 1.0)."""

    snr_db: float
    signal_power_ref: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.snr_db):
            raise ConfigurationError("snr_db must be finite")
        if self.signal_power_ref <= 0:
            raise ConfigurationError("signal_power_ref must be positive")

    @property
    def variance(self):
        return self.signal_power_ref / 10.0 ** (self.snr_db / 10.0)


def add_awgn(samples, noise, seed):
    """Add circular complex Gaussian noise at the configured SNR."""
    x = np.asarray(samples, dtype=np.complex128)
    rng = np.random.default_rng(seed)
    scale = np.sqrt(noise.variance / 2.0)
    w = rng.standard_normal((2, x.shape[0]))
    return x + scale * (w[0] + 1j * w[1])
