"""Frequency-selective I/Q imbalance as a pair of conjugate-branch filters.

A gain imbalance g, phase imbalance phi, and a short real mismatch filter h
(default three taps) turn a signal x into

    y[n] = (g_direct * x)[n] + (g_image * conj(x))[n]

with, writing delta for the unit impulse and c = g * exp(+1j*phi) on the
transmit side (exp(-1j*phi) on the receive side),

    g_direct = (delta + h*c) / 2        g_image = (delta - h*c) / 2

so g_direct + g_image = delta identically.  The image branch leaks the
conjugate of the mirror subcarrier into each bin; its strength per bin is
the image rejection ratio IRR_k = |G_direct,k|^2 / |G_image,k|^2 with
G = FFT of the taps.  Filters are applied causally with zero initial state
and same-length output; the two-sample tail falls inside the OFDM cyclic
prefix.

Matched-filter identity: with g = 1, phi = 0, h = delta the image branch
vanishes exactly and the direct branch is the unit impulse.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import conjugate_branch_filter
from .errors import ConfigurationError

IRR_CAP_DB = 300.0
_FLAT_TAPS = (1.0, 0.0, 0.0)


@dataclass(frozen=True)
class IqImbalanceParams:
    """Gain imbalance (linear), phase imbalance (degrees), mismatch taps, side."""

    gain: float
    phase_deg: float
    mismatch_taps: tuple = _FLAT_TAPS
    side: str = "tx"

    def __post_init__(self):
        if self.gain <= 0:
            raise ConfigurationError("gain imbalance must be positive")
        if self.side not in ("tx", "rx"):
            raise ConfigurationError(f"side must be 'tx' or 'rx', got {self.side!r}")
        if len(self.mismatch_taps) < 1:
            raise ConfigurationError("mismatch_taps needs at least one tap")


@dataclass(frozen=True)
class IqFilters:
    """Derived branch filters: direct on x, image on conj(x)."""

    direct: np.ndarray
    image: np.ndarray


def preset(name, side):
    """Named imbalance presets: 'best', 'worst', 'ripple', or 'identity'."""
    if name == "best":
        return IqImbalanceParams(gain=1.01, phase_deg=1.0, side=side)
    if name == "worst":
        return IqImbalanceParams(gain=1.05, phase_deg=5.0, side=side)
    if name == "ripple":
        # mild frequency-selective mismatch; IRR stays inside [25, 40] dB.
        # The phase offset keeps c*H(k) away from exact image cancellation,
        # which would otherwise spike the per-bin IRR well above the band.
        return IqImbalanceParams(
            gain=1.02, phase_deg=3.0, mismatch_taps=(1.0, 0.02, -0.01), side=side
        )
    if name == "identity":
        return IqImbalanceParams(gain=1.0, phase_deg=0.0, side=side)
    raise ConfigurationError(
        f"unknown I/Q preset {name!r}; expected 'best', 'worst', 'ripple', or 'identity'"
    )


def derive_filters(params):
    """Build the direct/image branch taps from the imbalance parameters."""
    sign = 1.0 if params.side == "tx" else -1.0
    c = params.gain * np.exp(sign * 1j * np.deg2rad(params.phase_deg))
    h = np.asarray(params.mismatch_taps, dtype=np.complex128)
    delta = np.zeros_like(h)
    delta[0] = 1.0
    return IqFilters(direct=(delta + h * c) / 2.0, image=(delta - h * c) / 2.0)


def apply(filters, samples):
    """Run samples through the conjugate-branch pair, causal, same length."""
    x = np.ascontiguousarray(samples, dtype=np.complex128)
    return conjugate_branch_filter(
        x,
        np.ascontiguousarray(filters.direct),
        np.ascontiguousarray(filters.image),
    )


def filter_spectra(filters, n_fft):
    """Zero-padded FFTs of both branch filters on the subcarrier grid."""
    return np.fft.fft(filters.direct, n_fft), np.fft.fft(filters.image, n_fft)


def irr_per_bin(filters, n_fft):
    """Image rejection ratio per subcarrier in dB, capped at +/-IRR_CAP_DB."""
    g_direct, g_image = filter_spectra(filters, n_fft)
    num = np.abs(g_direct) ** 2
    den = np.abs(g_image) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        irr = np.where(den > 0, 10.0 * np.log10(np.where(den > 0, num / den, 1.0)), np.inf)
    return np.clip(irr, -IRR_CAP_DB, IRR_CAP_DB)
