"""Odd-order polynomial power amplifier with Bussgang decomposition.

The amplifier acts elementwise on the post-backoff input u = s * x with
s = 10**(-input_backoff_db / 20):

    f(u) = a1*u + a3*u|u|^2 + a5*u|u|^4 + a7*u|u|^6 + a9*u|u|^8

For a circular complex Gaussian input of variance sigma2 the Bussgang
linear gain has the closed form

    alpha1 = a1 + 2*a3*sigma2 + 6*a5*sigma2^2 + 24*a7*sigma2^3 + 120*a9*sigma2^4

(the coefficients are (p+1)! from the Gaussian moments E|u|^(2m) = m! sigma2^m),
and the residual f(u) - alpha1*u is uncorrelated with u.  OFDM time samples
are close enough to Gaussian for this to hold at the tolerances used here.

The default preset is mildly compressive, calibrated so the in-band
distortion floor sits near -30 dBc at 0 dB backoff for unit input power;
see tools/calibrate_presets.py and docs/calibration.md.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import polynomial_distort
from .errors import ConfigurationError

N_COEFFS = 5
_FACTORIALS = np.array([1.0, 2.0, 6.0, 24.0, 120.0])

# Calibrated: distortion-to-linear ratio -30.0 dBc at unit input power
# (tools/calibrate_presets.py reproduces the measurement).
_DEFAULT_COEFFS = (1.0, -0.0103 + 0.0018j, -0.0009, -7e-5, -9e-6)


@dataclass(frozen=True)
class PaModel:
    """Odd-order coefficients (a1, a3, a5, a7, a9) and input backoff in dB."""

    coeffs: tuple
    input_backoff_db: float = 0.0

    def __post_init__(self):
        if len(self.coeffs) != N_COEFFS:
            raise ConfigurationError(f"expected {N_COEFFS} coefficients (a1, a3, a5, a7, a9)")
        if not np.isfinite(self.input_backoff_db):
            raise ConfigurationError("input_backoff_db must be finite")

    @property
    def input_scale(self):
        return 10.0 ** (-self.input_backoff_db / 20.0)


@dataclass(frozen=True)
class BussgangDecomposition:
    """Linear gain, residual power, and the post-backoff input power used."""

    alpha1: complex
    distortion_power: float
    input_power: float


def preset(name):
    """Named amplifier models: 'default' (mild compression) or 'identity'."""
    if name == "default":
        return PaModel(coeffs=_DEFAULT_COEFFS)
    if name == "identity":
        return PaModel(coeffs=(1.0, 0.0, 0.0, 0.0, 0.0))
    raise ConfigurationError(f"unknown PA preset {name!r}; expected 'default' or 'identity'")


def apply(pa, samples):
    """Amplify samples: backoff scaling then the odd-order polynomial."""
    x = np.ascontiguousarray(samples, dtype=np.complex128)
    coeffs = np.ascontiguousarray(pa.coeffs, dtype=np.complex128)
    return polynomial_distort(x, coeffs, pa.input_scale)


def bussgang_closed_form(pa, input_power):
    """Gaussian-input alpha1 for the given pre-backoff input power."""
    if input_power < 0:
        raise ConfigurationError("input_power must be non-negative")
    sigma2 = input_power * pa.input_scale**2
    powers = sigma2 ** np.arange(N_COEFFS)
    return complex(np.sum(np.asarray(pa.coeffs) * _FACTORIALS * powers))


def effective_linear_gain(pa, input_power):
    """End-to-end linear gain seen by the pre-backoff input: scale * alpha1."""
    return pa.input_scale * bussgang_closed_form(pa, input_power)


def bussgang_mc(pa, input_power, n_samples, seed):
    """Monte-Carlo Bussgang decomposition against the closed form.

    Draws n_samples i.i.d. circular complex Gaussian samples of variance
    input_power, amplifies them, and estimates alpha1 and the residual
    power with respect to the post-backoff input.
    """
    if n_samples < 2:
        raise ConfigurationError("n_samples must be at least 2")
    rng = np.random.default_rng(seed)
    scale = np.sqrt(input_power / 2.0)
    x = scale * (rng.standard_normal(n_samples) + 1j * rng.standard_normal(n_samples))
    u = pa.input_scale * x
    y = apply(pa, x)
    alpha1 = np.vdot(u, y) / np.vdot(u, u)
    distortion = y - alpha1 * u
    return BussgangDecomposition(
        alpha1=complex(alpha1),
        distortion_power=float(np.mean(np.abs(distortion) ** 2)),
        input_power=float(np.mean(np.abs(u) ** 2)),
    )


def distortion_residual(pa, samples, alpha1):
    """Residual apply(pa, samples) - alpha1 * samples."""
    return apply(pa, samples) - alpha1 * np.asarray(samples, dtype=np.complex128)
