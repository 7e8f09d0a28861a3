"""Link quality metrics: CNR, CPE-fluctuation EVM, SINR, sum rate, SIR.

Aggregation happens in the linear power domain (ratios of summed powers,
then one dB conversion), never by averaging dB values, so Monte-Carlo
means converge to the model quantities without log-domain bias.  All dB
outputs are finite or carry the +/-300 dB sentinel caps: an exactly zero
numerator gives -300 dB, an exactly zero denominator +300 dB.
"""

from dataclasses import dataclass, replace

import numpy as np

from . import phasenoise
from .errors import ConfigurationError
from .link import STREAM_TRIAL, derive_seed, equivalent_channel, run_frame

DB_CAP = 300.0
_LINEAR_CAP = 10.0 ** (DB_CAP / 10.0)


def power_ratio_db(num, den):
    """10*log10(num/den) with the documented sentinel caps, elementwise."""
    num, den = np.broadcast_arrays(
        np.asarray(num, dtype=np.float64), np.asarray(den, dtype=np.float64)
    )
    shape = num.shape
    num, den = np.atleast_1d(num), np.atleast_1d(den)
    out = np.full(num.shape, -DB_CAP)
    ok = num > 0
    inf_bins = ok & (den == 0)
    fin = ok & ~inf_bins
    out[inf_bins] = DB_CAP
    # log-domain difference: num/den itself can overflow for denormal den
    out[fin] = np.clip(
        10.0 * (np.log10(num[fin]) - np.log10(den[fin])), -DB_CAP, DB_CAP
    )
    return float(out[0]) if shape == () else out.reshape(shape)


def cnr(h_hat, h_bar):
    """Per-bin channel estimate quality |h_bar|^2 / |h_hat - h_bar|^2 in dB.

    Bins where h_bar is exactly zero report the -300 dB sentinel and
    should be excluded from aggregates.
    """
    num = np.abs(np.asarray(h_bar)) ** 2
    err = np.abs(np.asarray(h_hat) - np.asarray(h_bar)) ** 2
    return power_ratio_db(num, err)


def cpe_evm(real, m1, m2):
    """Equivalent-channel aging between two symbols of one frame, in dB.

    Uses symbol m1's equivalent channel as a stale estimate for symbol
    m2: 10*log10(|Hbar_m1 - Hbar_m2|^2 / |Hbar_m2|^2).  Everything except
    the common phase error terms cancels in the ratio, so the value is the
    same on every bin and isolates the oscillators' symbol-to-symbol
    fluctuation; it is exactly the -300 dB sentinel when both symbols saw
    identical phase statistics (phase noise off, or constant trajectories).
    """
    n_sym = real.scenario.n_symbols
    if not (0 <= m1 < n_sym and 0 <= m2 < n_sym):
        raise ConfigurationError(f"symbol indices ({m1}, {m2}) outside frame of {n_sym}")
    c1 = real.j_tx[m1, 0] * real.j_rx[m1, 0]
    c2 = real.j_tx[m2, 0] * real.j_rx[m2, 0]
    value = power_ratio_db(np.abs(c1 - c2) ** 2, np.abs(c2) ** 2)
    return np.full(real.scenario.n_fft, float(value))


def sinr(scn, n_trials):
    """Per-bin SINR (linear) under perfect equivalent-channel knowledge.

    Monte-Carlo expectation over n_trials frames of the scenario (channel
    held fixed; data, phase noise, and noise redrawn per trial):

        gamma_k = E[|Hbar_k|^2] * sigma_s^2 / E[|Z_k - Hbar_k S_k|^2]

    with unit symbol power sigma_s^2 = 1.  Linear values are capped at
    10**30 so downstream dB conversion meets the sentinel caps.
    """
    if n_trials < 1:
        raise ConfigurationError("n_trials must be at least 1")
    n = scn.n_fft
    num = np.zeros(n)
    den = np.zeros(n)
    for t in range(n_trials):
        real = run_frame(replace(scn, seed=derive_seed(scn.seed, STREAM_TRIAL, t)))
        for m in range(scn.n_symbols):
            h_bar = equivalent_channel(real, m).h_bar
            num += np.abs(h_bar) ** 2
            den += np.abs(real.rx_grids[m] - h_bar * real.tx_grids[m]) ** 2
    with np.errstate(divide="ignore"):
        gamma = np.where(den > 0, num / np.where(den > 0, den, 1.0), np.inf)
    return np.minimum(gamma, _LINEAR_CAP)


def sum_rate(sinr_per_bin):
    """Mean spectral efficiency log2(1 + gamma) over bins (and trials)."""
    gamma = np.asarray(sinr_per_bin, dtype=np.float64)
    return float(np.mean(np.log2(1.0 + gamma)))


def sir_vs_spacing(profile, carrier_hz, spacings_hz, n_fft, n_trials, seed=0):
    """Common-phase-error SIR |J0|^2 / (1 - |J0|^2) across subcarrier spacings.

    For each spacing the profile is rescaled to the carrier, one long
    trajectory is synthesized at that numerology's sample rate, and the
    SIR is the ratio of summed powers over n_trials consecutive FFT-length
    windows.  Returns dB values, one per spacing.
    """
    if n_trials < 1:
        raise ConfigurationError("n_trials must be at least 1")
    scaled = phasenoise.scale_to_carrier(profile, carrier_hz)
    out = np.empty(len(spacings_hz))
    for i, spacing in enumerate(spacings_hz):
        sample_rate = n_fft * spacing
        traj = phasenoise.synthesize_trajectory(
            scaled, n_trials * n_fft, sample_rate, derive_seed(seed, int(round(spacing)))
        )
        windows = np.exp(1j * traj.phi[: n_trials * n_fft]).reshape(n_trials, n_fft)
        p0 = np.abs(windows.mean(axis=1)) ** 2
        out[i] = power_ratio_db(np.sum(p0), np.sum(1.0 - p0))
    return out


@dataclass(frozen=True)
class MetricSeries:
    """A plotted-metric series: x grid, y values, and axis meanings."""

    x: np.ndarray
    y: np.ndarray
    x_label: str
    y_label: str


def pdf_histogram(samples, n_bins, x_label="value"):
    """Density-normalized histogram of scalar samples as a MetricSeries."""
    samples = np.asarray(samples, dtype=np.float64)
    if samples.size < 1 or n_bins < 1:
        raise ConfigurationError("need at least one sample and one bin")
    density, edges = np.histogram(samples, bins=n_bins, density=True)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return MetricSeries(x=centers, y=density, x_label=x_label, y_label="probability density")
