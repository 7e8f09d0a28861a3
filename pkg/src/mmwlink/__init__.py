"""mmwlink: link-level simulator for OFDM mm-wave links with RF impairments.

Modules
-------
ofdm        QAM mapping and cyclic-prefix OFDM modulation (unitary FFT).
phasenoise  Piecewise power-law oscillator profiles, trajectory synthesis,
            spectral leakage coefficients (CPE / ICI / SIR).
pa          Odd-order polynomial power amplifier and Bussgang decomposition.
iqimb       Frequency-selective transmit/receive I/Q imbalance.
channel     Sparse tapped delay line and AWGN.
link        The impaired end-to-end chain and its equivalent-channel model.
metrics     CNR, CPE-fluctuation EVM, SINR, sum rate, SIR vs spacing.
experiments Scenario files, Monte-Carlo campaigns, CSV/manifest output.
"""

__version__ = "0.1.0"

from . import channel, iqimb, link, metrics, ofdm, pa, phasenoise, presets
from . import experiments
from ._kernels import backend_name as kernel_backend
from .errors import ConfigurationError, ScenarioFormatError, ShapeError

__all__ = [
    "ofdm",
    "phasenoise",
    "pa",
    "iqimb",
    "channel",
    "link",
    "metrics",
    "experiments",
    "presets",
    "ConfigurationError",
    "ShapeError",
    "ScenarioFormatError",
    "kernel_backend",
    "__version__",
]
