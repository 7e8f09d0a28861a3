"""Named presets: numerologies, oscillator pairings, and shipped scenarios.

Numerologies follow the two carrier/spacing pairs the simulator targets
(2048 subcarriers, 144-sample cyclic prefix at both).  Oscillator pairings
describe which profile preset sits at each end of the link: case1 has good
oscillators at both ends, case2 a good transmitter and a poor receiver.
"""

from dataclasses import dataclass
from importlib import resources

from .errors import ConfigurationError


@dataclass(frozen=True)
class Numerology:
    carrier_freq_hz: float
    subcarrier_spacing_hz: float
    n_fft: int
    cp_len: int


NUMEROLOGIES = {
    "28ghz_60khz": Numerology(28e9, 60e3, 2048, 144),
    "82ghz_480khz": Numerology(82e9, 480e3, 2048, 144),
}

# (tx profile preset, rx profile preset)
PAIRINGS = {
    "case1": ("low", "low"),
    "case2": ("low", "high"),
}


def numerology(name):
    try:
        return NUMEROLOGIES[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown numerology preset {name!r}; expected one of {sorted(NUMEROLOGIES)}"
        ) from None


def pairing(name):
    try:
        return PAIRINGS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown oscillator pairing {name!r}; expected one of {sorted(PAIRINGS)}"
        ) from None


# name -> (category, description); scenario files carry their own description
CATALOG = [
    ("28ghz_60khz", "numerology", "28 GHz carrier, 60 kHz spacing, N=2048, CP=144"),
    ("82ghz_480khz", "numerology", "82 GHz carrier, 480 kHz spacing, N=2048, CP=144"),
    ("low", "phase_noise", "good oscillator, calibrated at the 50 GHz reference"),
    ("high", "phase_noise", "poor oscillator, calibrated at the 50 GHz reference"),
    ("case1", "pairing", "good oscillators at both ends (tx=low, rx=low)"),
    ("case2", "pairing", "good transmitter, poor receiver (tx=low, rx=high)"),
    ("default", "pa", "mild compression, -30 dBc distortion at 0 dB backoff"),
    ("identity", "pa", "transparent amplifier"),
    ("best", "iq", "1% gain, 1 degree phase, frequency-flat (about 40 dB IRR)"),
    ("worst", "iq", "5% gain, 5 degrees phase, frequency-flat (about 26 dB IRR)"),
    ("ripple", "iq", "2% gain, 3 degrees phase, frequency-selective taps"),
    ("identity", "iq", "no imbalance"),
    ("flat", "channel", "single tap, no dispersion"),
    ("exp8", "channel", "8 taps, exponential power profile, inside the CP"),
]


def scenario_file_names():
    """Shipped scenario files, sorted by name."""
    root = resources.files("mmwlink") / "scenario_files"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".scn"))


def scenario_file_text(name):
    """Read one shipped scenario file by name."""
    if not name.endswith(".scn"):
        name = name + ".scn"
    path = resources.files("mmwlink") / "scenario_files" / name
    if not path.is_file():
        raise ConfigurationError(
            f"unknown scenario preset {name!r}; shipped: {scenario_file_names()}"
        )
    return path.read_text()


def scenario_description(text):
    """First '# description:' comment of a scenario file, if any."""
    for line in text.splitlines():
        if line.startswith("# description:"):
            return line.split(":", 1)[1].strip()
    return ""
