"""Gray-coded square QAM and cyclic-prefix OFDM with unitary FFT scaling.

Conventions, fixed so bit-level results are reproducible:

* Subcarrier grids are length-N complex arrays with DC at index 0 and the
  mirror of bin k at (N - k) % N.  DC and (for even N) the Nyquist bin are
  their own mirrors.
* Both transforms use the unitary 1/sqrt(N) scaling, so average power is
  preserved between the grid and the time-domain samples.
* A QAM symbol carries B = log2(order) bits, MSB first; the first B/2 bits
  select the I level, the last B/2 the Q level.  Within one axis the bit
  group v picks level index k = gray_decode(v) and amplitude (m-1) - 2k for
  m levels, so adjacent amplitudes differ in exactly one bit and the
  all-zeros group maps to the most positive amplitude: bits 00 -> (1+1j)/sqrt(2)
  for order 4.
* Constellations are scaled to unit average power.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, ShapeError

QAM_ORDERS = (4, 16, 64, 256)


@dataclass(frozen=True)
class QamConstellation:
    """Square QAM alphabet; points[label] is the symbol for that bit label."""

    order: int
    points: np.ndarray

    @property
    def bits_per_symbol(self):
        return int(np.log2(self.order))


def _gray_encode(k):
    return k ^ (k >> 1)


def constellation(order):
    """Build the Gray-coded square QAM constellation for the given order."""
    if order not in QAM_ORDERS:
        raise ConfigurationError(f"unsupported QAM order {order}; expected one of {QAM_ORDERS}")
    bits_axis = int(np.log2(order)) // 2
    m = 1 << bits_axis
    # axis_amp[v] = amplitude selected by the bit group with value v
    axis_amp = np.empty(m)
    for k in range(m):
        axis_amp[_gray_encode(k)] = (m - 1) - 2 * k
    scale = np.sqrt(2.0 * (m * m - 1) / 3.0)
    v_i, v_q = np.meshgrid(np.arange(m), np.arange(m), indexing="ij")
    labels = (v_i << bits_axis) | v_q
    points = np.empty(order, dtype=np.complex128)
    points[labels.ravel()] = (axis_amp[v_i.ravel()] + 1j * axis_amp[v_q.ravel()]) / scale
    return QamConstellation(order=order, points=points)


def map_qam(bits, const):
    """Map a bit array (multiple of B bits, MSB first) to QAM symbols."""
    bits = np.asarray(bits, dtype=np.int64)
    b = const.bits_per_symbol
    if bits.ndim != 1 or bits.size % b:
        raise ShapeError(f"bit count {bits.size} is not a multiple of {b}")
    weights = 1 << np.arange(b - 1, -1, -1)
    labels = bits.reshape(-1, b) @ weights
    return const.points[labels]


def demap_qam(symbols, const):
    """Hard-decide symbols back to bits (nearest constellation point)."""
    symbols = np.asarray(symbols, dtype=np.complex128)
    bits_axis = const.bits_per_symbol // 2
    m = 1 << bits_axis
    scale = np.sqrt(2.0 * (m * m - 1) / 3.0)

    def axis_group(vals):
        k = np.clip(np.round(((m - 1) - vals * scale) / 2.0), 0, m - 1).astype(np.int64)
        return _gray_encode(k)

    v = (axis_group(symbols.real) << bits_axis) | axis_group(symbols.imag)
    b = const.bits_per_symbol
    shifts = np.arange(b - 1, -1, -1)
    return ((v[:, None] >> shifts) & 1).astype(np.uint8).ravel()


def mirror_indices(n_fft):
    """Index array sending bin k to its image bin (n_fft - k) % n_fft."""
    return (n_fft - np.arange(n_fft)) % n_fft


@dataclass(frozen=True)
class TimeDomainSymbol:
    """One OFDM symbol of baseband samples: cyclic prefix then FFT window."""

    n_fft: int
    cp_len: int
    samples: np.ndarray
    sample_rate: float

    def __post_init__(self):
        if self.samples.shape != (self.n_fft + self.cp_len,):
            raise ShapeError(
                f"expected {self.n_fft + self.cp_len} samples, got {self.samples.shape}"
            )


def modulate(grid, cp_len, sample_rate=1.0):
    """Unitary IFFT of the grid plus a cyclic prefix of cp_len samples."""
    grid = np.asarray(grid, dtype=np.complex128)
    if grid.ndim != 1:
        raise ShapeError("grid must be one-dimensional")
    n_fft = grid.shape[0]
    if not 0 <= cp_len < n_fft:
        raise ConfigurationError(f"cp_len {cp_len} must lie in [0, {n_fft})")
    body = np.fft.ifft(grid, norm="ortho")
    samples = np.concatenate([body[n_fft - cp_len :], body])
    return TimeDomainSymbol(n_fft=n_fft, cp_len=cp_len, samples=samples, sample_rate=sample_rate)


def demodulate(sym):
    """Strip the cyclic prefix and take the unitary FFT of the window."""
    return np.fft.fft(sym.samples[sym.cp_len :], norm="ortho")
