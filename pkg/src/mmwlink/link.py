"""End-to-end impaired OFDM link and its equivalent-channel model.

Stage order is fixed.  Transmit: QAM grid -> OFDM modulate -> TX I/Q
imbalance -> TX phase noise phasor -> PA.  Channel: tapped delay line ->
AWGN.  Receive: RX phase noise phasor -> RX I/Q imbalance -> OFDM
demodulate.  Any disabled stage (None in the scenario) is the identity.

Filter tails are truncated at symbol-block boundaries: each symbol of
N + cp samples is processed independently, which is exact for the FFT
window as long as every filter delay stays inside the cyclic prefix.
Phase noise trajectories are synthesized once per side per frame and span
the frame contiguously.

Frequency-domain model.  With unitary grids, writing M(k) = (N-k) % N for
the mirror bin, J_T/J_R for the per-symbol leakage coefficients of the two
phasors, G1/G2 for the branch filter spectra, H for the channel response
and alpha1 for the effective PA linear gain, one symbol obeys

    Z_k = Hbar_k S_k + Harrow_k conj(S_M(k)) + (ICI + distortion + noise)_k

    Hbar_k   = alpha1 J_T[0] J_R[0] G1T_k G1R_k H_k
    Harrow_k = alpha1 J_T[0] J_R[0] G2T_k G1R_k H_k
             + conj(alpha1 J_T[0] J_R[0] G1T_M(k) H_M(k)) G2R_k

The second image path is the receive-side image of everything that arrived
on the mirror bin, hence the conjugate on the whole transmit-plus-channel
factor evaluated at M(k).  predict_grid evaluates the full model with the
complete J vectors (exact circular convolutions, not just J[0]), the
recorded per-symbol PA distortion spectrum, and the regenerated noise, so
the residual against the simulated Z isolates what the per-symbol circular
model cannot represent (phasor drift across the cyclic prefix seen through
the channel taps).

Randomness is drawn from labeled streams derived from the scenario seed
(stage code, symbol index), so toggling one stage never shifts another
stage's draws.  The pilot grid is a fixed unit-magnitude QPSK sequence
shared by all scenarios of the same FFT size.
"""

from dataclasses import dataclass, field

import numpy as np

from . import channel as channel_mod
from . import iqimb, ofdm, pa as pa_mod, phasenoise
from ._kernels import phasor_rotate
from .errors import ConfigurationError

# Labeled seed-stream codes; see derive_seed().
STREAM_DATA = 1
STREAM_PN_TX = 2
STREAM_PN_RX = 3
STREAM_NOISE = 4
STREAM_CHANNEL = 5
STREAM_TRIAL = 6

# All pilot grids come from this constant, not from scenario seeds, so the
# pilot never changes between trials or scenarios.
_PILOT_STREAM_CONST = 0x9E3779B9

# Frame trajectories are synthesized with at least this many samples per
# FFT length so spectral content down to sample_rate / (64 * n_fft) is
# present; see docs/conventions.md.
_MIN_TRAJECTORY_FFTS = 64


def derive_seed(master, *path):
    """Deterministic child seed for a labeled stream under a master seed."""
    ss = np.random.SeedSequence([int(master) & 0xFFFFFFFF, *[int(p) for p in path]])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def stream(master, *path):
    """Generator for the labeled stream."""
    return np.random.default_rng(derive_seed(master, *path))


@dataclass(frozen=True)
class LinkScenario:
    """Everything needed to realize frames of the impaired link.

    Phase noise profiles are used as given; scale them to the carrier
    before building the scenario (presets.py does this).  noise=None,
    like any other None stage, disables the stage entirely.
    """

    carrier_freq_hz: float
    n_fft: int
    subcarrier_spacing_hz: float
    cp_len: int
    constellation: ofdm.QamConstellation
    channel: channel_mod.ChannelModel
    noise: channel_mod.NoiseSpec | None
    n_symbols: int
    seed: int
    pn_tx: phasenoise.PhaseNoiseProfile | None = None
    pn_rx: phasenoise.PhaseNoiseProfile | None = None
    pa: pa_mod.PaModel | None = None
    iq_tx: iqimb.IqImbalanceParams | None = None
    iq_rx: iqimb.IqImbalanceParams | None = None
    pilot_symbols: tuple = ()
    noise_seed: int | None = None

    def __post_init__(self):
        if self.carrier_freq_hz <= 0 or self.subcarrier_spacing_hz <= 0:
            raise ConfigurationError("carrier and subcarrier spacing must be positive")
        if not 0 <= self.cp_len < self.n_fft:
            raise ConfigurationError("cp_len must lie in [0, n_fft)")
        if self.n_symbols < 1:
            raise ConfigurationError("n_symbols must be at least 1")
        if self.channel.max_delay > self.cp_len:
            raise ConfigurationError(
                f"channel max delay {self.channel.max_delay} exceeds cp_len {self.cp_len}"
            )
        if any(not 0 <= m < self.n_symbols for m in self.pilot_symbols):
            raise ConfigurationError("pilot_symbols indices out of range")

    @property
    def sample_rate(self):
        return self.n_fft * self.subcarrier_spacing_hz

    @property
    def block_len(self):
        return self.n_fft + self.cp_len


@dataclass
class LinkRealization:
    """One simulated frame plus every quantity the model needs.

    Grids are (n_symbols, n_fft); j_tx/j_rx hold the per-symbol leakage
    coefficient vectors; distortion_spectra the per-symbol PA residual at
    the amplifier output; noise_seeds regenerate the exact noise draws.
    """

    scenario: LinkScenario
    tx_grids: np.ndarray
    rx_grids: np.ndarray
    j_tx: np.ndarray
    j_rx: np.ndarray
    alpha1: complex
    g1_tx: np.ndarray
    g2_tx: np.ndarray
    g1_rx: np.ndarray
    g2_rx: np.ndarray
    h_freq: np.ndarray
    distortion_spectra: np.ndarray
    noise_seeds: tuple
    pilot_mask: np.ndarray = field(default=None)


@dataclass(frozen=True)
class EquivalentChannel:
    """Per-bin direct coefficient and mirror-image coefficient."""

    h_bar: np.ndarray
    h_arrow: np.ndarray


def pilot_grid(n_fft):
    """Fixed unit-magnitude QPSK pilot used by every scenario."""
    rng = np.random.default_rng(np.random.SeedSequence([_PILOT_STREAM_CONST, n_fft]))
    quadrant = rng.integers(0, 4, n_fft)
    return np.exp(1j * (np.pi / 4.0 + np.pi / 2.0 * quadrant))


def data_grid(scn, m):
    """Random data symbols for slot m from the labeled data stream."""
    rng = stream(scn.seed, STREAM_DATA, m)
    bits = rng.integers(0, 2, scn.n_fft * scn.constellation.bits_per_symbol)
    return ofdm.map_qam(bits, scn.constellation)


def _delta_coeffs(n_fft):
    out = np.zeros(n_fft, dtype=np.complex128)
    out[0] = 1.0
    return out


def _frame_phase(profile, scn, stream_code):
    """Contiguous frame trajectory; length padded up for spectral resolution."""
    n_frame = scn.n_symbols * scn.block_len
    n_request = max(n_frame, _MIN_TRAJECTORY_FFTS * scn.n_fft)
    traj = phasenoise.synthesize_trajectory(
        profile, n_request, scn.sample_rate, derive_seed(scn.seed, stream_code)
    )
    return traj.phi[:n_frame]


def _pa_input_power(scn):
    """Mean sample power at the PA input for unit-power grids."""
    power = 1.0
    if scn.iq_tx is not None:
        f = iqimb.derive_filters(scn.iq_tx)
        power *= float(np.sum(np.abs(f.direct) ** 2) + np.sum(np.abs(f.image) ** 2))
    return power


def transmit(scn, grid, phi_tx=None):
    """Modulate one grid and run the transmit impairments over its block."""
    sym = ofdm.modulate(grid, scn.cp_len, scn.sample_rate)
    x = sym.samples
    if scn.iq_tx is not None:
        x = iqimb.apply(iqimb.derive_filters(scn.iq_tx), x)
    if phi_tx is not None:
        x = phasor_rotate(np.ascontiguousarray(x), np.ascontiguousarray(phi_tx))
    if scn.pa is not None:
        x = pa_mod.apply(scn.pa, x)
    return x


def receive(scn, samples, phi_rx=None):
    """Run the receive impairments over one block and demodulate."""
    z = np.asarray(samples, dtype=np.complex128)
    if phi_rx is not None:
        z = phasor_rotate(np.ascontiguousarray(z), np.ascontiguousarray(phi_rx))
    if scn.iq_rx is not None:
        z = iqimb.apply(iqimb.derive_filters(scn.iq_rx), z)
    sym = ofdm.TimeDomainSymbol(
        n_fft=scn.n_fft, cp_len=scn.cp_len, samples=z, sample_rate=scn.sample_rate
    )
    return ofdm.demodulate(sym)


def run_frame(scn):
    """Simulate one frame of n_symbols and record the model quantities."""
    n, cp, n_sym = scn.n_fft, scn.cp_len, scn.n_symbols
    blk = scn.block_len

    phi_tx = _frame_phase(scn.pn_tx, scn, STREAM_PN_TX) if scn.pn_tx is not None else None
    phi_rx = _frame_phase(scn.pn_rx, scn, STREAM_PN_RX) if scn.pn_rx is not None else None

    if scn.iq_tx is not None:
        g1_tx, g2_tx = iqimb.filter_spectra(iqimb.derive_filters(scn.iq_tx), n)
    else:
        g1_tx, g2_tx = np.ones(n, dtype=np.complex128), np.zeros(n, dtype=np.complex128)
    if scn.iq_rx is not None:
        g1_rx, g2_rx = iqimb.filter_spectra(iqimb.derive_filters(scn.iq_rx), n)
    else:
        g1_rx, g2_rx = np.ones(n, dtype=np.complex128), np.zeros(n, dtype=np.complex128)

    alpha1 = (
        pa_mod.effective_linear_gain(scn.pa, _pa_input_power(scn))
        if scn.pa is not None
        else 1.0 + 0.0j
    )
    h_freq = channel_mod.freq_response(scn.channel, n)

    tx_grids = np.empty((n_sym, n), dtype=np.complex128)
    rx_grids = np.empty((n_sym, n), dtype=np.complex128)
    j_tx = np.empty((n_sym, n), dtype=np.complex128)
    j_rx = np.empty((n_sym, n), dtype=np.complex128)
    dist = np.zeros((n_sym, n), dtype=np.complex128)
    pilot_mask = np.zeros(n_sym, dtype=bool)
    noise_base = scn.noise_seed if scn.noise_seed is not None else scn.seed
    noise_seeds = tuple(derive_seed(noise_base, STREAM_NOISE, m) for m in range(n_sym))

    filters_tx = iqimb.derive_filters(scn.iq_tx) if scn.iq_tx is not None else None
    pilot = pilot_grid(n)
    for m in range(n_sym):
        if m in scn.pilot_symbols:
            grid = pilot
            pilot_mask[m] = True
        else:
            grid = data_grid(scn, m)
        tx_grids[m] = grid

        x = ofdm.modulate(grid, cp, scn.sample_rate).samples
        if filters_tx is not None:
            x = iqimb.apply(filters_tx, x)
        if phi_tx is not None:
            seg_tx = phi_tx[m * blk : (m + 1) * blk]
            x = phasor_rotate(np.ascontiguousarray(x), np.ascontiguousarray(seg_tx))
            j_tx[m] = phasenoise.spectral_coefficients(seg_tx, cp, n)
        else:
            j_tx[m] = _delta_coeffs(n)
        if scn.pa is not None:
            pa_in = x
            x = pa_mod.apply(scn.pa, pa_in)
            # residual of the recorded linearization, at the PA output
            dist[m] = np.fft.fft((x - alpha1 * pa_in)[cp:], norm="ortho")

        y = channel_mod.apply_channel(scn.channel, x)
        if scn.noise is not None:
            y = channel_mod.add_awgn(y, scn.noise, noise_seeds[m])

        seg_rx = phi_rx[m * blk : (m + 1) * blk] if phi_rx is not None else None
        rx_grids[m] = receive(scn, y, seg_rx)
        j_rx[m] = (
            phasenoise.spectral_coefficients(seg_rx, cp, n) if seg_rx is not None
            else _delta_coeffs(n)
        )

    return LinkRealization(
        scenario=scn,
        tx_grids=tx_grids,
        rx_grids=rx_grids,
        j_tx=j_tx,
        j_rx=j_rx,
        alpha1=complex(alpha1),
        g1_tx=g1_tx,
        g2_tx=g2_tx,
        g1_rx=g1_rx,
        g2_rx=g2_rx,
        h_freq=h_freq,
        distortion_spectra=dist,
        noise_seeds=noise_seeds,
        pilot_mask=pilot_mask,
    )


def equivalent_channel(real, m):
    """Direct and mirror coefficients of symbol m (docstring formula above)."""
    n = real.scenario.n_fft
    mir = ofdm.mirror_indices(n)
    common = real.alpha1 * real.j_tx[m, 0] * real.j_rx[m, 0]
    h_bar = common * real.g1_tx * real.g1_rx * real.h_freq
    h_arrow = common * real.g2_tx * real.g1_rx * real.h_freq + (
        np.conj(common * real.g1_tx[mir] * real.h_freq[mir]) * real.g2_rx
    )
    return EquivalentChannel(h_bar=h_bar, h_arrow=h_arrow)


def _circular_convolve(grid, coeffs):
    return np.fft.ifft(np.fft.fft(grid) * np.fft.fft(coeffs))


def predict_grid(real, m):
    """Model prediction of the received grid of symbol m.

    Evaluates the frequency-domain chain with the complete leakage
    vectors: direct and mirror images at the transmitter, PA linear gain
    plus recorded distortion spectrum, channel, regenerated noise, receive
    leakage, and the receive-side image.
    """
    scn = real.scenario
    n, cp = scn.n_fft, scn.cp_len
    mir = ofdm.mirror_indices(n)

    s = real.tx_grids[m]
    a = real.g1_tx * s + real.g2_tx * np.conj(s[mir])
    b = _circular_convolve(a, real.j_tx[m])
    c = real.alpha1 * b + real.distortion_spectra[m]
    d = real.h_freq * c
    if scn.noise is not None:
        noise = channel_mod.add_awgn(
            np.zeros(scn.block_len, dtype=np.complex128), scn.noise, real.noise_seeds[m]
        )
        d = d + np.fft.fft(noise[cp:], norm="ortho")
    e = _circular_convolve(d, real.j_rx[m])
    return real.g1_rx * e + real.g2_rx * np.conj(e[mir])


def ls_estimate(pilot, received):
    """Per-bin least-squares channel estimate received/pilot.

    Bins with a zero pilot cannot be estimated; they return 0 and are
    reported in the accompanying validity mask.
    """
    pilot = np.asarray(pilot)
    received = np.asarray(received)
    valid = pilot != 0
    est = np.zeros_like(received)
    est[valid] = received[valid] / pilot[valid]
    return est, valid
