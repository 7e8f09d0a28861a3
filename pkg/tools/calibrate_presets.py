#!/usr/bin/env python3
"""Re-derive the calibrated constants shipped in the package presets.

Three numbers in the source tree came out of a calibration procedure
rather than a closed form, and this script is that procedure:

* ``phasenoise._LOW_PLATEAU_DB``: plateau level (at the 50 GHz reference
  carrier) of the 'low' oscillator preset, solved so the common-phase-error
  SIR at 28 GHz with 60 kHz subcarrier spacing lands on 35 dB.
* ``phasenoise._HIGH_PLATEAU_DB``: plateau level of the 'high' preset,
  solved so the channel-estimation CNR floor of the low-TX/high-RX pairing
  at 82 GHz with 480 kHz spacing lands near 12 dB.
* ``pa._DEFAULT_COEFFS``: the shipped polynomial is fixed; this script
  reports its distortion-to-linear ratio at unit input power (the -30.0 dBc
  figure quoted in the module) from both the closed form and Monte Carlo.

Run it after touching any of those presets and update the constants if the
solved values drift.  Defaults keep the runtime around a minute; lowering
--windows / --trials trades precision for speed.
"""

import argparse
import sys
from dataclasses import replace

import numpy as np

from mmwlink import channel, link, metrics, ofdm, pa, phasenoise

# Shape of the plateau profile (corners and slopes are design choices, the
# plateau level is the solved quantity).  Mirrors phasenoise._plateau_profile.
PLATEAU_CORNERS = (1e3, 150e3, 150e3 * 10 ** (52.0 / 30.0))
PLATEAU_SLOPES = (0.0, -30.0, 0.0)

LOW_TARGET_SIR_DB = 35.0  # at 28 GHz, 60 kHz spacing
LOW_CHECK = (82e9, 480e3, 30.0)  # secondary anchor, reported only
HIGH_TARGET_CNR_DB = 12.0  # estimation floor at 82 GHz, 480 kHz spacing


def plateau_profile(plateau_db):
    return phasenoise.profile_from_corners(
        PLATEAU_CORNERS, plateau_db, PLATEAU_SLOPES, phasenoise.REF_CARRIER_HZ
    )


def low_preset_sir(plateau_db, carrier_hz, spacing_hz, windows, seed):
    prof = plateau_profile(plateau_db)
    return float(
        metrics.sir_vs_spacing(prof, carrier_hz, [spacing_hz], 2048, windows, seed=seed)[0]
    )


def cnr_floor(rx_plateau_db, trials, seed):
    """CNR of the LS channel estimate at SNR 35 dB, TX 'low', RX at the
    candidate plateau, 82 GHz / 480 kHz, channel redrawn per trial."""
    pdp = channel.pdp_preset("exp8")
    scn = link.LinkScenario(
        carrier_freq_hz=82e9,
        n_fft=2048,
        subcarrier_spacing_hz=480e3,
        cp_len=144,
        constellation=ofdm.constellation(16),
        channel=channel.mean_model(pdp),
        noise=channel.NoiseSpec(snr_db=35.0),
        n_symbols=1,
        seed=0,
        pn_tx=phasenoise.scale_to_carrier(phasenoise.preset("low"), 82e9),
        pn_rx=phasenoise.scale_to_carrier(plateau_profile(rx_plateau_db), 82e9),
        pilot_symbols=(0,),
    )
    num = den = 0.0
    for t in range(trials):
        trial = replace(
            scn,
            seed=link.derive_seed(seed, link.STREAM_TRIAL, t),
            channel=channel.draw_realization(pdp, link.derive_seed(seed, link.STREAM_CHANNEL, t)),
        )
        real = link.run_frame(trial)
        h_bar = link.equivalent_channel(real, 0).h_bar
        h_hat, valid = link.ls_estimate(real.tx_grids[0], real.rx_grids[0])
        use = valid & (np.abs(h_bar) > 0)
        num += float(np.sum(np.abs(h_bar[use]) ** 2))
        den += float(np.sum(np.abs(h_hat[use] - h_bar[use]) ** 2))
    return metrics.power_ratio_db(num, den)


def bisect(f, lo, hi, target, tol_db=0.02, max_iter=40):
    """Solve f(x) = target for monotonically increasing f."""
    flo, fhi = f(lo), f(hi)
    if not flo < target < fhi:
        raise RuntimeError(f"target {target} outside bracket [{flo:.2f}, {fhi:.2f}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fmid = f(mid)
        if abs(fmid - target) < tol_db:
            return mid, fmid
        if fmid < target:
            lo = mid
        else:
            hi = mid
    return mid, fmid


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--windows", type=int, default=4000, help="FFT windows per SIR evaluation")
    ap.add_argument("--trials", type=int, default=150, help="link trials per CNR evaluation")
    ap.add_argument("--mc-samples", type=int, default=1_000_000, help="amplifier MC sample count")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    print("== 'low' oscillator plateau ==")
    # SIR falls as the plateau rises, so negate to hand bisect a rising function.
    solved, sir = bisect(
        lambda p: -low_preset_sir(p, 28e9, 60e3, args.windows, args.seed),
        -95.0,
        -72.0,
        -LOW_TARGET_SIR_DB,
    )
    print(f"  target SIR {LOW_TARGET_SIR_DB:.1f} dB at 28 GHz / 60 kHz")
    print(f"  solved plateau {solved:.2f} dB   (shipped {phasenoise._LOW_PLATEAU_DB})")
    chk_c, chk_s, chk_sir = LOW_CHECK
    got = low_preset_sir(solved, chk_c, chk_s, args.windows, args.seed)
    print(f"  check: {got:.2f} dB SIR at {chk_c/1e9:.0f} GHz / {chk_s/1e3:.0f} kHz"
          f" (anchor {chk_sir:.0f} dB)")

    print("== 'high' oscillator plateau ==")
    solved, got = bisect(
        lambda p: -cnr_floor(p, args.trials, args.seed),
        -75.0,
        -58.0,
        -HIGH_TARGET_CNR_DB,
        tol_db=0.05,
    )
    print(f"  target CNR floor {HIGH_TARGET_CNR_DB:.1f} dB at 82 GHz / 480 kHz, SNR 35 dB")
    print(f"  solved plateau {solved:.2f} dB   (shipped {phasenoise._HIGH_PLATEAU_DB})")

    print("== amplifier distortion at unit input power ==")
    model = pa.preset("default")
    alpha1 = pa.bussgang_closed_form(model, 1.0)
    dec = pa.bussgang_mc(model, 1.0, args.mc_samples, seed=args.seed)
    dbc = 10.0 * np.log10(dec.distortion_power / (abs(dec.alpha1) ** 2 * dec.input_power))
    print(f"  closed-form alpha1 {alpha1:.6f}, MC alpha1 {dec.alpha1:.6f}")
    print(f"  distortion-to-linear ratio {dbc:.2f} dBc   (quoted -30.0)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
