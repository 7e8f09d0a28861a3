"""Scenario files, Monte-Carlo campaigns, and CSV/manifest output.

Scenario files are plain text: a version header line, then INI-style
sections (numerology, phase_noise, pa, iq, channel, noise) describing one
link configuration, then one or more ``[campaign <name>]`` sections, each
producing one CSV table.  Unknown sections or keys are errors.  The format
is documented in docs/scenario-format.md and the shipped files under
mmwlink/scenario_files/ double as examples.

Reproducibility rules:

* Every random draw comes from a stream labeled by (master seed, stage,
  trial index), so a campaign's output is a pure function of its
  configuration and master seed.
* Trials are processed in fixed-size chunks (TRIAL_CHUNK) and chunk
  results are reduced in chunk order, so the CSV bytes do not depend on
  the parallelism degree.
* CSV files and manifests are written to a temporary file in the target
  directory and renamed into place; the manifest is written only after
  every output it describes.
"""

import configparser
import csv
import hashlib
import io
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import partial

import numpy as np

from . import __version__
from . import channel as channel_mod
from . import iqimb, metrics, presets
from . import pa as pa_mod
from . import phasenoise
from .errors import ConfigurationError, ScenarioFormatError
from .link import (
    STREAM_CHANNEL,
    STREAM_TRIAL,
    LinkScenario,
    derive_seed,
    equivalent_channel,
    ls_estimate,
    predict_grid,
    run_frame,
)
from .ofdm import constellation

FORMAT_HEADER = "mmwlink-scenario v1"
CAMPAIGN_KINDS = ("cnr_sweep", "evm_pdf", "rate_sweep", "sir_sweep", "model_audit")

# Trials per work unit; fixed so results are independent of --jobs.
TRIAL_CHUNK = 50

_SECTION_KEYS = {
    "numerology": {
        "preset",
        "carrier_ghz",
        "spacing_khz",
        "n_fft",
        "cp_len",
        "constellation_order",
        "n_symbols",
        "pilot_symbols",
    },
    "phase_noise": {"pairing", "tx", "rx", "tx_segments", "rx_segments", "ref_carrier_ghz"},
    "pa": {"preset", "coeffs", "backoff_db"},
    "iq": {"tx", "rx", "tx_gain", "tx_phase_deg", "tx_taps", "rx_gain", "rx_phase_deg", "rx_taps"},
    "channel": {"preset", "redraw_per_trial"},
    "noise": {"snr_db", "array_gain_db"},
}
_CAMPAIGN_KEYS = {
    "kind",
    "n_trials",
    "seed",
    "output",
    "snr_grid_db",
    "spacing_khz",
    "profile",
    "n_bins",
    "n_channels",
    "symbols",
    "budget_db",
}


@dataclass(frozen=True)
class Campaign:
    """One Monte-Carlo experiment: a scenario, a kind, and its sweep axis."""

    name: str
    kind: str
    scenario: LinkScenario
    master_seed: int
    n_trials: int
    output_name: str
    config_echo: str
    snr_grid_db: tuple = ()
    spacing_grid_hz: tuple = ()
    sir_profile: str = "low"
    n_bins: int = 60
    n_channels: int = 10
    evm_symbols: tuple = (0, 1)
    redraw_channel: bool = False
    channel_pdp: channel_mod.PowerDelayProfile = None
    budget_db: float = -25.0


@dataclass(frozen=True)
class RunManifest:
    """What a finished campaign wrote, and from which configuration."""

    campaign: str
    kind: str
    master_seed: int
    version: str
    wall_time_s: float
    outputs: tuple
    config_echo: str


# ---------------------------------------------------------------------------
# scenario parsing


def _fail(section, key, msg):
    raise ScenarioFormatError(f"[{section}] {key}: {msg}")


def _floats(section, key, text):
    try:
        return tuple(float(tok) for tok in text.split())
    except ValueError:
        _fail(section, key, f"expected numbers, got {text!r}")


def _grid(section, key, text):
    """Either 'start:step:stop' (inclusive) or a space-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            _fail(section, key, f"grid syntax is start:step:stop, got {text!r}")
        try:
            start, step, stop = (float(p) for p in parts)
        except ValueError:
            _fail(section, key, f"expected numbers, got {text!r}")
        if step <= 0 or stop < start:
            _fail(section, key, "grid needs step > 0 and stop >= start")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(start + step * i for i in range(n))
    return _floats(section, key, text)


def _parse_segments(section, key, text, ref_carrier_hz):
    triples = []
    for part in text.split(";"):
        tokens = part.split()
        if len(tokens) != 3:
            _fail(section, key, f"segment {part!r} is not 'corner_hz level_db slope'")
        triples.append(tuple(float(t) for t in tokens))
    segs = tuple(phasenoise.Segment(c, l, s) for c, l, s in triples)
    return phasenoise.PhaseNoiseProfile(segments=segs, ref_carrier_hz=ref_carrier_hz)


def _profile_for(section, key, value, segments_text, ref_carrier_hz, carrier_hz):
    """Resolve one side's profile (preset name, 'off', or explicit segments)."""
    if segments_text is not None:
        if value is not None:
            _fail(section, key, "give either a preset name or explicit segments, not both")
        profile = _parse_segments(section, key + "_segments", segments_text, ref_carrier_hz)
    elif value is None or value == "off":
        return None
    else:
        profile = phasenoise.preset(value)
    return phasenoise.scale_to_carrier(profile, carrier_hz)


def _iq_side(sec, side, carrier_note=None):
    name = sec.get(side)
    explicit = [sec.get(f"{side}_gain"), sec.get(f"{side}_phase_deg"), sec.get(f"{side}_taps")]
    if name is not None and any(v is not None for v in explicit):
        _fail("iq", side, "give either a preset name or explicit values, not both")
    if name is not None:
        return None if name == "off" else iqimb.preset(name, side)
    if all(v is None for v in explicit):
        return None
    gain = float(explicit[0]) if explicit[0] is not None else 1.0
    phase = float(explicit[1]) if explicit[1] is not None else 0.0
    taps = tuple(_floats("iq", f"{side}_taps", explicit[2])) if explicit[2] is not None else (1.0, 0.0, 0.0)
    return iqimb.IqImbalanceParams(gain=gain, phase_deg=phase, mismatch_taps=taps, side=side)


def _check_sections(parser):
    for section in parser.sections():
        base = "campaign" if section == "campaign" or section.startswith("campaign ") else section
        if base == "campaign":
            allowed = _CAMPAIGN_KEYS
        elif section in _SECTION_KEYS:
            allowed = _SECTION_KEYS[section]
        else:
            raise ScenarioFormatError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in allowed:
                raise ScenarioFormatError(f"unknown key {key!r} in section [{section}]")


def _bool(section, key, text):
    if text.lower() in ("true", "yes", "1"):
        return True
    if text.lower() in ("false", "no", "0"):
        return False
    _fail(section, key, f"expected true/false, got {text!r}")


def _build_scenario(parser):
    num = parser["numerology"] if parser.has_section("numerology") else {}
    if "preset" in num:
        n = presets.numerology(num["preset"])
        carrier, spacing, n_fft, cp_len = (
            n.carrier_freq_hz,
            n.subcarrier_spacing_hz,
            n.n_fft,
            n.cp_len,
        )
    else:
        if "carrier_ghz" not in num or "spacing_khz" not in num:
            raise ScenarioFormatError(
                "[numerology] needs either preset or carrier_ghz and spacing_khz"
            )
        carrier = float(num["carrier_ghz"]) * 1e9
        spacing = float(num["spacing_khz"]) * 1e3
        n_fft = int(num.get("n_fft", 2048))
        cp_len = int(num.get("cp_len", 144))
    order = int(num.get("constellation_order", 16))
    n_symbols = int(num.get("n_symbols", 1))
    pilot_text = num.get("pilot_symbols", "0")
    pilots = () if pilot_text.strip() == "none" else tuple(int(t) for t in pilot_text.split())

    pn = parser["phase_noise"] if parser.has_section("phase_noise") else {}
    ref_carrier = float(pn.get("ref_carrier_ghz", 50.0)) * 1e9
    if "pairing" in pn:
        if "tx" in pn or "rx" in pn:
            _fail("phase_noise", "pairing", "pairing replaces the tx/rx keys")
        tx_name, rx_name = presets.pairing(pn["pairing"])
    else:
        tx_name, rx_name = pn.get("tx"), pn.get("rx")
    pn_tx = _profile_for("phase_noise", "tx", tx_name, pn.get("tx_segments"), ref_carrier, carrier)
    pn_rx = _profile_for("phase_noise", "rx", rx_name, pn.get("rx_segments"), ref_carrier, carrier)

    pa_sec = parser["pa"] if parser.has_section("pa") else {}
    pa_name = pa_sec.get("preset")
    if pa_name is not None and "coeffs" in pa_sec:
        _fail("pa", "preset", "give either a preset name or coeffs, not both")
    if "coeffs" in pa_sec:
        try:
            coeffs = tuple(complex(tok) for tok in pa_sec["coeffs"].split())
        except ValueError:
            _fail("pa", "coeffs", f"expected complex numbers, got {pa_sec['coeffs']!r}")
        pa = pa_mod.PaModel(coeffs=coeffs, input_backoff_db=float(pa_sec.get("backoff_db", 0.0)))
    elif pa_name is None or pa_name == "off":
        pa = None
    else:
        pa = replace(
            pa_mod.preset(pa_name), input_backoff_db=float(pa_sec.get("backoff_db", 0.0))
        )

    iq_sec = parser["iq"] if parser.has_section("iq") else {}
    iq_tx = _iq_side(iq_sec, "tx")
    iq_rx = _iq_side(iq_sec, "rx")

    ch_sec = parser["channel"] if parser.has_section("channel") else {}
    pdp = channel_mod.pdp_preset(ch_sec.get("preset", "flat"))
    redraw = _bool("channel", "redraw_per_trial", ch_sec.get("redraw_per_trial", "false"))

    noise_sec = parser["noise"] if parser.has_section("noise") else {}
    gain_db = float(noise_sec.get("array_gain_db", 0.0))
    snr_text = noise_sec.get("snr_db", "off")
    noise = (
        None
        if snr_text == "off"
        else channel_mod.NoiseSpec(snr_db=float(snr_text) + gain_db)
    )

    scenario = LinkScenario(
        carrier_freq_hz=carrier,
        n_fft=n_fft,
        subcarrier_spacing_hz=spacing,
        cp_len=cp_len,
        constellation=constellation(order),
        channel=channel_mod.mean_model(pdp),
        noise=noise,
        n_symbols=n_symbols,
        seed=0,
        pn_tx=pn_tx,
        pn_rx=pn_rx,
        pa=pa,
        iq_tx=iq_tx,
        iq_rx=iq_rx,
        pilot_symbols=pilots,
    )
    return scenario, pdp, redraw, gain_db


def _build_campaign(name, sec, scenario, pdp, redraw, gain_db, echo):
    kind = sec.get("kind")
    if kind not in CAMPAIGN_KINDS:
        _fail(f"campaign {name}", "kind", f"expected one of {CAMPAIGN_KINDS}, got {kind!r}")
    if "n_trials" not in sec:
        _fail(f"campaign {name}", "n_trials", "is required")
    fields = dict(
        name=name,
        kind=kind,
        scenario=scenario,
        master_seed=int(sec.get("seed", 0)),
        n_trials=int(sec["n_trials"]),
        output_name=sec.get("output", f"{name}.csv"),
        config_echo=echo,
        redraw_channel=redraw,
        channel_pdp=pdp,
    )
    section = f"campaign {name}"
    if kind in ("cnr_sweep", "rate_sweep"):
        if "snr_grid_db" not in sec:
            _fail(section, "snr_grid_db", f"is required for {kind}")
        fields["snr_grid_db"] = tuple(
            v + gain_db for v in _grid(section, "snr_grid_db", sec["snr_grid_db"])
        )
    if kind == "sir_sweep":
        if "spacing_khz" not in sec:
            _fail(section, "spacing_khz", "is required for sir_sweep")
        fields["spacing_grid_hz"] = tuple(
            1e3 * v for v in _floats(section, "spacing_khz", sec["spacing_khz"])
        )
        fields["sir_profile"] = sec.get("profile", "low")
        phasenoise.preset(fields["sir_profile"])  # validate the name early
    if kind == "evm_pdf":
        fields["n_bins"] = int(sec.get("n_bins", 60))
        symbols = tuple(int(t) for t in sec.get("symbols", "0 1").split())
        if len(symbols) != 2:
            _fail(section, "symbols", "needs exactly two symbol indices")
        if any(not 0 <= m < scenario.n_symbols for m in symbols):
            _fail(section, "symbols", f"indices must lie in [0, {scenario.n_symbols})")
        fields["evm_symbols"] = symbols
    if kind == "rate_sweep":
        fields["n_channels"] = int(sec.get("n_channels", 10))
    if kind == "model_audit":
        fields["budget_db"] = float(sec.get("budget_db", -25.0))
    if kind == "cnr_sweep" and not scenario.pilot_symbols:
        _fail(section, "kind", "cnr_sweep needs at least one pilot symbol in [numerology]")
    return Campaign(**fields)


def parse_scenario_text(text, label="scenario"):
    """Parse scenario text into the campaigns it defines."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise ScenarioFormatError(f"first line must be {FORMAT_HEADER!r}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string("\n".join(lines[1:]), source=label)
    except configparser.Error as exc:
        raise ScenarioFormatError(str(exc)) from exc
    _check_sections(parser)
    scenario, pdp, redraw, gain_db = _build_scenario(parser)
    campaigns = []
    for section in parser.sections():
        if section == "campaign" or section.startswith("campaign "):
            name = section[len("campaign") :].strip() or label
            campaigns.append(
                _build_campaign(name, parser[section], scenario, pdp, redraw, gain_db, text)
            )
    if not campaigns:
        raise ScenarioFormatError("no campaigns: add at least one [campaign <name>] section")
    return campaigns


def parse_scenario(source):
    """Parse a scenario file path or a shipped preset name into campaigns."""
    if os.path.exists(source):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
        label = os.path.splitext(os.path.basename(source))[0]
    else:
        text = presets.scenario_file_text(source)
        label = source.removesuffix(".scn")
    return parse_scenario_text(text, label=label)


# ---------------------------------------------------------------------------
# campaign execution


def _trial_scenario(campaign, scenario, t):
    scn = replace(scenario, seed=derive_seed(campaign.master_seed, STREAM_TRIAL, t))
    if campaign.redraw_channel:
        ch = channel_mod.draw_realization(
            campaign.channel_pdp, derive_seed(campaign.master_seed, STREAM_CHANNEL, t)
        )
        scn = replace(scn, channel=ch)
    return scn


def _chunk_range(campaign, chunk_idx):
    lo = chunk_idx * TRIAL_CHUNK
    return range(lo, min(lo + TRIAL_CHUNK, campaign.n_trials))


def _n_chunks(campaign):
    return -(-campaign.n_trials // TRIAL_CHUNK)


def _cnr_task(campaign, task):
    snr_idx, chunk_idx = task
    scn = replace(
        campaign.scenario, noise=channel_mod.NoiseSpec(snr_db=campaign.snr_grid_db[snr_idx])
    )
    num = den = 0.0
    for t in _chunk_range(campaign, chunk_idx):
        real = run_frame(_trial_scenario(campaign, scn, t))
        m = int(np.argmax(real.pilot_mask))
        h_bar = equivalent_channel(real, m).h_bar
        h_hat, valid = ls_estimate(real.tx_grids[m], real.rx_grids[m])
        use = valid & (np.abs(h_bar) > 0)
        num += float(np.sum(np.abs(h_bar[use]) ** 2))
        den += float(np.sum(np.abs(h_hat[use] - h_bar[use]) ** 2))
    return num, den


def _evm_task(campaign, chunk_idx):
    m1, m2 = campaign.evm_symbols
    out = []
    for t in _chunk_range(campaign, chunk_idx):
        real = run_frame(_trial_scenario(campaign, campaign.scenario, t))
        out.append(float(metrics.cpe_evm(real, m1, m2)[0]))
    return out


def _audit_task(campaign, chunk_idx):
    resid = sig = 0.0
    for t in _chunk_range(campaign, chunk_idx):
        real = run_frame(_trial_scenario(campaign, campaign.scenario, t))
        for m in range(campaign.scenario.n_symbols):
            predicted = predict_grid(real, m)
            resid += float(np.sum(np.abs(real.rx_grids[m] - predicted) ** 2))
            sig += float(np.sum(np.abs(real.rx_grids[m]) ** 2))
    return resid, sig


def _rate_task(campaign, channel_idx):
    scn = _trial_scenario(campaign, campaign.scenario, channel_idx)
    rates = []
    for snr in campaign.snr_grid_db:
        gamma = metrics.sinr(replace(scn, noise=channel_mod.NoiseSpec(snr_db=snr)), campaign.n_trials)
        rates.append(metrics.sum_rate(gamma))
    return rates


def _execute(worker, campaign, tasks, jobs):
    if jobs is None:
        jobs = os.cpu_count() or 1
    jobs = max(1, min(int(jobs), len(tasks)))
    bound = partial(worker, campaign)
    if jobs == 1:
        return [bound(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(bound, tasks))


def _rows_cnr(campaign, jobs):
    tasks = [(si, ci) for si in range(len(campaign.snr_grid_db)) for ci in range(_n_chunks(campaign))]
    results = _execute(_cnr_task, campaign, tasks, jobs)
    rows = []
    for si, snr in enumerate(campaign.snr_grid_db):
        chunks = [r for (s, _), r in zip(tasks, results) if s == si]
        num = sum(c[0] for c in chunks)
        den = sum(c[1] for c in chunks)
        rows.append((snr, metrics.power_ratio_db(num, den), campaign.n_trials))
    return ("snr_db", "cnr_mean_db", "n_trials"), rows


def _rows_evm(campaign, jobs):
    results = _execute(_evm_task, campaign, list(range(_n_chunks(campaign))), jobs)
    samples = [v for chunk in results for v in chunk]
    series = metrics.pdf_histogram(samples, campaign.n_bins, x_label="evm_db")
    header = ("evm_db", "density")
    return header, list(zip(series.x.tolist(), series.y.tolist()))


def _rows_rate(campaign, jobs):
    tasks = list(range(campaign.n_channels))
    results = _execute(_rate_task, campaign, tasks, jobs)
    rates = np.mean(np.asarray(results), axis=0)
    header = ("snr_db", "sum_rate_bps_hz", "n_channels", "n_trials")
    rows = [
        (snr, float(rate), campaign.n_channels, campaign.n_trials)
        for snr, rate in zip(campaign.snr_grid_db, rates)
    ]
    return header, rows


def _rows_sir(campaign):
    profile = phasenoise.preset(campaign.sir_profile)
    sirs = metrics.sir_vs_spacing(
        profile,
        campaign.scenario.carrier_freq_hz,
        campaign.spacing_grid_hz,
        campaign.scenario.n_fft,
        campaign.n_trials,
        seed=campaign.master_seed,
    )
    header = ("spacing_hz", "sir_db", "carrier_hz", "n_trials")
    rows = [
        (sp, float(sir), campaign.scenario.carrier_freq_hz, campaign.n_trials)
        for sp, sir in zip(campaign.spacing_grid_hz, sirs)
    ]
    return header, rows


def _rows_audit(campaign, jobs):
    results = _execute(_audit_task, campaign, list(range(_n_chunks(campaign))), jobs)
    resid = sum(r for r, _ in results)
    sig = sum(s for _, s in results)
    residual_db = metrics.power_ratio_db(resid, sig)
    header = ("residual_db", "budget_db", "passed", "n_trials")
    return header, [(residual_db, campaign.budget_db, int(residual_db < campaign.budget_db), campaign.n_trials)]


def _format_cell(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_atomic(path, data):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_bytes(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_format_cell(v) for v in row])
    return buf.getvalue().encode("utf-8")


def _manifest_text(manifest):
    lines = [
        "mmwlink run manifest",
        f"campaign: {manifest.campaign}",
        f"kind: {manifest.kind}",
        f"master_seed: {manifest.master_seed}",
        f"version: {manifest.version}",
        f"wall_time_s: {manifest.wall_time_s:.3f}",
    ]
    for name, digest in manifest.outputs:
        lines.append(f"output: {name} sha256={digest}")
    lines.append("config:")
    lines.extend("  " + line for line in manifest.config_echo.splitlines())
    return "\n".join(lines) + "\n"


def run(campaign, out_dir=".", jobs=None):
    """Execute one campaign; write its CSV then its manifest, atomically."""
    started = time.perf_counter()
    if campaign.kind == "cnr_sweep":
        header, rows = _rows_cnr(campaign, jobs)
    elif campaign.kind == "evm_pdf":
        header, rows = _rows_evm(campaign, jobs)
    elif campaign.kind == "rate_sweep":
        header, rows = _rows_rate(campaign, jobs)
    elif campaign.kind == "sir_sweep":
        header, rows = _rows_sir(campaign)
    elif campaign.kind == "model_audit":
        header, rows = _rows_audit(campaign, jobs)
    else:
        raise ConfigurationError(f"unknown campaign kind {campaign.kind!r}")

    os.makedirs(out_dir, exist_ok=True)
    data = _csv_bytes(header, rows)
    out_path = os.path.join(out_dir, campaign.output_name)
    _write_atomic(out_path, data)
    digest = hashlib.sha256(data).hexdigest()

    manifest = RunManifest(
        campaign=campaign.name,
        kind=campaign.kind,
        master_seed=campaign.master_seed,
        version=__version__,
        wall_time_s=time.perf_counter() - started,
        outputs=((campaign.output_name, digest),),
        config_echo=campaign.config_echo,
    )
    manifest_path = os.path.splitext(out_path)[0] + ".manifest.txt"
    _write_atomic(manifest_path, _manifest_text(manifest).encode("utf-8"))
    return manifest


def audit_campaign(source, n_trials=100, seed=0, budget_db=None):
    """Build a model_audit campaign from any scenario file or preset name.

    The default budget is -30 dB for a phase-noise-only scenario and -25 dB
    once the amplifier or I/Q imbalance is enabled (documented
    modeling-error budgets of the equivalent-channel decomposition);
    budget_db overrides it.
    """
    base = parse_scenario(source)[0]
    scn = base.scenario
    pn_only = scn.pa is None and scn.iq_tx is None and scn.iq_rx is None
    if budget_db is None:
        budget_db = -30.0 if pn_only else -25.0
    return replace(
        base,
        name=f"{base.name}-audit",
        kind="model_audit",
        n_trials=n_trials,
        master_seed=seed,
        output_name=f"{base.name}_audit.csv",
        budget_db=float(budget_db),
    )


def list_presets_text(csv_format=False):
    """Human or CSV listing of every named preset and shipped scenario."""
    entries = list(presets.CATALOG)
    for name in presets.scenario_file_names():
        text = presets.scenario_file_text(name)
        entries.append((name.removesuffix(".scn"), "scenario", presets.scenario_description(text)))
    if csv_format:
        return _csv_bytes(("name", "category", "description"), entries).decode("utf-8")
    width = max(len(e[0]) for e in entries)
    cat_width = max(len(e[1]) for e in entries)
    lines = [f"{name:<{width}}  {cat:<{cat_width}}  {desc}" for name, cat, desc in entries]
    return "\n".join(lines) + "\n"
