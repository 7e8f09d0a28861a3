"""Scenario parsing contracts, campaign determinism, and output plumbing."""

import os
from dataclasses import replace

import numpy as np
import pytest

from mmwlink import experiments, presets
from mmwlink.errors import ConfigurationError, ScenarioFormatError

MINIMAL = """mmwlink-scenario v1

[numerology]
preset = 28ghz_60khz
n_symbols = 1
pilot_symbols = 0

[noise]
snr_db = 10

[campaign tiny]
kind = cnr_sweep
snr_grid_db = 0 20
n_trials = 8
seed = 2
output = tiny.csv
"""


def _read(path):
    with open(path, "rb") as fh:
        return fh.read()


# ---------------------------------------------------------------------------
# parsing


def test_minimal_scenario_parses():
    (camp,) = experiments.parse_scenario_text(MINIMAL)
    assert camp.kind == "cnr_sweep"
    assert camp.snr_grid_db == (0.0, 20.0)
    assert camp.n_trials == 8
    assert camp.scenario.n_fft == 2048
    assert camp.scenario.pn_tx is None


def test_header_is_required():
    with pytest.raises(ScenarioFormatError, match="first line"):
        experiments.parse_scenario_text("not a scenario\n")


def test_unknown_key_is_named():
    text = MINIMAL.replace("[noise]\nsnr_db = 10", "[noise]\nsnr_dbb = 10")
    with pytest.raises(ScenarioFormatError, match="snr_dbb.*noise"):
        experiments.parse_scenario_text(text)


def test_unknown_section_is_named():
    with pytest.raises(ScenarioFormatError, match="amplifier"):
        experiments.parse_scenario_text(MINIMAL + "\n[amplifier]\npreset = default\n")


def test_no_campaigns_is_an_error():
    text = "mmwlink-scenario v1\n[numerology]\npreset = 28ghz_60khz\n"
    with pytest.raises(ScenarioFormatError, match="no campaigns"):
        experiments.parse_scenario_text(text)


def test_scenario_invariants_surface_at_parse_time():
    text = MINIMAL.replace("preset = 28ghz_60khz", "carrier_ghz = 28\nspacing_khz = 60\ncp_len = 2048")
    with pytest.raises(ConfigurationError, match="cp_len"):
        experiments.parse_scenario_text(text)


def test_grid_syntax_colon_and_list():
    text = MINIMAL.replace("snr_grid_db = 0 20", "snr_grid_db = 0:5:35")
    (camp,) = experiments.parse_scenario_text(text)
    assert camp.snr_grid_db == tuple(float(v) for v in range(0, 36, 5))
    with pytest.raises(ScenarioFormatError, match="snr_grid_db"):
        experiments.parse_scenario_text(MINIMAL.replace("0 20", "0:5"))


def test_array_gain_shifts_snr_axis():
    text = MINIMAL.replace("snr_db = 10", "snr_db = 10\narray_gain_db = 30")
    (camp,) = experiments.parse_scenario_text(text)
    assert camp.scenario.noise.snr_db == 40.0
    assert camp.snr_grid_db == (30.0, 50.0)


def test_pairing_and_explicit_tx_rx_are_exclusive():
    text = MINIMAL.replace(
        "[noise]", "[phase_noise]\npairing = case2\ntx = low\n\n[noise]"
    )
    with pytest.raises(ScenarioFormatError, match="pairing"):
        experiments.parse_scenario_text(text)


def test_pairing_resolves_to_scaled_profiles():
    text = MINIMAL.replace("[noise]", "[phase_noise]\npairing = case2\n\n[noise]")
    (camp,) = experiments.parse_scenario_text(text)
    low = camp.scenario.pn_tx
    high = camp.scenario.pn_rx
    assert low is not None and high is not None
    assert low.ref_carrier_hz == 28e9  # scaled to the numerology carrier
    assert high.segments[0].level_db > low.segments[0].level_db


def test_pa_preset_and_coeffs_are_exclusive():
    text = MINIMAL.replace(
        "[noise]", "[pa]\npreset = default\ncoeffs = 1 0 0 0 0\n\n[noise]"
    )
    with pytest.raises(ScenarioFormatError, match="pa"):
        experiments.parse_scenario_text(text)


def test_explicit_pa_coeffs_parse_as_complex():
    text = MINIMAL.replace(
        "[noise]", "[pa]\ncoeffs = 1 -0.1+0.05j 0 0 0\nbackoff_db = 3\n\n[noise]"
    )
    (camp,) = experiments.parse_scenario_text(text)
    assert camp.scenario.pa.coeffs[1] == -0.1 + 0.05j
    assert camp.scenario.pa.input_backoff_db == 3.0


def test_cnr_campaign_requires_pilots():
    text = MINIMAL.replace("pilot_symbols = 0", "pilot_symbols = none")
    with pytest.raises(ScenarioFormatError, match="pilot"):
        experiments.parse_scenario_text(text)


def test_evm_symbols_validated():
    text = MINIMAL.replace(
        "kind = cnr_sweep\nsnr_grid_db = 0 20", "kind = evm_pdf\nsymbols = 0 3"
    )
    with pytest.raises(ScenarioFormatError, match="symbols"):
        experiments.parse_scenario_text(text)


def test_every_shipped_scenario_parses():
    for name in presets.scenario_file_names():
        campaigns = experiments.parse_scenario(name.removesuffix(".scn"))
        assert campaigns, name
        assert campaigns[0].kind in experiments.CAMPAIGN_KINDS


def test_unknown_preset_name_is_a_configuration_error():
    with pytest.raises(ConfigurationError):
        experiments.parse_scenario("no_such_scenario")


# ---------------------------------------------------------------------------
# running


def _tiny_campaign(n_trials=8):
    (camp,) = experiments.parse_scenario_text(MINIMAL)
    return replace(camp, n_trials=n_trials)


def test_rerun_is_byte_identical(tmp_path):
    camp = _tiny_campaign()
    a = tmp_path / "a"
    b = tmp_path / "b"
    experiments.run(camp, out_dir=str(a), jobs=1)
    experiments.run(camp, out_dir=str(b), jobs=1)
    assert _read(a / "tiny.csv") == _read(b / "tiny.csv")


def test_output_is_independent_of_parallelism(tmp_path):
    camp = _tiny_campaign(n_trials=120)  # several chunks
    a = tmp_path / "a"
    b = tmp_path / "b"
    experiments.run(camp, out_dir=str(a), jobs=1)
    experiments.run(camp, out_dir=str(b), jobs=3)
    assert _read(a / "tiny.csv") == _read(b / "tiny.csv")


def test_seed_changes_the_output(tmp_path):
    camp = _tiny_campaign()
    experiments.run(camp, out_dir=str(tmp_path / "a"), jobs=1)
    experiments.run(replace(camp, master_seed=99), out_dir=str(tmp_path / "b"), jobs=1)
    assert _read(tmp_path / "a" / "tiny.csv") != _read(tmp_path / "b" / "tiny.csv")


def test_manifest_records_the_written_output(tmp_path):
    camp = _tiny_campaign()
    manifest = experiments.run(camp, out_dir=str(tmp_path), jobs=1)
    assert manifest.outputs[0][0] == "tiny.csv"
    text = (tmp_path / "tiny.manifest.txt").read_text()
    assert f"sha256={manifest.outputs[0][1]}" in text
    assert "mmwlink-scenario v1" in text  # config echo
    import hashlib

    assert hashlib.sha256(_read(tmp_path / "tiny.csv")).hexdigest() == manifest.outputs[0][1]


def test_cnr_rows_track_snr(tmp_path):
    camp = _tiny_campaign(n_trials=40)
    experiments.run(camp, out_dir=str(tmp_path), jobs=None)
    rows = (tmp_path / "tiny.csv").read_text().splitlines()
    assert rows[0] == "snr_db,cnr_mean_db,n_trials"
    for line in rows[1:]:
        snr, cnr_db, n = line.split(",")
        assert abs(float(cnr_db) - float(snr)) < 0.3
        assert int(n) == 40


def test_audit_campaign_budget_rule():
    pn_only = experiments.audit_campaign("model_audit_pn_only", n_trials=4)
    assert pn_only.budget_db == -30.0
    full = experiments.audit_campaign("model_audit_full", n_trials=4)
    assert full.budget_db == -25.0
    assert pn_only.kind == "model_audit" and full.kind == "model_audit"


def test_audit_rows_report_pass_state(tmp_path):
    camp = experiments.audit_campaign("model_audit_pn_only", n_trials=4)
    experiments.run(camp, out_dir=str(tmp_path), jobs=1)
    header, row = (tmp_path / camp.output_name).read_text().splitlines()
    assert header == "residual_db,budget_db,passed,n_trials"
    residual_db, budget_db, passed, n = row.split(",")
    assert float(residual_db) < float(budget_db)
    assert passed == "1" and n == "4"


def test_listing_contains_the_named_presets():
    text = experiments.list_presets_text()
    for needle in ("28ghz_60khz", "82ghz_480khz", "case1", "case2", "noise_only_cnr"):
        assert needle in text
    csv_text = experiments.list_presets_text(csv_format=True)
    assert csv_text.splitlines()[0] == "name,category,description"


def test_csv_floats_round_trip_exactly(tmp_path):
    camp = _tiny_campaign()
    experiments.run(camp, out_dir=str(tmp_path), jobs=1)
    line = (tmp_path / "tiny.csv").read_text().splitlines()[1]
    value = float(line.split(",")[1])
    rerun = experiments.run(camp, out_dir=str(tmp_path), jobs=1)
    line2 = (tmp_path / "tiny.csv").read_text().splitlines()[1]
    assert float(line2.split(",")[1]) == value
    assert rerun.kind == "cnr_sweep"
