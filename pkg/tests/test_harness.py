import json
import os
from dataclasses import replace

import numpy as np
import pytest

from whithamlab.harness import cli
from whithamlab.harness.config import (
    SUITES,
    ConfigError,
    ExperimentKind,
    config_from_dict,
    default_config,
    dump_config,
    load_config,
    packaged_config_path,
)
from whithamlab.harness.experiments import run_experiment
from whithamlab.harness.report import (
    CSV_HEADER,
    FitRefused,
    Row,
    ScalingReport,
    fit_rows,
    from_json,
    linear_growth,
    loglog_fit,
    rows_from_csv,
    to_csv,
    to_json,
)
from whithamlab.harness.suites import run_suite
from whithamlab.spectral import fmu_symbol

HERE = os.path.dirname(__file__)
GOLDEN = os.path.join(HERE, "golden")


@pytest.fixture(scope="module")
def small_cfg():
    return load_config(os.path.join(GOLDEN, "consistency_small.yaml"))


@pytest.fixture(scope="module")
def small_report(small_cfg):
    return run_experiment(small_cfg)


# ---- config


@pytest.mark.parametrize("kind", list(ExperimentKind))
def test_packaged_configs_roundtrip(kind):
    cfg = load_config(packaged_config_path(kind))
    assert cfg == default_config(kind)
    again = config_from_dict(__import__("yaml").safe_load(dump_config(cfg)))
    assert again == cfg


def test_unknown_keys_rejected():
    d = default_config(ExperimentKind.CONSISTENCY_DIAG).to_dict()
    d["gird"] = d.pop("grid")
    with pytest.raises(ConfigError, match="gird"):
        config_from_dict(d)
    d = default_config(ExperimentKind.CONSISTENCY_DIAG).to_dict()
    d["stepper"]["dtt"] = 0.1
    with pytest.raises(ConfigError):
        config_from_dict(d)


def test_cavitation_margin_rejected():
    d = default_config(ExperimentKind.CONSISTENCY_DIAG).to_dict()
    d["initial_data"]["amplitude"] = -8.0
    with pytest.raises(ConfigError, match="cavitation"):
        config_from_dict(d)


@pytest.mark.parametrize(
    "section, key, value",
    [("stepper", "dt", -1.0), ("initial_data", "profile", "square"), ("output", "format", "xml"),
     ("stepper", "time_scale", "weekly"), ("reference", "model", "KdV")],
)
def test_bad_values_rejected(section, key, value):
    d = default_config(ExperimentKind.CONSISTENCY_DIAG).to_dict()
    d[section][key] = value
    with pytest.raises(ConfigError):
        config_from_dict(d)


# ---- fitting


def test_fit_recovers_exponents():
    mu = np.repeat([0.025, 0.05, 0.1], 3)
    eps = np.tile([0.025, 0.05, 0.1], 3)
    y = 3.0 * mu**1.5 * eps**0.5
    out = loglog_fit({"mu": mu, "eps": eps}, y)
    assert out["mu"][0] == pytest.approx(1.5) and out["eps"][0] == pytest.approx(0.5)


def test_fit_refusals():
    with pytest.raises(FitRefused):
        loglog_fit({"eps": [0.1, 0.05]}, [1.0, 0.5])
    with pytest.raises(FitRefused):
        loglog_fit({"eps": [0.1, 0.09, 0.08]}, [1.0, 0.9, 0.8])
    with pytest.raises(FitRefused):
        loglog_fit({"eps": [0.1, 0.05, 0.025]}, [1.0, 0.0, 0.2])


def test_fit_rows_total_order():
    rows = [Row("x", "i", e, e, None, "m", 2 * e**2) for e in (0.2, 0.1, 0.05)]
    fit = fit_rows(rows, ["total"])
    assert fit.slope_eps == pytest.approx(2.0) and fit.n_points == 3


def test_linear_growth():
    t = np.linspace(0, 5, 11)
    a, b = linear_growth(t, 0.5 + 2 * t)[:2]
    assert (a, b) == pytest.approx((0.5, 2.0))


# ---- persistence


def test_csv_layout(small_report):
    text = to_csv(small_report)
    assert text.splitlines()[0] == ",".join(CSV_HEADER)
    assert rows_from_csv(text) == small_report.rows


def test_json_roundtrip(small_report):
    back = from_json(to_json(small_report))
    assert back.rows == small_report.rows
    assert back.verdicts == small_report.verdicts
    assert to_json(back) == to_json(small_report)
    head = json.loads(to_json(small_report))
    assert head["experiment"] == "consistency_diag"


def test_matches_golden_files(small_report):
    with open(os.path.join(GOLDEN, "consistency_small.csv")) as fh:
        golden = rows_from_csv(fh.read())
    assert len(golden) == len(small_report.rows)
    for g, r in zip(golden, small_report.rows):
        assert (g.metric, g.mu, g.eps, g.t) == (r.metric, r.mu, r.eps, r.t)
        assert r.value == pytest.approx(g.value, rel=1e-9, abs=1e-300)
    with open(os.path.join(GOLDEN, "consistency_small.json")) as fh:
        gj = from_json(fh.read())
    assert gj.verdicts == small_report.verdicts
    for key, fit in gj.fitted_slopes.items():
        assert small_report.fitted_slopes[key].slope_mu == pytest.approx(fit.slope_mu, rel=1e-9)


def test_deterministic_and_worker_independent(small_cfg, small_report):
    again = run_experiment(small_cfg, workers=3)
    assert to_csv(again) == to_csv(small_report)
    assert to_json(again) == to_json(small_report)


def test_failed_rows_recorded(small_cfg):
    bad = small_cfg.with_(stepper=replace(small_cfg.stepper, dt=1.0))
    rep = run_experiment(bad)
    assert all(r.metric == "failed:CflViolated" for r in rep.rows)
    assert not rep.passed and any(k.startswith("row ") for k in rep.witnesses)


# ---- suites


def test_fault_injection_is_caught():
    cfg = default_config(ExperimentKind.DISPERSION_SUITE)
    rep = run_suite(cfg, symbol=lambda xi, mu: -fmu_symbol(xi, mu))
    assert not rep.passed
    for name in ("fmu_bounds", "phase_speeds"):
        hits = [k for k in rep.verdicts if name in k]
        assert hits and not any(rep.verdicts[k] for k in hits)
        assert all(rep.witnesses[k] for k in hits)


@pytest.mark.parametrize("kind", SUITES)
def test_suite_verdicts_stable_across_seeds(kind):
    cfg = default_config(kind)
    verdicts = [run_suite(cfg.with_(seeds=s)).verdicts for s in (0, 1)]
    assert verdicts[0] == verdicts[1] and all(verdicts[0].values())


# ---- cli


def test_cli_consistency_and_report(tmp_path, capsys):
    cfg = os.path.join(GOLDEN, "consistency_small.yaml")
    out = tmp_path / "r.json"
    assert cli.main(["consistency", "--config", cfg, "--format", "json", "--out", str(out)]) == 0
    assert cli.main(["report", str(out), "--format", "csv"]) == 0
    text = capsys.readouterr().out
    with open(os.path.join(GOLDEN, "consistency_small.csv")) as fh:
        assert text.splitlines()[0] == fh.readline().strip()
    assert cli.main(["report", str(out)]) == 0
    assert "consistency_diag.slope_mu" in capsys.readouterr().out


def test_cli_rejects_wrong_experiment(capsys):
    cfg = packaged_config_path(ExperimentKind.THEOREM_PIPELINE)
    assert cli.main(["consistency", "--config", cfg]) == 2
    assert "cannot run" in capsys.readouterr().err


def test_cli_suite_and_simulate(tmp_path):
    cfg = packaged_config_path(ExperimentKind.TRANSFORM_SUITE)
    assert cli.main(["suites", "--config", cfg, "--out", str(tmp_path / "s.csv")]) == 0
    sim = default_config(ExperimentKind.CONSISTENCY_DIAG).to_dict()
    sim["stepper"]["t_end"] = 1.0
    sim["params_grid"] = [[0.1, 0.1]]
    sim["model"] = "WhithamRight"
    path = tmp_path / "sim.yaml"
    path.write_text(dump_config(config_from_dict(sim)))
    assert cli.main(["simulate", "--config", str(path), "--out", str(tmp_path / "sim.csv")]) == 0
    rows = rows_from_csv((tmp_path / "sim.csv").read_text())
    assert {r.metric for r in rows} >= {"mean", "l2", "max_abs"}


def test_cli_missing_file(capsys):
    assert cli.main(["report", "/nonexistent/file.csv"]) == 2
