import json
import math

import numpy as np
import pytest

from bmpot.blocking import block_maxima, threshold_excesses
from bmpot.errors import ConfigError, InvalidArgumentError
from bmpot.extremal_index import simulate_timeseries
from bmpot.fitters import fit_gev_ml, fit_gp_ml, hill
from bmpot.harness import (
    REPORT_FIELDS,
    ExperimentConfig,
    HorseRaceReport,
    Record,
    ksweep,
    rate_fit,
    run_horserace,
)
from bmpot.rng import replication_seed

SMALL = {
    "model": "armax(0.5)",
    "n_grid": [2000, 4000],
    "k_grid": [50, 100],
    "methods": ["hill", "gp_ml", "gev_ml", "gev_pwm", "gp_pwm"],
    "replications": 12,
    "base_seed": 77,
}


def _csv(report, path):
    report.write_csv(path)
    return path.read_bytes()


def test_determinism_repeated_reordered_parallel(tmp_path):
    a = _csv(run_horserace(SMALL), tmp_path / "a.csv")
    b = _csv(run_horserace(SMALL), tmp_path / "b.csv")
    c = _csv(run_horserace(SMALL, replication_order=list(range(11, -1, -1))), tmp_path / "c.csv")
    d = _csv(run_horserace({**SMALL, "workers": 3}), tmp_path / "d.csv")
    assert a == b == c == d


def test_common_random_numbers():
    rep = run_horserace(SMALL)
    for i in (0, 5, 11):
        x = simulate_timeseries("armax(0.5)", 2000, replication_seed(77, i)).values
        assert rep.estimates[("hill", 2000, 100)][i] == hill(x, 100).gamma_hat
        assert rep.estimates[("gp_ml", 2000, 100)][i] == fit_gp_ml(threshold_excesses(x, 100)).gamma_hat
        assert rep.estimates[("gev_ml", 2000, 100)][i] == fit_gev_ml(block_maxima(x, 20)).gamma_hat


def test_record_moments_and_rmse_identity():
    rep = run_horserace(SMALL)
    for rec in rep.records:
        col = rep.estimates[(rec.method, rec.n, rec.k)]
        ok = col[np.isfinite(col)]
        assert rec.failures == len(col) - len(ok)
        assert rec.mean == float(np.mean(ok))
        assert rec.variance == float(np.var(ok))
        assert rec.truth == 1.0 and rec.bias == rec.mean - 1.0
        assert rec.rmse**2 == pytest.approx(rec.bias**2 + rec.variance, rel=1e-12)
    assert rep.record("gev_ml", 4000, 50).r == 80


def test_failures_are_counted_not_imputed():
    rep = run_horserace({"model": "gev(-1.5)", "n_grid": [300], "r_grid": [1], "methods": ["gev_ml"], "replications": 8, "base_seed": 0})
    rec = rep.records[0]
    assert rec.failures > 0
    col = rep.estimates[("gev_ml", 300, 300)]
    assert np.count_nonzero(np.isnan(col)) == rec.failures
    assert rep.summary()["failures"]["gev_ml"] == rec.failures


def test_exact_model_gev_r1():
    cfg = {"model": "gev(0.25,0,1)", "n_grid": [200, 3200], "r_grid": [1], "methods": ["gev_ml"], "replications": 100, "base_seed": 5}
    rep = run_horserace(cfg)
    small, large = rep.record("gev_ml", 200, 200), rep.record("gev_ml", 3200, 3200)
    assert abs(large.bias) < 3 * math.sqrt(large.variance / 100) + 0.005
    assert abs(large.bias) < abs(small.bias)
    # variance scales like 1/k
    assert small.variance / large.variance == pytest.approx(16, rel=0.4)


def _synthetic(rmse_of_n, ns=(1000, 2000, 4000, 8000)):
    cfg = ExperimentConfig(model="frechet(1)", n_grid=tuple(ns), methods=("hill",), replications=1, base_seed=0, k_grid=(10,))
    records = []
    for n in ns:
        records.append(Record("hill", n, 10, None, 1, 0, 1.0, 1.0, 0.0, rmse_of_n(n) ** 2))
        # a worse k per n must be ignored
        records.append(Record("hill", n, 20, None, 1, 0, 1.0, 1.0, 0.0, 4 * rmse_of_n(n) ** 2))
    return HorseRaceReport(cfg, records)


def test_rate_fit_exact_power_laws():
    fit = rate_fit(_synthetic(lambda n: n ** (-1 / 3)), "hill")
    assert fit.slope == pytest.approx(-1 / 3, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert all(k == 10 for _, k, _ in fit.points)
    # halving when n quadruples
    fit = rate_fit(_synthetic(lambda n: 3.0 * 0.5 ** math.log(n / 1000, 4)), "hill")
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)


def test_rate_fit_needs_three_n():
    with pytest.raises(InvalidArgumentError):
        rate_fit(_synthetic(lambda n: 1 / n, ns=(1000, 2000)), "hill")


@pytest.mark.parametrize(
    "bad",
    [
        {"n_grid": []},
        {"replications": 0},
        {"methods": ["nosuch"]},
        {"k_grid": [5000]},
        {"k_rule": {"c": 1.0, "a": 0.5}},
        {"scheme": "weird"},
        {"model": "armax(2)"},
        {"extra": 1},
        {"methods": ["pot"]},
        {"workers": 0},
    ],
)
def test_config_validation(bad):
    with pytest.raises(ConfigError) as info:
        ExperimentConfig.from_dict({**SMALL, **bad})
    assert info.value.code == "invalid-config"


def test_k_rule_and_round_trip():
    d = {**SMALL}
    del d["k_grid"]
    d["k_rule"] = {"c": 2.0, "a": 0.5}
    cfg = ExperimentConfig.from_dict(d)
    assert cfg.pot_ks(10_000) == (200,)
    assert cfg.bm_rs(10_000) == (50,)
    assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


def test_target_pipelines_run():
    cfg = {
        "model": "armax(0.5)",
        "n_grid": [20_000],
        "k_grid": [400],
        "methods": ["pot", "bm", "bm_theta_corrected", "pot_theta_corrected"],
        "targets": [{"kind": "quantile", "p": 1e-3}, {"kind": "return_level", "T": 20, "r": 100}],
        "replications": 4,
        "base_seed": 3,
    }
    rep = run_horserace(cfg)
    labels = rep.methods()
    assert "bm_theta_corrected:quantile(p=0.001)" in labels
    assert "pot_theta_corrected:return_level(T=20.0,r=100)" in labels
    assert not any(m.startswith("pot_theta_corrected:quantile") for m in labels)
    q = rep.record("pot:quantile(p=0.001)", 20_000, 400)
    assert q.truth == pytest.approx(1 / -math.log1p(-1e-3), rel=1e-12)
    assert all(r.failures == 0 for r in rep.records)


def test_outputs(tmp_path):
    rep = run_horserace(SMALL)
    rep.write_csv(tmp_path / "r.csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0].split(",") == list(REPORT_FIELDS)
    assert len(lines) == 1 + len(rep.records)
    rep.write_json(tmp_path / "r.json")
    summary = json.loads((tmp_path / "r.json").read_text())
    assert summary["config"]["model"] == "armax(0.5)"
    assert {"rate_fits", "failures", "wall_time_s"} <= set(summary)


def test_ksweep_frechet_hill():
    pts = ksweep("frechet(1)", 10_000, "hill", [50, 100, 200, 500, 1000, 2000], 40, 11)
    assert [p.k for p in pts] == [50, 100, 200, 500, 1000, 2000]
    assert all(0.8 < p.mean < 1.2 for p in pts[:3])
    # rho_POT = -1: bias grows with k
    assert abs(pts[-1].mean - 1) > abs(pts[0].mean - 1)
    assert pts[0].sd > pts[-1].sd


def test_ksweep_gp_exact_model():
    pts = ksweep("gp(0.5,1)", 10_000, "gp_ml", [100, 500, 2000, 5000], 40, 12)
    assert all(0.45 < p.mean < 0.55 for p in pts)


def test_ksweep_bm_and_determinism():
    a = ksweep("frechet(1)", 5000, "gev_ml", [50, 100], 1, 3)
    b = ksweep("frechet(1)", 5000, "gev_ml", [100, 50], 1, 3)
    assert a == b and [p.r for p in a] == [100, 50]
    with pytest.raises(ConfigError):
        ksweep("frechet(1)", 5000, "pot", [50], 1, 3)
