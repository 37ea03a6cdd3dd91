import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bmpot.blocking import block_maxima
from bmpot.distributions import sample
from bmpot.errors import ExtrapolationError, InvalidArgumentError
from bmpot.extremal_index import simulate_block_maxima, simulate_timeseries, theta_intervals
from bmpot.fitters import fit_gev_ml
from bmpot.tail_targets import (
    FitFailedError,
    bm_quantile,
    gev_return_level,
    pot_quantile,
    pot_return_level,
    pot_tail_prob,
    quantile_bm,
    quantile_pot,
    return_level_bm,
    return_level_pot,
    tail_prob_pot,
    true_quantile,
    true_return_level,
)


def test_frozen_examples():
    assert pot_quantile(10.0, 2.0, 0.5, 0.001, 1, 100) == pytest.approx(10 + 2 * (0.1**-0.5 - 1) / 0.5, rel=1e-14)
    assert pot_quantile(10.0, 2.0, 0.5, 0.001, 1, 100) == pytest.approx(18.649, abs=1e-3)
    assert pot_quantile(10.0, 2.0, 0.5, 0.01, 1, 100) == 10.0
    assert bm_quantile(0.0, 1.0, 1.0, 100, 1e-4) == pytest.approx(99.0, rel=1e-12)
    assert gev_return_level(4.0, 1.0, 1.0, 100) == pytest.approx(4 + 1 / -math.log(0.99) - 1, rel=1e-14)
    assert gev_return_level(4.0, 1.0, 1.0, 100) == pytest.approx(102.499, abs=1e-3)
    assert gev_return_level(0.0, 1.0, 0.0, math.e / (math.e - 1)) == pytest.approx(0.0, abs=1e-14)


def test_pot_return_level_gumbel_reduction():
    t, k, n, r, T = 3.0, 50, 10_000, 400, 25.0
    b_r = pot_quantile(t, 1.0, 0.0, 1.0 / r, k, n)
    expected = b_r - math.log(-math.log(1 - 1 / T))
    assert pot_return_level(t, 1.0, 0.0, k, n, r, T, 1.0) == pytest.approx(expected, rel=1e-14)


def test_tail_prob_inverts_quantile():
    for g in (-0.3, 0.0, 0.4):
        q = pot_quantile(2.0, 1.5, g, 1e-4, 100, 10_000)
        assert pot_tail_prob(2.0, 1.5, g, q, 100, 10_000) == pytest.approx(1e-4, rel=1e-10)


def test_guards():
    x = sample("frechet(1)", 1000, 1)
    with pytest.raises(ExtrapolationError):
        quantile_pot(x, 100, 0.1)
    with pytest.raises(ExtrapolationError):
        quantile_pot(x, 100, 0.5)
    with pytest.raises(InvalidArgumentError):
        quantile_bm(x, 100, 0.01)
    with pytest.raises(InvalidArgumentError):
        return_level_bm(x, 10, 1.0)
    with pytest.raises(ExtrapolationError):
        return_level_pot(x, 10, 50, 10.0, 1.0)
    with pytest.raises(InvalidArgumentError):
        quantile_bm(x, 10, 0.01, theta=0.0)
    with pytest.raises(ExtrapolationError):
        tail_prob_pot(x, 100, -5.0)


def test_fit_failure_propagates():
    x = sample("gev(-1.5)", 500, 0)
    assert not fit_gev_ml(x.values).converged
    with pytest.raises(FitFailedError) as info:
        return_level_bm(x, 1, 10.0)
    assert info.value.code == "fit-failed"


def _pot_gp_errors(reps=200):
    truth = 1e4 - 1
    return np.array([quantile_pot(sample("gp(1,1)", 100_000, 500 + i), 1000, 1e-4).value / truth - 1 for i in range(reps)])


def _bm_frechet_errors(reps=200):
    truth = true_quantile("frechet(1)", 1e-4)
    return np.array([quantile_bm(sample("frechet(1)", 100_000, 700 + i), 100, 1e-4).value / truth - 1 for i in range(reps)])


def test_true_frechet_quantile():
    assert true_quantile("frechet(1)", 1e-4) == pytest.approx(1 / -math.log1p(-1e-4), rel=1e-12)


# Coverage of 90% within 25% exceeds what the ML sampling spread allows at these
# sizes; the delta-method sd below predicts roughly 80%.
@pytest.mark.xfail(strict=True, reason="sampling sd of the ML quantile caps 25% coverage near 0.8")
def test_pot_quantile_gp_coverage_90():
    assert np.mean(np.abs(_pot_gp_errors()) < 0.25) >= 0.9


@pytest.mark.xfail(strict=True, reason="sampling sd of the ML quantile caps 25% coverage near 0.87")
def test_bm_quantile_frechet_coverage_90():
    assert np.mean(np.abs(_bm_frechet_errors()) < 0.25) >= 0.9


def test_pot_quantile_gp_matches_delta_method():
    # GP(1, sigma=100) excesses above t=99; inverse Fisher information per excess
    g, s, k, x = 1.0, 100.0, 1000, 100.0
    h = (x**g - 1) / g
    grad = np.array([s * (x**g * math.log(x) - h) / g, h])
    cov = np.array([[(1 + g) ** 2, -s * (1 + g)], [-s * (1 + g), 2 * s**2 * (1 + g)]]) / k
    sd_rel = math.sqrt(grad @ cov @ grad) / (1e4 - 1)
    e = _pot_gp_errors()
    assert abs(np.median(e)) < 0.05
    assert np.std(e, ddof=1) == pytest.approx(sd_rel, rel=0.2)
    assert np.mean(np.abs(e) < 0.25) >= 0.75


def test_bm_quantile_frechet_median_unbiased():
    e = _bm_frechet_errors()
    assert abs(np.median(e)) < 0.05
    assert np.mean(np.abs(e) < 0.25) >= 0.8


def test_return_level_pot_bm_agree_on_iid_gp():
    rb, rp = [], []
    for i in range(200):
        x = sample("gp(1,1)", 100_000, 900 + i)
        rb.append(return_level_bm(x, 200, 50.0).value)
        rp.append(return_level_pot(x, 500, 200, 50.0, 1.0).value)

    def ci(v):
        m, se = np.mean(v), np.std(v, ddof=1) / math.sqrt(len(v))
        return m - 1.96 * se, m + 1.96 * se

    (lb, ub), (lp, up) = ci(rb), ci(rp)
    assert lb <= up and lp <= ub


def test_theta_one_equals_direct_plug_in():
    x = simulate_timeseries("armax(0.5)", 20_000, 3)
    fit = fit_gev_ml(block_maxima(x, 100))
    est = quantile_bm(x, 100, 1e-3)
    assert est.value == bm_quantile(fit.loc_hat, fit.scale_hat, fit.gamma_hat, 100, 1e-3)
    assert est.pipeline == "bm"
    th = theta_intervals(x, 200)
    assert quantile_bm(x, 100, 1e-3, th).pipeline == "bm_theta_corrected"


def test_true_return_level_closed_forms_match_simulation():
    for model in ("armax(0.5)", "mm(0.5,0.3,0.2)", "frechet(1)"):
        exact = true_return_level(model, 20, 10.0)
        brute = np.quantile(simulate_block_maxima(model, 20, 200_000, 4), 0.9)
        assert brute == pytest.approx(exact, rel=0.03)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(-0.9, 2.0),
    st.floats(1e-6, 0.009),
    st.floats(1e-6, 0.009),
)
def test_quantile_monotone_in_p(g, p1, p2):
    lo, hi = min(p1, p2), max(p1, p2)
    assert pot_quantile(1.0, 2.0, g, lo, 100, 10_000) >= pot_quantile(1.0, 2.0, g, hi, 100, 10_000)
    assert bm_quantile(1.0, 2.0, g, 100, lo) >= bm_quantile(1.0, 2.0, g, 100, hi)


def test_gamma_branch_continuity():
    for g in (1e-8, -1e-8):
        assert abs(pot_quantile(1.0, 2.0, g, 1e-4, 100, 10_000) - pot_quantile(1.0, 2.0, 0.0, 1e-4, 100, 10_000)) < 1e-6 * 2
        assert abs(bm_quantile(1.0, 2.0, g, 100, 1e-4) - bm_quantile(1.0, 2.0, 0.0, 100, 1e-4)) < 1e-6 * 2
        assert abs(gev_return_level(1.0, 2.0, g, 50) - gev_return_level(1.0, 2.0, 0.0, 50)) < 1e-6 * 2
        d = pot_return_level(1.0, 2.0, g, 100, 10_000, 200, 50, 0.5) - pot_return_level(1.0, 2.0, 0.0, 100, 10_000, 200, 50, 0.5)
        assert abs(d) < 1e-6 * 2


BASE = simulate_timeseries("armax(0.5)", 20_000, 8).values


@settings(max_examples=10, deadline=None)
@given(st.floats(0.01, 100.0), st.floats(-100.0, 100.0))
def test_affine_equivariance(c, d):
    y = c * BASE + d
    th_x, th_y = theta_intervals(BASE, 200), theta_intervals(y, 200)
    assert th_x.theta_hat == th_y.theta_hat
    pairs = [
        (quantile_pot(BASE, 500, 1e-4), quantile_pot(y, 500, 1e-4)),
        (quantile_bm(BASE, 100, 1e-4, th_x), quantile_bm(y, 100, 1e-4, th_y)),
        (return_level_bm(BASE, 100, 50.0), return_level_bm(y, 100, 50.0)),
        (return_level_pot(BASE, 500, 100, 50.0, th_x), return_level_pot(y, 500, 100, 50.0, th_y)),
        (tail_prob_pot(BASE, 500, BASE.max()), tail_prob_pot(y, 500, c * BASE.max() + d)),
    ]
    for ex, ey in pairs[:4]:
        assert ey.value == pytest.approx(c * ex.value + d, rel=1e-6, abs=1e-6 * c)
    assert pairs[4][1].value == pytest.approx(pairs[4][0].value, rel=1e-6)


def test_csv_row():
    x = simulate_timeseries("armax(0.5)", 20_000, 9)
    row = return_level_pot(x, 500, 100, 50.0, theta_intervals(x, 200)).to_row()
    assert list(row) == ["kind", "params", "pipeline", "value", "gamma_hat", "theta_hat"]
    assert row["pipeline"] == "pot_theta_corrected" and row["theta_hat"] != ""
    assert quantile_pot(x, 500, 1e-4).to_row()["theta_hat"] == ""
