import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bmpot.errors import InvalidArgumentError, InvalidParameterError
from bmpot.multivariate import (
    DependenceModel,
    MultivariateSample,
    empirical_stdf,
    empirical_stdf_grid,
    max_ranks,
    read_sample_csv,
    sample_dependence,
    stdf_grid_report,
    true_stdf,
    write_sample_csv,
)


def brute_stdf(data, k, x):
    n, d = data.shape
    count = 0
    for i in range(n):
        hit = False
        for j in range(d):
            rank = sum(1 for l in range(n) if data[l, j] <= data[i, j])
            if rank / n > 1 - (k / n) * x[j]:
                hit = True
        count += hit
    return count / k


def test_examples():
    anti = MultivariateSample(np.array([[1, 10], [2, 9], [3, 8], [4, 7]], dtype=float))
    co = MultivariateSample(np.array([[1, 1], [2, 2], [3, 3], [4, 4]], dtype=float))
    assert empirical_stdf(anti, 2, [1, 1]) == 2.0
    assert empirical_stdf(co, 2, [1, 1]) == 1.0
    assert empirical_stdf(anti, 2, [0, 0]) == 0.0


def test_max_ranks_ties():
    assert max_ranks(np.array([3.0, 1.0, 3.0, 2.0])).tolist() == [4, 1, 4, 2]


def test_true_stdf_examples():
    assert true_stdf(DependenceModel("independence"), [1, 1]) == 2.0
    assert true_stdf(DependenceModel("comonotone"), [0.3, 0.7]) == 0.7
    x = [0.2, 0.9]
    assert true_stdf(DependenceModel("logistic", 2, 1.0), x) == pytest.approx(1.1, rel=1e-15)
    assert true_stdf(DependenceModel.parse("logistic(0.5)"), [1, 1]) == pytest.approx(2**0.5, rel=1e-15)


def test_errors():
    s = sample_dependence(DependenceModel("independence"), 20, 1)
    with pytest.raises(InvalidArgumentError):
        empirical_stdf(s, 0, [1, 1])
    with pytest.raises(InvalidArgumentError):
        empirical_stdf(s, 20, [1, 1])
    with pytest.raises(InvalidArgumentError):
        empirical_stdf(s, 5, [1.5, 0])
    with pytest.raises(InvalidArgumentError):
        empirical_stdf(s, 5, [-0.1, 0])
    with pytest.raises(InvalidArgumentError):
        empirical_stdf(s, 5, [1, 1, 1])
    with pytest.raises(InvalidArgumentError):
        MultivariateSample(np.ones((5, 1)))
    with pytest.raises(InvalidArgumentError):
        MultivariateSample(np.array([[1.0, np.nan], [2.0, 3.0]]))
    with pytest.raises(InvalidParameterError):
        DependenceModel.parse("gumbel")
    with pytest.raises(InvalidParameterError):
        DependenceModel("logistic", 2, 1.5)


def test_sampler_determinism_and_margins():
    for text in ("independence", "comonotone", "logistic(0.5)"):
        m = DependenceModel.parse(text, 3)
        a, b = sample_dependence(m, 2000, 5), sample_dependence(m, 2000, 5)
        assert np.array_equal(a.data, b.data)
        assert a.data.shape == (2000, 3)
        assert np.all((a.data > 0) & (a.data < 1))
    co = sample_dependence(DependenceModel("comonotone", 3), 100, 2).data
    assert np.array_equal(co[:, 0], co[:, 1]) and np.array_equal(co[:, 0], co[:, 2])


def test_logistic_margins_uniform():
    from scipy import stats

    data = sample_dependence(DependenceModel("logistic", 2, 0.5), 50_000, 3).data
    for j in range(2):
        assert stats.kstest(data[:, j], "uniform").statistic < 0.01


def test_logistic_estimate_between_extremes():
    s = sample_dependence(DependenceModel("logistic", 2, 0.5), 5000, 4)
    v = empirical_stdf(s, 200, [1, 1])
    assert 1 < v < 2
    assert abs(v - 2**0.5) < 0.15


def test_csv_round_trip(tmp_path):
    s = sample_dependence(DependenceModel("logistic", 2, 0.7), 50, 6)
    write_sample_csv(s, tmp_path / "s.csv")
    assert np.array_equal(read_sample_csv(tmp_path / "s.csv").data, s.data)


def test_grid_report():
    s = sample_dependence(DependenceModel("independence"), 500, 7)
    rows = stdf_grid_report(s, 50, DependenceModel("independence"))
    assert len(rows) == 121
    assert list(rows[0]) == ["x_1", "x_2", "L_hat", "L_true"]
    assert float(rows[0]["L_hat"]) == 0.0
    assert stdf_grid_report(s, 50)[5]["L_true"] == ""
    last = rows[-1]
    assert float(last["L_true"]) == 2.0
    assert float(last["L_hat"]) == empirical_stdf(s, 50, [1, 1])


data_strategy = st.integers(2, 3).flatmap(
    lambda d: st.integers(d, 40).flatmap(
        lambda n: arrays(float, (n, d), elements=st.integers(0, 6).map(float))
    )
)


@settings(max_examples=100, deadline=None)
@given(data_strategy, st.data())
def test_brute_force_equivalence(data, draw):
    n, d = data.shape
    k = draw.draw(st.integers(1, n - 1))
    x = np.array(draw.draw(st.lists(st.floats(0, 1), min_size=d, max_size=d)))
    assert empirical_stdf(MultivariateSample(data), k, x) == brute_stdf(data, k, x)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 40), st.data())
def test_monotone_and_bounds(seed, k, draw):
    s = sample_dependence(DependenceModel.parse(draw.draw(st.sampled_from(["independence", "comonotone", "logistic(0.4)"]))), 400, seed)
    # grid points with k x_j integral
    i1 = np.array(draw.draw(st.lists(st.integers(0, k), min_size=2, max_size=2)))
    i2 = np.maximum(i1, np.array(draw.draw(st.lists(st.integers(0, k), min_size=2, max_size=2))))
    x1, x2 = i1 / k, i2 / k
    l1, l2 = empirical_stdf_grid(s, k, [x1, x2])
    assert l1 <= l2
    assert x1.max() - 1 / k <= l1 <= x1.sum() + 2 / k
    assert x2.max() - 1 / k <= l2 <= x2.sum() + 2 / k
    for e in ([1.0, 0.0], [0.0, 1.0]):
        assert 1 - 1 / k <= empirical_stdf(s, k, e) <= 1 + 1 / k
