import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from bmpot.blocking import block_maxima, disjoint_block_maxima, sliding_block_maxima, threshold_excesses
from bmpot.distributions import sample
from bmpot.errors import EmptySampleError, InvalidArgumentError

X = [3, 1, 4, 1, 5, 9, 2, 6]


def brute_sliding(x, r):
    return np.array([max(x[j : j + r]) for j in range(len(x) - r + 1)], dtype=float)


def test_disjoint_examples():
    assert disjoint_block_maxima(X, 4).maxima.tolist() == [4, 9]
    assert disjoint_block_maxima([3, 1, 4, 1, 5], 2).maxima.tolist() == [3, 4]
    assert disjoint_block_maxima(X, 1).maxima.tolist() == X
    s = disjoint_block_maxima([3, 1, 4, 1, 5], 2)
    assert (s.block_size, s.scheme, s.source_length) == (2, "disjoint", 5)


def test_sliding_examples():
    assert sliding_block_maxima(X, 4).maxima.tolist() == [4, 5, 9, 9, 9]
    assert sliding_block_maxima(X, 1).maxima.tolist() == X
    assert sliding_block_maxima(X, len(X)).maxima.tolist() == [9]


def test_block_errors():
    with pytest.raises(EmptySampleError):
        disjoint_block_maxima(X, 9)
    with pytest.raises(EmptySampleError):
        sliding_block_maxima(X, 9)
    with pytest.raises(InvalidArgumentError):
        disjoint_block_maxima(X, 0)
    with pytest.raises(InvalidArgumentError):
        block_maxima(X, 2, "overlapping")


def test_threshold_excess_examples():
    e = threshold_excesses([3, 1, 4, 1, 5], 2)
    assert e.threshold == 3 and e.excesses.tolist() == [1, 2]
    assert e.exceedance_times.tolist() == [2, 4]
    e = threshold_excesses([1, 1, 1, 1], 2)
    assert e.threshold == 1 and e.excesses.tolist() == [0, 0]
    # later indices win ties
    assert e.exceedance_times.tolist() == [2, 3]
    for k in (0, 4):
        with pytest.raises(InvalidArgumentError):
            threshold_excesses([1, 1, 1, 1], k)


def test_gp_mean_excess_oracle():
    # excesses of GP(1/2, 1) over a level u are GP(1/2, 1 + u/2), mean 2 (1 + u/2)
    x = sample("gp(0.5,1)", 100_000, 4).values
    e = threshold_excesses(x, 1000)
    oracle = (1.0 + 0.5 * e.threshold) / (1.0 - 0.5)
    assert abs(e.excesses.mean() / oracle - 1) < 0.1


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(1, 300), elements=st.floats(-1e6, 1e6)), st.data())
def test_sliding_matches_brute_force(x, data):
    r = data.draw(st.integers(1, len(x)))
    assert np.array_equal(sliding_block_maxima(x, r).maxima, brute_sliding(x, r))


def test_sliding_matches_brute_force_large():
    x = np.random.default_rng(0).standard_normal(10_000)
    for r in (1, 7, 100, 1000):
        assert np.array_equal(sliding_block_maxima(x, r).maxima, brute_sliding(x, r))


@settings(max_examples=100, deadline=None)
@given(arrays(np.float64, st.integers(2, 200), elements=st.floats(-1e3, 1e3)), st.data())
def test_block_invariants(x, data):
    r = data.draw(st.integers(1, len(x)))
    dis = disjoint_block_maxima(x, r).maxima
    sli = sliding_block_maxima(x, r).maxima
    assert len(dis) == len(x) // r and len(sli) == len(x) - r + 1
    # the sliding window starting at block j's first index is that block
    assert np.array_equal(sli[::r][: len(dis)], dis)
    if r == 1:
        assert np.array_equal(dis, sli)


@settings(max_examples=100, deadline=None)
@given(
    arrays(np.float64, st.integers(3, 200), elements=st.floats(-1e3, 1e3)),
    st.floats(0.01, 100),
    st.floats(-100, 100),
    st.data(),
)
def test_threshold_excesses_equivariance(x, c, d, data):
    k = data.draw(st.integers(1, len(x) - 1))
    e = threshold_excesses(x, k)
    f = threshold_excesses(c * x + d, k)
    assert len(e.excesses) == k and np.all(e.excesses >= 0)
    assert f.threshold == pytest.approx(c * e.threshold + d, rel=1e-9, abs=1e-9)
    np.testing.assert_allclose(f.excesses, c * e.excesses, rtol=1e-9, atol=1e-7)
    assert e.threshold == np.sort(x)[len(x) - k - 1]
