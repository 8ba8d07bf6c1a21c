import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wbst.rng import stream
from wbst.statlab import (
    VectorWelford,
    Welford,
    ks_critical,
    ks_one_sample,
    ks_two_sample,
    pearson_corr,
    scaling_regression,
)


def test_welford_basic():
    acc = Welford()
    for v in [1, 2, 3]:
        acc.update(v)
    assert acc.mean == pytest.approx(2.0)
    assert acc.variance == pytest.approx(1.0)


def test_welford_merge_equals_concatenation():
    a = Welford().update(1).update(2)
    b = Welford().update(3)
    a.merge(b)
    c = Welford()
    for v in [1, 2, 3]:
        c.update(v)
    assert a.count == c.count
    assert a.mean == pytest.approx(c.mean, rel=1e-12)
    assert a.m2 == pytest.approx(c.m2, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    st.lists(st.floats(-1e3, 1e3), min_size=0, max_size=30),
    st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=30),
)
def test_welford_merge_property(xs, ys):
    a = Welford().update_many(xs)
    b = Welford().update_many(ys)
    a.merge(b)
    c = Welford().update_many(xs + ys)
    assert a.count == c.count
    assert a.mean == pytest.approx(c.mean, rel=1e-12, abs=1e-9)
    assert a.variance == pytest.approx(c.variance, rel=1e-9, abs=1e-9)


def test_welford_merge_commutes():
    xs = [0.5, -1.0, 2.25, 7.5]
    ys = [3.0, 0.125]
    a = Welford().update_many(xs).merge(Welford().update_many(ys))
    b = Welford().update_many(ys).merge(Welford().update_many(xs))
    assert a.count == b.count
    assert a.mean == pytest.approx(b.mean, rel=1e-12)
    assert a.m2 == pytest.approx(b.m2, rel=1e-12)


def test_welford_gaussian_bands():
    g = stream(5, 1)
    acc = Welford().update_many(g.standard_normal(10**6))
    assert abs(acc.mean) < 0.004
    assert abs(acc.variance - 1.0) < 0.006


def test_vector_welford_matches_numpy():
    g = stream(7, 2)
    rows = g.standard_normal((500, 3)) @ np.diag([1.0, 2.0, 0.5])
    acc = VectorWelford(3)
    acc.update_many(rows[:200])
    other = VectorWelford(3).update_many(rows[200:])
    acc.merge(other)
    np.testing.assert_allclose(acc.covariance, np.cov(rows.T), rtol=1e-10)
    np.testing.assert_allclose(acc.mean, rows.mean(axis=0), rtol=1e-10)


def test_ks_critical_matches_reference_constant():
    # c(0.001) = 1.9495 at unit scale
    assert ks_critical(1e-3, 1, 0) == pytest.approx(1.9495, abs=5e-4)


def test_ks_two_sample_identical_is_zero():
    x = np.arange(100.0)
    rep = ks_two_sample(x, x)
    assert rep.statistic == 0.0
    assert rep.passed


def test_ks_uniform_vs_arcsine_rejected():
    g = stream(11, 3)
    u = g.random(10**5)
    cdf = lambda x: 2.0 / math.pi * np.arcsin(np.sqrt(np.clip(x, 0, 1)))
    rep = ks_one_sample(u, cdf)
    assert not rep.passed


def test_ks_self_calibration():
    # one-sample KS against the generating CDF: at level 1e-3 the false
    # rejection rate over 1000 repetitions stays below 1%
    g = stream(13, 4)
    rejected = 0
    for _ in range(1000):
        u = g.random(1000)
        rep = ks_one_sample(u, lambda x: x)
        rejected += not rep.passed
    assert rejected <= 10


def test_scaling_regression_exact_square():
    ns = [10**3, 10**4, 10**5]
    fit = scaling_regression(ns, [float(n) ** 2 for n in ns])
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.stderr < 1e-12


def test_scaling_regression_guards():
    with pytest.raises(ValueError):
        scaling_regression([1, 2, 3], [1, 2, 3])
    with pytest.raises(ValueError):
        scaling_regression([10, 100], [1, 2])


def test_pearson_corr():
    g = stream(17, 5)
    x = g.standard_normal(2000)
    assert pearson_corr(x, 2 * x) == pytest.approx(1.0)
    assert abs(pearson_corr(x, g.standard_normal(2000))) < 0.1
