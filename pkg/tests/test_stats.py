import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from cswl.stats import (
    StatsError,
    betainc_reg,
    one_sample_t,
    paired_t,
    summarize,
    t_cdf,
    t_sf,
)


def t_pdf(x, df):
    logc = math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)
    return math.exp(logc - (df + 1) / 2 * math.log1p(x * x / df))


def cdf_oracle(t, df):
    """0.5 plus the integrated density between 0 and t."""
    area, _ = quad(t_pdf, 0.0, abs(t), args=(df,), epsabs=1e-13, epsrel=1e-13, limit=200)
    return 0.5 + math.copysign(area, t)


@pytest.mark.parametrize("df", [10, 37, 47, 49])
@pytest.mark.parametrize("t", [-6.0, -2.7, -1.0, -0.1, 0.0, 0.4, 1.3, 2.0, 3.5267, 8.0])
def test_t_cdf_matches_integrated_density(t, df):
    assert t_cdf(t, df) == pytest.approx(cdf_oracle(t, df), abs=1e-6)
    assert t_sf(t, df) == pytest.approx(1 - cdf_oracle(t, df), abs=1e-6)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=2, max_size=50), st.floats(-1, 1))
def test_one_sample_p_matches_oracle(xs, mu0):
    s = summarize(xs)
    if s.sd < 1e-6:
        return
    res = one_sample_t(xs, mu0)
    df = len(xs) - 1
    tail = 1 - cdf_oracle(abs(res.t), df)
    assert res.p_two_sided == pytest.approx(min(1.0, 2 * tail), abs=1e-6)
    assert res.p_greater == pytest.approx(1 - cdf_oracle(res.t, df), abs=1e-6)
    assert 0 <= res.p_two_sided <= 1
    assert res.p_greater + res.p_less == pytest.approx(1.0, abs=1e-12)


def test_betainc_edges():
    assert betainc_reg(2.0, 3.0, 0.0) == 0.0
    assert betainc_reg(2.0, 3.0, 1.0) == 1.0
    # I_x(1, 1) = x
    assert betainc_reg(1.0, 1.0, 0.3) == pytest.approx(0.3, abs=1e-14)
    with pytest.raises(StatsError):
        betainc_reg(0.0, 1.0, 0.5)
    with pytest.raises(StatsError):
        betainc_reg(1.0, 1.0, 1.5)
    with pytest.raises(StatsError):
        t_cdf(1.0, 0)
    assert t_cdf(math.inf, 5) == 1.0 and t_cdf(-math.inf, 5) == 0.0


def test_summarize_examples():
    s = summarize([3.5])
    assert (s.n, s.mean, s.sd, s.se) == (1, 3.5, 0.0, 0.0)
    s = summarize([0, 1])
    assert s.mean == 0.5 and s.sd == pytest.approx(2 ** -0.5, abs=1e-15)
    assert summarize([2, 2, 2]).sd == 0.0
    with pytest.raises(StatsError):
        summarize([])
    with pytest.raises(StatsError):
        summarize([1.0, float("nan")])


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=40))
def test_se_bounded_by_sd(xs):
    s = summarize(xs)
    assert s.se <= s.sd + 1e-12 and np.isfinite(s.mean)


def test_one_sample_examples():
    res = one_sample_t([0.2, 0.3, 0.1, 0.4], 0.25)
    assert res.t == pytest.approx(0.0, abs=1e-12) and res.p_two_sided == pytest.approx(1.0)
    res = one_sample_t([10.0, 10.001, 9.999, 10.0005], 0.0)
    assert res.sig_1pct and res.p_greater < 0.01
    with pytest.raises(StatsError):
        one_sample_t([1.0, 1.0, 1.0], 0.0)
    with pytest.raises(StatsError):
        one_sample_t([1.0], 0.0)


def test_reported_summary_is_significant():
    # n=48, mean 0.372, sd 0.126 against 0.25
    t = (0.372 - 0.25) / (0.126 / math.sqrt(48))
    p = 2 * t_sf(t, 47)
    assert t == pytest.approx(6.708, abs=1e-3)
    assert p < 0.01
    rng = np.random.default_rng(0)
    z = rng.standard_normal(48)
    xs = 0.372 + 0.126 * (z - z.mean()) / z.std(ddof=1)
    res = one_sample_t(xs, 0.25)
    assert res.t == pytest.approx(t, rel=1e-9) and res.sig_1pct and res.df == 47


def test_paired_examples():
    a = [0.5, 0.7, 0.2, 0.9]
    assert paired_t(a, a[::-1]).t == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(StatsError):
        paired_t(a, a)
    with pytest.raises(StatsError):
        paired_t([x + 0.1 for x in a], a)
    with pytest.raises(StatsError):
        paired_t(a, a[:3])
    rng = np.random.default_rng(1)
    single = rng.uniform(0.3, 0.6, 48)
    both = single - rng.uniform(0.0, 0.2, 48)
    res = paired_t(single, both)
    assert res.df == 47 and res.t > 0 and res.p_greater < 0.001
