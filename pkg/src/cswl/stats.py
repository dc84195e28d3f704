"""Summary statistics and t-tests.

The t-distribution CDF is evaluated through the regularized incomplete beta
function with a Lentz continued fraction, so results do not depend on any
statistics package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

CF_TOL = 1e-10
CF_MAX_ITER = 10_000
# sd at or below this fraction of the data scale counts as zero (rounding noise)
DEGENERATE_SD = 1e-12
_TINY = 1e-300


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    sd: float
    se: float


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p_two_sided: float
    p_greater: float
    p_less: float
    mean: float

    @property
    def sig_1pct(self) -> bool:
        return self.p_two_sided < 0.01

    @property
    def sig_5pct(self) -> bool:
        return self.p_two_sided < 0.05

    def p_one_sided(self) -> float:
        """One-sided p in the direction of the observed effect."""
        return self.p_greater if self.t >= 0 else self.p_less


def summarize(samples) -> SummaryStats:
    x = np.asarray(list(samples), dtype=float)
    if x.size == 0:
        raise StatsError("cannot summarize an empty sample")
    if not np.all(np.isfinite(x)):
        raise StatsError("samples must be finite")
    n = int(x.size)
    mean = float(x.mean())
    sd = float(x.std(ddof=1)) if n > 1 else 0.0
    return SummaryStats(n, mean, sd, sd / math.sqrt(n))


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c, d = 1.0, 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > _TINY else _TINY)
    h = d
    for m in range(1, CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < CF_TOL:
            return h
    raise StatsError("incomplete beta continued fraction did not converge")


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise StatsError("betainc_reg needs a, b > 0")
    if not 0.0 <= x <= 1.0:
        raise StatsError("betainc_reg needs x in [0, 1]")
    if x in (0.0, 1.0):
        return x
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_cdf(t: float, df: float) -> float:
    if df <= 0:
        raise StatsError("degrees of freedom must be positive")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    tail = 0.5 * betainc_reg(df / 2.0, 0.5, df / (df + t * t))
    return 1.0 - tail if t > 0 else tail


def t_sf(t: float, df: float) -> float:
    return t_cdf(-t, df)


def one_sample_t(samples, mu0: float) -> TTestResult:
    x = np.asarray(list(samples), dtype=float)
    s = summarize(x)
    if s.n < 2:
        raise StatsError("a t-test needs at least two samples")
    if s.sd <= DEGENERATE_SD * max(1.0, float(np.max(np.abs(x)))):
        raise StatsError("zero variance: the t statistic is undefined")
    t = (s.mean - mu0) / s.se
    df = s.n - 1
    p_less = t_cdf(t, df)
    p_greater = t_sf(t, df)
    p_two = min(1.0, 2.0 * min(p_less, p_greater))
    return TTestResult(t, df, p_two, p_greater, p_less, s.mean)


def paired_t(a, b) -> TTestResult:
    a = np.asarray(list(a), dtype=float)
    b = np.asarray(list(b), dtype=float)
    if a.shape != b.shape:
        raise StatsError(f"paired samples differ in length: {a.size} vs {b.size}")
    return one_sample_t(a - b, 0.0)
