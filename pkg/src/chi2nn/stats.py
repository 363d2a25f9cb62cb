"""Chi-square distribution utilities backing the training stop rule.

Only the chi-square CDF/quantile path is implemented; this is not a general
distribution library.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

_MAX_ITER = 600
_REL_EPS = 1e-17
_TINY = 1e-300


@dataclass(frozen=True)
class ChiSquareCritical:
    """Upper-tail critical value: P(X > value) = alpha for X ~ chi-square(df)."""

    df: int
    alpha: float
    value: float


def _validate_number(name, x):
    if not isinstance(x, (int, float)) or isinstance(x, bool) or not math.isfinite(x):
        raise ValueError(f"{name} must be a finite number, got {x!r}")
    return float(x)


def _gamma_series(a, x):
    """Lower regularized gamma by series; converges fast for x < a + 1."""
    term = 1.0 / a
    total = term
    denom = a
    for _ in range(_MAX_ITER):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * _REL_EPS:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))

def _gamma_cont_frac(a, x):
    """Upper regularized gamma by modified Lentz continued fraction (x >= a + 1)."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _REL_EPS:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def regularized_gamma_lower(a, x):
    """P(a, x), the regularized lower incomplete gamma function.

    Series expansion for x < a + 1 and a continued fraction otherwise, the
    standard numerically stable split. Absolute error is well below 1e-12
    over the domain exercised here.
    """
    a = _validate_number("a", a)
    x = _validate_number("x", x)
    if a <= 0.0:
        raise ValueError(f"a must be positive, got {a}")
    if x < 0.0:
        raise ValueError(f"x must be nonnegative, got {x}")
    if x == 0.0:
        return 0.0
    if x < a + 1.0:
        return min(_gamma_series(a, x), 1.0)
    return max(0.0, min(1.0 - _gamma_cont_frac(a, x), 1.0))


def chi2_cdf(x, df):
    """CDF of the chi-square distribution with ``df`` degrees of freedom."""
    df = _validate_df(df)
    return regularized_gamma_lower(df / 2.0, _validate_number("x", x) / 2.0)


def _validate_df(df):
    if isinstance(df, bool) or not isinstance(df, int):
        raise ValueError(f"df must be an integer, got {df!r}")
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    return df


@lru_cache(maxsize=4096)
def _quantile_cached(df, alpha):
    target = 1.0 - alpha
    hi = df + 20.0 * math.sqrt(2.0 * df) + 50.0
    while chi2_cdf(hi, df) < target:
        hi *= 2.0
    lo = 0.0
    mid = 0.5 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if chi2_cdf(mid, df) < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def chi2_quantile(df, alpha):
    """Value t with chi-square CDF(t; df) = 1 - alpha.

    Found by bracketing plus bisection on the CDF; the CDF at the returned
    point matches 1 - alpha to well under 1e-10.
    """
    df = _validate_df(df)
    alpha = _validate_number("alpha", alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return _quantile_cached(df, alpha)


def critical_value(df, alpha):
    """Upper-tail critical value as a ChiSquareCritical record."""
    return ChiSquareCritical(df=df, alpha=alpha, value=chi2_quantile(df, alpha))
