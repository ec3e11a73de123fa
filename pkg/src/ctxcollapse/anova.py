"""One-way (single-factor) ANOVA over per-day metric series.

The F statistic is the classical between/within mean-square ratio; its
p-value comes from the upper tail of the F distribution, evaluated via a
continued-fraction regularized incomplete beta (absolute tolerance 1e-12),
so the package needs no external stats dependency.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence


class AnovaInputError(ValueError):
    """Raised for inputs the test is undefined on (too few groups/observations)."""


@dataclass(frozen=True)
class AnovaResult:
    f_statistic: float
    df_between: int
    df_within: int
    p_value: float
    group_means: dict[str, float]
    ss_between: float
    ss_within: float


_BETA_TOL = 1e-12
_BETA_MAX_ITER = 500


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz continued fraction for the incomplete beta
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _BETA_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETA_TOL:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), the regularized incomplete beta function.

    Satisfies I_x(a, b) + I_{1-x}(b, a) = 1.
    """
    if a <= 0 or b <= 0:
        raise ValueError("beta parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    # use the branch of the continued fraction that converges fast
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_distribution_sf(f: float, df1: int, df2: int) -> float:
    """Upper-tail probability of the F distribution."""
    if f <= 0.0:
        return 1.0
    if math.isinf(f):
        return 0.0
    x = df2 / (df2 + df1 * f)
    return regularized_incomplete_beta(df2 / 2.0, df1 / 2.0, x)


def one_way_anova(groups: Mapping[str, Sequence[float]]) -> AnovaResult:
    """Single-factor ANOVA over named groups of observations.

    Requires at least two groups with at least two observations each.
    When neither between- nor within-group variance exists, F is defined
    as 0 (p = 1); a nonzero between-group effect with zero residual
    variance yields an infinite F and p = 0.
    """
    if len(groups) < 2:
        raise AnovaInputError("need at least two groups")
    for label, values in groups.items():
        if len(values) < 2:
            raise AnovaInputError(f"group {label!r} has fewer than two observations")

    group_means = {label: sum(v) / len(v) for label, v in groups.items()}
    n_total = sum(len(v) for v in groups.values())
    grand_mean = sum(sum(v) for v in groups.values()) / n_total
    ss_between = sum(
        len(v) * (group_means[label] - grand_mean) ** 2
        for label, v in groups.items()
    )
    ss_within = sum(
        (x - group_means[label]) ** 2 for label, v in groups.items() for x in v
    )
    df_between = len(groups) - 1
    df_within = n_total - len(groups)

    if ss_within == 0.0:
        f_stat = 0.0 if ss_between == 0.0 else math.inf
    else:
        f_stat = (ss_between / df_between) / (ss_within / df_within)
    p_value = f_distribution_sf(f_stat, df_between, df_within)
    return AnovaResult(
        f_statistic=f_stat,
        df_between=df_between,
        df_within=df_within,
        p_value=p_value,
        group_means=group_means,
        ss_between=ss_between,
        ss_within=ss_within,
    )
