import math
import random

import pytest

from ctxcollapse.anova import (
    AnovaInputError,
    f_distribution_sf,
    one_way_anova,
    regularized_incomplete_beta,
)

scipy_stats = pytest.importorskip("scipy.stats")
scipy_special = pytest.importorskip("scipy.special")


def test_known_f_value():
    # {1,2,3} vs {2,3,4}: SSB = 1.5, SSW = 4, df = (1, 4) -> F = 1.5
    result = one_way_anova({"a": [1.0, 2.0, 3.0], "b": [2.0, 3.0, 4.0]})
    assert result.f_statistic == pytest.approx(1.5, abs=1e-9)
    assert result.df_between == 1
    assert result.df_within == 4
    assert result.ss_between == pytest.approx(1.5)
    assert result.ss_within == pytest.approx(4.0)


def test_identical_groups_give_zero_f():
    result = one_way_anova({"a": [2.0, 2.0, 2.0], "b": [2.0, 2.0, 2.0]})
    assert result.f_statistic == 0.0
    assert result.p_value == 1.0


def test_zero_within_variance_gives_infinite_f():
    result = one_way_anova({"a": [1.0, 1.0], "b": [2.0, 2.0]})
    assert math.isinf(result.f_statistic)
    assert result.p_value == 0.0


def test_too_few_groups_rejected():
    with pytest.raises(AnovaInputError):
        one_way_anova({"a": [1.0, 2.0]})


def test_singleton_group_rejected():
    with pytest.raises(AnovaInputError):
        one_way_anova({"a": [1.0, 2.0], "b": [3.0]})


def test_against_scipy_f_oneway():
    rng = random.Random(13)
    for _ in range(50):
        k = rng.randint(2, 5)
        groups = {
            f"g{i}": [rng.gauss(i * rng.random(), 1.0 + rng.random())
                      for _ in range(rng.randint(2, 8))]
            for i in range(k)
        }
        ours = one_way_anova(groups)
        ref = scipy_stats.f_oneway(*groups.values())
        assert ours.f_statistic == pytest.approx(ref.statistic, rel=1e-9)
        assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-8, abs=1e-12)


def test_beta_against_scipy():
    rng = random.Random(17)
    for _ in range(200):
        a = rng.uniform(0.1, 50.0)
        b = rng.uniform(0.1, 50.0)
        x = rng.random()
        assert regularized_incomplete_beta(a, b, x) == pytest.approx(
            scipy_special.betainc(a, b, x), rel=1e-10, abs=1e-12
        )


def test_beta_reflection_identity():
    rng = random.Random(19)
    for _ in range(200):
        a = rng.uniform(0.1, 30.0)
        b = rng.uniform(0.1, 30.0)
        x = rng.random()
        total = regularized_incomplete_beta(a, b, x) + regularized_incomplete_beta(
            b, a, 1.0 - x
        )
        assert total == pytest.approx(1.0, abs=1e-10)


def test_beta_edge_cases():
    assert regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0
    assert regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0
    with pytest.raises(ValueError):
        regularized_incomplete_beta(0.0, 1.0, 0.5)


def test_shift_and_scale_invariance():
    groups = {"a": [1.0, 2.5, 3.0, 4.2], "b": [2.0, 2.2, 5.1], "c": [0.5, 1.1]}
    base = one_way_anova(groups)
    for shift, scale in ((10.0, 1.0), (0.0, 3.5), (-4.0, 0.25)):
        moved = {
            label: [x * scale + shift for x in values]
            for label, values in groups.items()
        }
        result = one_way_anova(moved)
        assert result.f_statistic == pytest.approx(base.f_statistic, abs=1e-9)
        assert result.p_value == pytest.approx(base.p_value, abs=1e-9)


def test_p_monotone_decreasing_in_f():
    previous = 1.0
    for f in (0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0):
        p = f_distribution_sf(f, 3, 12)
        assert p < previous
        previous = p


def test_sf_bounds():
    assert f_distribution_sf(0.0, 2, 10) == 1.0
    assert f_distribution_sf(-1.0, 2, 10) == 1.0
    assert f_distribution_sf(math.inf, 2, 10) == 0.0


def test_group_means_reported():
    result = one_way_anova({"a": [1.0, 3.0], "b": [4.0, 6.0]})
    assert result.group_means == {"a": 2.0, "b": 5.0}
