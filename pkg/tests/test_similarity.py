import random

from hypothesis import given, strategies as st

from ctxcollapse import _gestalt_py
from ctxcollapse.similarity import BACKEND, match_total, ratcliff_obershelp


def _naive_longest_match(a, b):
    best_len, best_i, best_j = 0, 0, 0
    for i in range(len(a)):
        for j in range(len(b)):
            k = 0
            while i + k < len(a) and j + k < len(b) and a[i + k] == b[j + k]:
                k += 1
            if k > best_len:
                best_len, best_i, best_j = k, i, j
    return best_len, best_i, best_j


def naive_match_total(a, b):
    """Independent recursive oracle for the matched-character count."""
    k, i, j = _naive_longest_match(a, b)
    if k == 0:
        return 0
    return (
        k
        + naive_match_total(a[:i], b[:j])
        + naive_match_total(a[i + k :], b[j + k :])
    )


def naive_ratio(a, b):
    if not a and not b:
        return 1.0
    if not a or not b:
        return 0.0
    if (len(a), a) > (len(b), b):
        a, b = b, a
    return 2.0 * naive_match_total(a, b) / (len(a) + len(b))


def test_identical_strings():
    assert ratcliff_obershelp("abcdef", "abcdef") == 1.0


def test_disjoint_alphabets():
    assert ratcliff_obershelp("abc", "xyz") == 0.0


def test_empty_cases():
    assert ratcliff_obershelp("", "") == 1.0
    assert ratcliff_obershelp("", "abc") == 0.0
    assert ratcliff_obershelp("abc", "") == 0.0


def test_worked_example_matches_oracle():
    a, b = "pennsylvania", "pencilvaneya"
    assert ratcliff_obershelp(a, b) == naive_ratio(a, b)


def test_unicode_values():
    assert ratcliff_obershelp("héllo", "héllo") == 1.0
    assert 0.0 < ratcliff_obershelp("héllo", "hello") < 1.0


def test_oracle_equivalence_random_sample():
    rng = random.Random(42)
    for _ in range(2000):
        a = "".join(rng.choice("abcd") for _ in range(rng.randint(0, 12)))
        b = "".join(rng.choice("abcd") for _ in range(rng.randint(0, 12)))
        assert ratcliff_obershelp(a, b) == naive_ratio(a, b), (a, b)


def test_backends_agree():
    rng = random.Random(7)
    for _ in range(500):
        a = "".join(rng.choice("abcdef") for _ in range(rng.randint(0, 20)))
        b = "".join(rng.choice("abcdef") for _ in range(rng.randint(0, 20)))
        assert match_total(a, b) == _gestalt_py.match_total(a, b), (a, b, BACKEND)


@given(st.text(max_size=30), st.text(max_size=30))
def test_symmetry(a, b):
    assert ratcliff_obershelp(a, b) == ratcliff_obershelp(b, a)


@given(st.text(min_size=1, max_size=30))
def test_self_similarity(a):
    assert ratcliff_obershelp(a, a) == 1.0


@given(st.text(max_size=25), st.text(max_size=25))
def test_ratio_bounds(a, b):
    r = ratcliff_obershelp(a, b)
    assert 0.0 <= r <= 1.0
