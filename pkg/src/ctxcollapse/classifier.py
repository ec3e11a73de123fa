"""Four-criterion ID-cookie detection.

A cookie qualifies as an ID cookie when all of the following hold for its
(setter, name, first_party) history:

  1. lifetime:          max observed lifetime exceeds 90 days
  2. length:            every observed value length is in (7, 101)
  3. intra_stability:   values within one day are identical
  4. inter_variability: representative values of at least one day pair
                        are less than 66% similar

Thresholds are configurable; the defaults match the listed config file
values exactly.
"""

from __future__ import annotations

import json
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Optional

from ctxcollapse.model import CrawlRecordSet
from ctxcollapse.similarity import ratcliff_obershelp

CRITERIA = ("lifetime", "length", "intra_stability", "inter_variability")

SECONDS_PER_DAY = 86400


@dataclass(frozen=True)
class ClassifierConfig:
    min_lifetime_days: float = 90
    min_len_exclusive: int = 7
    max_len_exclusive: int = 101
    inter_similarity_max: float = 0.66
    pair_quantifier: str = "exists"  # "exists" or "forall"
    length_unit: str = "bytes"  # "bytes" or "chars"

    def __post_init__(self):
        if self.pair_quantifier not in ("exists", "forall"):
            raise ValueError(f"unknown pair_quantifier {self.pair_quantifier!r}")
        if self.length_unit not in ("bytes", "chars"):
            raise ValueError(f"unknown length_unit {self.length_unit!r}")

    @classmethod
    def from_file(cls, path) -> "ClassifierConfig":
        with open(path, encoding="utf-8") as fh:
            return cls(**json.load(fh))

    def value_length(self, value: str) -> int:
        return len(value.encode("utf-8")) if self.length_unit == "bytes" else len(value)


@dataclass
class CookieHistory:
    """Cross-day observation series for one (setter, cookie name, site) key."""

    setter_domain: str
    name: str
    first_party: str
    values_by_day: dict[int, list[str]] = field(default_factory=dict)
    lifetimes_by_day: dict[int, float] = field(default_factory=dict)  # seconds

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.setter_domain, self.name, self.first_party)

    def add(self, day_index: int, value: str, lifetime: Optional[float]) -> None:
        self.values_by_day.setdefault(day_index, []).append(value)
        if lifetime is not None:
            prev = self.lifetimes_by_day.get(day_index)
            self.lifetimes_by_day[day_index] = (
                lifetime if prev is None else max(prev, lifetime)
            )


@dataclass(frozen=True)
class IdCookieVerdict:
    key: tuple[str, str, str]
    is_id: bool
    failed_criteria: frozenset[str]
    representative_value: dict[int, str]  # per day


def build_histories(corpus: CrawlRecordSet) -> dict[tuple[str, str, str], CookieHistory]:
    """Collect per-key cookie histories across every run of the corpus."""
    histories: dict[tuple[str, str, str], CookieHistory] = {}
    for run in corpus.runs:
        for visit in run.visits:
            for cookie in visit.cookies:
                key = (cookie.setter_domain, cookie.name, visit.first_party)
                hist = histories.get(key)
                if hist is None:
                    hist = CookieHistory(*key)
                    histories[key] = hist
                lifetime = (
                    None
                    if cookie.expiry is None
                    else max(0.0, cookie.expiry - cookie.observed_at)
                )
                hist.add(run.day_index, cookie.value, lifetime)
    return histories


def _representative(values: list[str]) -> str:
    # most frequent value that day, ties broken lexicographically
    counts = Counter(values)
    top = max(counts.values())
    return min(v for v, n in counts.items() if n == top)


def classify_cookie(
    history: CookieHistory, thresholds: Optional[ClassifierConfig] = None
) -> IdCookieVerdict:
    """Apply the four ID-cookie criteria to one history.

    ``failed_criteria`` lists every violated rule; ``is_id`` is true iff
    it is empty.
    """
    cfg = thresholds or ClassifierConfig()
    if not history.values_by_day:
        raise ValueError("cookie history has no observations")
    failed: set[str] = set()

    max_lifetime = max(history.lifetimes_by_day.values(), default=None)
    if max_lifetime is None or max_lifetime <= cfg.min_lifetime_days * SECONDS_PER_DAY:
        failed.add("lifetime")

    for values in history.values_by_day.values():
        if any(
            not (cfg.min_len_exclusive < cfg.value_length(v) < cfg.max_len_exclusive)
            for v in values
        ):
            failed.add("length")
            break

    for values in history.values_by_day.values():
        if len(set(values)) > 1:
            failed.add("intra_stability")
            break

    representative = {
        day: _representative(values)
        for day, values in sorted(history.values_by_day.items())
    }
    days = sorted(representative)
    pair_ratios = [
        ratcliff_obershelp(representative[d1], representative[d2])
        for i, d1 in enumerate(days)
        for d2 in days[i + 1 :]
    ]
    if cfg.pair_quantifier == "exists":
        varies = any(r < cfg.inter_similarity_max for r in pair_ratios)
    else:
        varies = bool(pair_ratios) and all(
            r < cfg.inter_similarity_max for r in pair_ratios
        )
    if not varies:
        failed.add("inter_variability")

    return IdCookieVerdict(
        key=history.key,
        is_id=not failed,
        failed_criteria=frozenset(failed),
        representative_value=representative,
    )


def id_cookies_per_tracker(
    corpus: CrawlRecordSet, thresholds: Optional[ClassifierConfig] = None
) -> dict[str, str]:
    """Select at most one ID cookie name per tracker.

    Tie-break: the name with positive verdicts on the most first parties,
    then the lexicographically smallest name.
    """
    cfg = thresholds or ClassifierConfig()
    site_counts: dict[str, Counter] = defaultdict(Counter)
    for history in build_histories(corpus).values():
        verdict = classify_cookie(history, cfg)
        if verdict.is_id:
            site_counts[history.setter_domain][history.name] += 1
    selected: dict[str, str] = {}
    for tracker, counts in site_counts.items():
        best = max(counts.values())
        selected[tracker] = min(n for n, c in counts.items() if c == best)
    return selected
