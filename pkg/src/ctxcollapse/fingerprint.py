"""Fingerprinting-script detection from JavaScript API keyword usage.

A keyword is flagged when it appears on at least 3 distinct first parties
and is at least 16 times more likely to occur in labeled fingerprinting
scripts than in non-fingerprinting ones (add-one smoothing on script
counts).  A default keyword list ships as an editable data file; one can
also be derived from a labeled seed corpus.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Optional

from ctxcollapse.model import CrawlRecordSet, ScriptObservation

DEFAULT_MIN_SITES = 3
DEFAULT_MIN_RATIO = 16.0


@dataclass(frozen=True)
class KeywordStats:
    keyword: str
    site_count: int
    fp_rate: float
    non_fp_rate: float
    likelihood_ratio: float


@dataclass(frozen=True)
class FingerprintVerdict:
    script_origin: str
    script_url: str
    matched_keywords: frozenset[str]

    @property
    def is_fingerprinting(self) -> bool:
        return bool(self.matched_keywords)


class LabelingError(ValueError):
    """Raised when the labeled seed set is missing a label class."""


def load_keywords(path=None) -> frozenset[str]:
    """Read a keyword file (one per line, "#" comments); default: bundled list."""
    if path is None:
        text = (
            resources.files("ctxcollapse.data")
            .joinpath("fingerprint_keywords.txt")
            .read_text(encoding="utf-8")
        )
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    keywords = {
        line.strip()
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    }
    return frozenset(keywords)


def keyword_site_counts(corpus: CrawlRecordSet) -> dict[str, int]:
    """Distinct first parties whose scripts use each keyword, corpus-wide."""
    sites: dict[str, set[str]] = {}
    for run in corpus.runs:
        for visit in run.visits:
            for script in visit.scripts:
                for keyword in script.api_calls:
                    sites.setdefault(keyword, set()).add(visit.first_party)
    return {k: len(v) for k, v in sites.items()}


def compute_keyword_stats(
    labeled: Iterable[tuple[ScriptObservation, str]],
    corpus: CrawlRecordSet,
) -> list[KeywordStats]:
    """Per-keyword rates over a labeled script set, smoothed add-one.

    ``labeled`` pairs each script with "fp" or "non_fp"; both classes must
    be present.  site_count is computed over the full corpus.
    """
    fp_scripts: list[ScriptObservation] = []
    non_fp_scripts: list[ScriptObservation] = []
    for script, label in labeled:
        if label == "fp":
            fp_scripts.append(script)
        elif label == "non_fp":
            non_fp_scripts.append(script)
        else:
            raise LabelingError(f"unknown script label {label!r}")
    if not fp_scripts or not non_fp_scripts:
        raise LabelingError("labeled set needs at least one fp and one non_fp script")

    keywords = sorted(
        {k for s in fp_scripts + non_fp_scripts for k in s.api_calls}
    )
    site_counts = keyword_site_counts(corpus)
    stats = []
    for keyword in keywords:
        fp_hits = sum(1 for s in fp_scripts if keyword in s.api_calls)
        non_fp_hits = sum(1 for s in non_fp_scripts if keyword in s.api_calls)
        fp_rate = (fp_hits + 1) / (len(fp_scripts) + 1)
        non_fp_rate = (non_fp_hits + 1) / (len(non_fp_scripts) + 1)
        stats.append(
            KeywordStats(
                keyword=keyword,
                site_count=site_counts.get(keyword, 0),
                fp_rate=fp_rate,
                non_fp_rate=non_fp_rate,
                likelihood_ratio=fp_rate / non_fp_rate,
            )
        )
    return stats


def flag_keywords(
    stats: Iterable[KeywordStats],
    min_sites: int = DEFAULT_MIN_SITES,
    min_ratio: float = DEFAULT_MIN_RATIO,
) -> frozenset[str]:
    """Keywords meeting both thresholds (boundaries inclusive)."""
    return frozenset(
        s.keyword
        for s in stats
        if s.site_count >= min_sites and s.likelihood_ratio >= min_ratio
    )


def script_verdict(
    script: ScriptObservation, flagged: frozenset[str]
) -> FingerprintVerdict:
    return FingerprintVerdict(
        script_origin=script.script_origin,
        script_url=script.script_url,
        matched_keywords=frozenset(k for k in script.api_calls if k in flagged),
    )


def fingerprinting_trackers(
    corpus: CrawlRecordSet, flagged: frozenset[str]
) -> dict[str, frozenset[str]]:
    """First parties where each script origin ran a flagged script.

    Only origins reaching 2 or more first parties can act as persistent
    identifiers downstream; singletons are kept here so callers can report
    them.
    """
    sites: dict[str, set[str]] = {}
    for run in corpus.runs:
        for visit in run.visits:
            for script in visit.scripts:
                if any(k in flagged for k in script.api_calls):
                    sites.setdefault(script.script_origin, set()).add(
                        visit.first_party
                    )
    return {origin: frozenset(s) for origin, s in sites.items()}
