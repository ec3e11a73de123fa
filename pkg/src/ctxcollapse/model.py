"""Corpus data model: crawl runs, site visits, cookie and script observations.

All types are immutable after construction and safe to share across
threads.  Structural integrity is checked by :func:`validate_corpus`,
which reports violations as data rather than raising.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

SCHEMA_VERSION = 1

COOKIE_MECHANISMS = ("http", "js")


@dataclass(frozen=True)
class CookieObservation:
    setter_domain: str
    name: str
    value: str
    expiry: Optional[int]  # epoch seconds; None for session cookies
    mechanism: str  # "http" or "js"
    observed_at: int


@dataclass(frozen=True)
class ScriptObservation:
    script_origin: str
    script_url: str
    api_calls: Mapping[str, int]
    label: Optional[str] = None  # "fp" / "non_fp" in labeled seed corpora


@dataclass(frozen=True)
class SiteVisit:
    first_party: str
    context: str
    visit_order: int
    cookies: tuple[CookieObservation, ...] = ()
    scripts: tuple[ScriptObservation, ...] = ()


@dataclass(frozen=True)
class CrawlRun:
    day_index: int
    origin_context: str
    context_order: tuple[str, ...]
    visits: tuple[SiteVisit, ...]


@dataclass(frozen=True)
class CrawlRecordSet:
    runs: tuple[CrawlRun, ...]
    contexts: frozenset[str]
    site_context_map: Mapping[str, str]


@dataclass(frozen=True)
class Violation:
    day_index: Optional[int]
    origin_context: Optional[str]
    visit_order: Optional[int]
    message: str

    def __str__(self) -> str:
        where = []
        if self.day_index is not None:
            where.append(f"day={self.day_index}")
        if self.origin_context is not None:
            where.append(f"origin={self.origin_context}")
        if self.visit_order is not None:
            where.append(f"visit={self.visit_order}")
        loc = ", ".join(where) or "corpus"
        return f"[{loc}] {self.message}"


def validate_corpus(corpus: CrawlRecordSet) -> list[Violation]:
    """Check every structural invariant; returns [] iff the corpus is valid.

    Pure and deterministic: the same corpus always yields the identical
    violation list.
    """
    violations: list[Violation] = []

    def corpus_violation(msg: str) -> None:
        violations.append(Violation(None, None, None, msg))

    for label in sorted(corpus.contexts):
        if not label:
            corpus_violation("empty context label in context set")

    seen_run_keys: set[tuple[int, str]] = set()
    for run in corpus.runs:
        def run_violation(msg: str, visit_order: Optional[int] = None) -> None:
            violations.append(
                Violation(run.day_index, run.origin_context, visit_order, msg)
            )

        key = (run.day_index, run.origin_context)
        if key in seen_run_keys:
            run_violation("duplicate (day_index, origin_context) run")
        seen_run_keys.add(key)

        if run.day_index < 0:
            run_violation("negative day_index")
        if not run.context_order or run.context_order[0] != run.origin_context:
            run_violation("context_order does not start with origin_context")
        if len(set(run.context_order)) != len(run.context_order):
            run_violation("context_order contains duplicates")
        for ctx in run.context_order:
            if ctx not in corpus.contexts:
                run_violation(f"context {ctx!r} not in corpus context set")

        seen_orders: set[int] = set()
        prev_order = -1
        for visit in run.visits:
            if visit.visit_order < 0:
                run_violation("negative visit_order", visit.visit_order)
            if visit.visit_order in seen_orders:
                run_violation("duplicate visit_order", visit.visit_order)
            if visit.visit_order < prev_order:
                run_violation("visits not sorted by visit_order", visit.visit_order)
            seen_orders.add(visit.visit_order)
            prev_order = max(prev_order, visit.visit_order)

            if visit.context not in run.context_order:
                run_violation(
                    f"visit context {visit.context!r} not in run context_order",
                    visit.visit_order,
                )
            if visit.first_party not in corpus.site_context_map:
                run_violation(
                    f"first_party {visit.first_party!r} missing from site_context_map",
                    visit.visit_order,
                )
            for cookie in visit.cookies:
                if cookie.mechanism not in COOKIE_MECHANISMS:
                    run_violation(
                        f"cookie {cookie.name!r} has unknown mechanism"
                        f" {cookie.mechanism!r}",
                        visit.visit_order,
                    )
            for script in visit.scripts:
                for api, count in script.api_calls.items():
                    if count <= 0:
                        run_violation(
                            f"script {script.script_url!r} has non-positive count"
                            f" for {api!r}",
                            visit.visit_order,
                        )
    return violations


# -- canonical line-delimited serialization ---------------------------------

def _cookie_to_dict(c: CookieObservation) -> dict:
    return {
        "setter_domain": c.setter_domain,
        "name": c.name,
        "value": c.value,
        "expiry": c.expiry,
        "mechanism": c.mechanism,
        "observed_at": c.observed_at,
    }


def _script_to_dict(s: ScriptObservation) -> dict:
    d = {
        "script_origin": s.script_origin,
        "script_url": s.script_url,
        "api_calls": {k: s.api_calls[k] for k in sorted(s.api_calls)},
    }
    if s.label is not None:
        d["label"] = s.label
    return d


def corpus_to_lines(corpus: CrawlRecordSet) -> Iterable[str]:
    """Yield the canonical line-delimited records for a corpus.

    First line is the "meta" header; then one "visit" record per site
    visit, runs ordered by (day_index, origin_context).
    """
    meta = {
        "kind": "meta",
        "schema_version": SCHEMA_VERSION,
        "contexts": sorted(corpus.contexts),
        "site_context_map": {
            k: corpus.site_context_map[k] for k in sorted(corpus.site_context_map)
        },
    }
    yield json.dumps(meta, sort_keys=True, separators=(",", ":"))
    for run in sorted(corpus.runs, key=lambda r: (r.day_index, r.origin_context)):
        for visit in run.visits:
            record = {
                "kind": "visit",
                "day_index": run.day_index,
                "origin_context": run.origin_context,
                "context_order": list(run.context_order),
                "visit_order": visit.visit_order,
                "first_party": visit.first_party,
                "context": visit.context,
                "cookies": [_cookie_to_dict(c) for c in visit.cookies],
                "scripts": [_script_to_dict(s) for s in visit.scripts],
            }
            yield json.dumps(record, sort_keys=True, separators=(",", ":"))


def dump_corpus(corpus: CrawlRecordSet, path) -> None:
    """Write the corpus in the canonical UTF-8 line-delimited format."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in corpus_to_lines(corpus):
            fh.write(line)
            fh.write("\n")
