"""Persistent-identifier findings and collapse metrics.

Detects trackers that recognize the same browser across contexts
(between-context collapse) or across sites inside one context
(within-context collapse), from exact ID-cookie value recurrence or
recurring flagged fingerprinting scripts.  Aggregates per-origin-context
reports, diffusion-distance histograms, coverage distributions, and the
cookie/fingerprint mechanism overlap.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import mean
from typing import Mapping, Optional

from ctxcollapse.classifier import ClassifierConfig, id_cookies_per_tracker
from ctxcollapse.fingerprint import fingerprinting_trackers, load_keywords
from ctxcollapse.model import CrawlRecordSet, CrawlRun

SCOPES = ("between", "within")


class IntegrityError(ValueError):
    """Raised when a finding's evidence is inconsistent with its run."""


@dataclass(frozen=True)
class EvidenceRow:
    first_party: str
    context: str
    day_index: int
    detail: str  # cookie value, or flagged script URL


@dataclass(frozen=True)
class PersistentIdentifierFinding:
    tracker: str
    scope: str  # "between" or "within"
    origin_context: str
    mechanism: str  # "cookie", "fingerprint", or "both"
    evidence: tuple[EvidenceRow, ...]
    contexts_reached: tuple[str, ...]

    @property
    def sites(self) -> frozenset[str]:
        return frozenset(row.first_party for row in self.evidence)


@dataclass(frozen=True)
class CollapseReport:
    origin_context: str
    unique_third_parties: float
    cookie_count: float
    persistent_identifiers: float
    pct_persistent: float
    participating_sites_pct: float
    days: tuple[int, ...] = ()
    per_day: Mapping[str, tuple[float, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class DiffusionHistogram:
    origin_context: str
    buckets: Mapping[str, float]  # "1".."K-2" and "all" -> percent
    mean_identifiers: float


def _cookie_rows_by_value(run: CrawlRun, tracker: str, cookie_name: str):
    """Evidence rows per exact cookie value for one tracker in one run."""
    rows: dict[str, list[tuple[int, EvidenceRow, str]]] = {}
    for visit in run.visits:
        seen_values = set()
        for cookie in visit.cookies:
            if cookie.setter_domain != tracker or cookie.name != cookie_name:
                continue
            if cookie.value in seen_values:
                continue
            seen_values.add(cookie.value)
            rows.setdefault(cookie.value, []).append(
                (
                    visit.visit_order,
                    EvidenceRow(
                        first_party=visit.first_party,
                        context=visit.context,
                        day_index=run.day_index,
                        detail=cookie.value,
                    ),
                    cookie.setter_domain,
                )
            )
    return rows


def _fp_rows(run: CrawlRun, tracker: str, fp_sites: frozenset[str]):
    """Evidence rows for a fingerprinting tracker's scripts in one run.

    A visit counts when the site is one where the tracker's flagged script
    was observed corpus-wide and the tracker runs a script on this visit
    (script recurrence, not fingerprint-value equality, is the linkage
    signal).
    """
    rows = []
    for visit in run.visits:
        if visit.first_party not in fp_sites:
            continue
        for script in visit.scripts:
            if script.script_origin == tracker:
                rows.append(
                    (
                        visit.visit_order,
                        EvidenceRow(
                            first_party=visit.first_party,
                            context=visit.context,
                            day_index=run.day_index,
                            detail=script.script_url,
                        ),
                    )
                )
                break
    return rows


def _context_positions(run: CrawlRun) -> dict[str, int]:
    return {ctx: i for i, ctx in enumerate(run.context_order)}


def _assemble_finding(
    tracker: str,
    scope: str,
    origin_context: str,
    run: CrawlRun,
    cookie_rows: list[tuple[int, EvidenceRow]],
    fp_rows: list[tuple[int, EvidenceRow]],
) -> Optional[PersistentIdentifierFinding]:
    all_rows = sorted(cookie_rows + fp_rows, key=lambda t: t[0])
    if not all_rows:
        return None
    # drop trackers whose every evidence row is the site itself
    if all(row.first_party == tracker for _, row in all_rows):
        return None
    if cookie_rows and fp_rows:
        mechanism = "both"
    elif cookie_rows:
        mechanism = "cookie"
    else:
        mechanism = "fingerprint"
    reached_set = {row.context for _, row in all_rows}
    contexts_reached = tuple(c for c in run.context_order if c in reached_set)
    return PersistentIdentifierFinding(
        tracker=tracker,
        scope=scope,
        origin_context=origin_context,
        mechanism=mechanism,
        evidence=tuple(row for _, row in all_rows),
        contexts_reached=contexts_reached,
    )


def between_context_findings(
    run: CrawlRun,
    id_map: Mapping[str, str],
    fp_map: Mapping[str, frozenset[str]],
) -> list[PersistentIdentifierFinding]:
    """One finding per tracker recurring from the origin context onward.

    Cookie linkage requires the tracker's selected ID-cookie value (exact
    string match) in the origin context and in at least one subsequent
    context of the run; fingerprint linkage requires the flagged script in
    the origin context and a later context.
    """
    positions = _context_positions(run)
    findings = []
    for tracker in sorted(set(id_map) | set(fp_map)):
        cookie_rows: list[tuple[int, EvidenceRow]] = []
        if tracker in id_map:
            candidates = []
            for value, rows in _cookie_rows_by_value(
                run, tracker, id_map[tracker]
            ).items():
                pos = {positions[row.context] for _, row, _ in rows}
                if 0 in pos and any(p > 0 for p in pos):
                    candidates.append((value, rows))
            if candidates:
                # one value per finding: most evidence rows, then smallest value
                candidates.sort(key=lambda vr: (-len(vr[1]), vr[0]))
                cookie_rows = [(order, row) for order, row, _ in candidates[0][1]]
        fp_rows: list[tuple[int, EvidenceRow]] = []
        fp_sites = fp_map.get(tracker, frozenset())
        if len(fp_sites) >= 2:
            rows = _fp_rows(run, tracker, fp_sites)
            pos = {positions[row.context] for _, row in rows}
            if 0 in pos and any(p > 0 for p in pos):
                fp_rows = rows
        finding = _assemble_finding(
            tracker, "between", run.origin_context, run, cookie_rows, fp_rows
        )
        if finding is not None and len(set(finding.contexts_reached)) >= 2:
            findings.append(finding)
    return findings


def within_context_findings(
    run: CrawlRun,
    context: str,
    id_map: Mapping[str, str],
    fp_map: Mapping[str, frozenset[str]],
) -> list[PersistentIdentifierFinding]:
    """Findings restricted to 2+ distinct first parties inside one context."""
    findings = []
    for tracker in sorted(set(id_map) | set(fp_map)):
        cookie_rows: list[tuple[int, EvidenceRow]] = []
        if tracker in id_map:
            candidates = []
            for value, rows in _cookie_rows_by_value(
                run, tracker, id_map[tracker]
            ).items():
                in_ctx = [
                    (order, row) for order, row, _ in rows if row.context == context
                ]
                if len({row.first_party for _, row in in_ctx}) >= 2:
                    candidates.append((value, in_ctx))
            if candidates:
                candidates.sort(key=lambda vr: (-len(vr[1]), vr[0]))
                cookie_rows = candidates[0][1]
        fp_rows: list[tuple[int, EvidenceRow]] = []
        fp_sites = fp_map.get(tracker, frozenset())
        if len(fp_sites) >= 2:
            rows = [
                (order, row)
                for order, row in _fp_rows(run, tracker, fp_sites)
                if row.context == context
            ]
            if len({row.first_party for _, row in rows}) >= 2:
                fp_rows = rows
        finding = _assemble_finding(
            tracker, "within", context, run, cookie_rows, fp_rows
        )
        if finding is not None and len(finding.sites) >= 2:
            findings.append(finding)
    return findings


def diffusion_distance(finding: PersistentIdentifierFinding, run: CrawlRun) -> int:
    """Farthest context position (origin = 0) holding evidence for a finding."""
    if finding.scope != "between":
        raise ValueError("diffusion distance is defined for between-scope findings")
    positions = _context_positions(run)
    distance = 0
    for row in finding.evidence:
        if row.context not in positions:
            raise IntegrityError(
                f"evidence context {row.context!r} not in run context_order"
            )
        distance = max(distance, positions[row.context])
    return distance


@dataclass(frozen=True)
class CorpusFindings:
    """All per-run findings for one corpus, plus the maps that produced them."""

    id_map: Mapping[str, str]
    fp_map: Mapping[str, frozenset[str]]
    between_by_run: Mapping[tuple[int, str], tuple[PersistentIdentifierFinding, ...]]
    within_by_run: Mapping[tuple[int, str], tuple[PersistentIdentifierFinding, ...]]


def analyze_corpus(
    corpus: CrawlRecordSet,
    config: Optional[ClassifierConfig] = None,
    keywords: Optional[frozenset[str]] = None,
) -> CorpusFindings:
    """Run classification and finding detection over every run.

    Within-context findings are computed for each run's origin context,
    mirroring the per-priority-context reporting.
    """
    id_map = id_cookies_per_tracker(corpus, config or ClassifierConfig())
    fp_map = fingerprinting_trackers(
        corpus, keywords if keywords is not None else load_keywords()
    )
    between = {}
    within = {}
    for run in corpus.runs:
        key = (run.day_index, run.origin_context)
        between[key] = tuple(between_context_findings(run, id_map, fp_map))
        within[key] = tuple(
            within_context_findings(run, run.origin_context, id_map, fp_map)
        )
    return CorpusFindings(
        id_map=id_map, fp_map=fp_map, between_by_run=between, within_by_run=within
    )


def _origin_run_metrics(corpus: CrawlRecordSet, run: CrawlRun, findings) -> dict:
    origin_visits = [v for v in run.visits if v.context == run.origin_context]
    third_parties = set()
    cookie_count = 0
    for visit in origin_visits:
        for cookie in visit.cookies:
            cookie_count += 1
            if cookie.setter_domain != visit.first_party:
                third_parties.add(cookie.setter_domain)
        for script in visit.scripts:
            if script.script_origin != visit.first_party:
                third_parties.add(script.script_origin)
    origin_sites = {v.first_party for v in origin_visits}
    participating = set()
    for finding in findings:
        for row in finding.evidence:
            if row.context == run.origin_context and row.first_party in origin_sites:
                participating.add(row.first_party)
    n_third = len(third_parties)
    n_findings = len(findings)
    return {
        "unique_third_parties": float(n_third),
        "cookie_count": float(cookie_count),
        "persistent_identifiers": float(n_findings),
        "pct_persistent": 100.0 * n_findings / n_third if n_third else 0.0,
        "participating_sites_pct": (
            100.0 * len(participating) / len(origin_sites) if origin_sites else 0.0
        ),
    }


_METRIC_NAMES = (
    "unique_third_parties",
    "cookie_count",
    "persistent_identifiers",
    "pct_persistent",
    "participating_sites_pct",
)


def collapse_report(
    corpus: CrawlRecordSet, scope: str, results: CorpusFindings
) -> list[CollapseReport]:
    """Per-origin-context aggregate report (means over days), one row each."""
    if scope not in SCOPES:
        raise ValueError(f"unknown scope {scope!r}")
    by_run = results.between_by_run if scope == "between" else results.within_by_run
    per_origin: dict[str, list[tuple[int, dict]]] = {}
    for run in corpus.runs:
        findings = by_run.get((run.day_index, run.origin_context), ())
        per_origin.setdefault(run.origin_context, []).append(
            (run.day_index, _origin_run_metrics(corpus, run, findings))
        )
    reports = []
    for origin in sorted(per_origin):
        day_metrics = sorted(per_origin[origin])
        days = tuple(d for d, _ in day_metrics)
        series = {
            name: tuple(m[name] for _, m in day_metrics) for name in _METRIC_NAMES
        }
        reports.append(
            CollapseReport(
                origin_context=origin,
                unique_third_parties=mean(series["unique_third_parties"]),
                cookie_count=mean(series["cookie_count"]),
                persistent_identifiers=mean(series["persistent_identifiers"]),
                pct_persistent=mean(series["pct_persistent"]),
                participating_sites_pct=mean(series["participating_sites_pct"]),
                days=days,
                per_day=series,
            )
        )
    return reports


def diffusion_histograms(
    corpus: CrawlRecordSet, results: CorpusFindings
) -> list[DiffusionHistogram]:
    """Distance-traveled distribution per origin context.

    Buckets are labeled "1" through "K-2" plus "all" for identifiers
    reaching the last of K contexts; percents sum to 100 per context.
    """
    runs_by_key = {(r.day_index, r.origin_context): r for r in corpus.runs}
    per_origin: dict[str, list[int]] = {}
    counts_per_run: dict[str, list[int]] = {}
    n_contexts: dict[str, int] = {}
    for key, findings in results.between_by_run.items():
        run = runs_by_key[key]
        origin = run.origin_context
        n_contexts[origin] = len(run.context_order)
        counts_per_run.setdefault(origin, []).append(len(findings))
        for finding in findings:
            per_origin.setdefault(origin, []).append(diffusion_distance(finding, run))
    histograms = []
    for origin in sorted(counts_per_run):
        k = n_contexts[origin]
        labels = [str(d) for d in range(1, k - 1)] + ["all"]
        distances = per_origin.get(origin, [])
        total = len(distances)
        if total == 0:
            continue  # histogram defined only for origins with findings
        buckets = {}
        for label in labels:
            d = k - 1 if label == "all" else int(label)
            hits = sum(1 for x in distances if x == d)
            buckets[label] = 100.0 * hits / total
        histograms.append(
            DiffusionHistogram(
                origin_context=origin,
                buckets=buckets,
                mean_identifiers=mean(counts_per_run[origin]),
            )
        )
    return histograms


def coverage_distribution(
    findings: list[PersistentIdentifierFinding],
) -> list[tuple[str, float]]:
    """Percent of all connected sites covered per tracker, sorted descending."""
    if not findings:
        return []
    sites_per_tracker: dict[str, set[str]] = {}
    universe: set[str] = set()
    for finding in findings:
        sites = set(finding.sites)
        sites_per_tracker.setdefault(finding.tracker, set()).update(sites)
        universe.update(sites)
    series = [
        (tracker, 100.0 * len(sites) / len(universe))
        for tracker, sites in sites_per_tracker.items()
    ]
    series.sort(key=lambda ts: (-ts[1], ts[0]))
    return series


def mechanism_overlap(results: CorpusFindings) -> dict[str, dict[str, frozenset[str]]]:
    """Partition persistent-identifier trackers by mechanism, per scope."""
    overlap = {}
    for scope, by_run in (
        ("between", results.between_by_run),
        ("within", results.within_by_run),
    ):
        cookie_users: set[str] = set()
        fp_users: set[str] = set()
        for findings in by_run.values():
            for finding in findings:
                if finding.mechanism in ("cookie", "both"):
                    cookie_users.add(finding.tracker)
                if finding.mechanism in ("fingerprint", "both"):
                    fp_users.add(finding.tracker)
        overlap[scope] = {
            "cookie_only": frozenset(cookie_users - fp_users),
            "fp_only": frozenset(fp_users - cookie_users),
            "both": frozenset(cookie_users & fp_users),
        }
    return overlap
