"""Report file emission: CSV tables, JSON artifacts, DOT graphs, manifest.

Output files are written atomically (temp file, then rename) and are
byte-identical across reruns on unchanged inputs; the run manifest is the
only place timestamps live.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import time
from typing import Iterable, Mapping, Optional

from ctxcollapse.analytics import (
    CollapseReport,
    CorpusFindings,
    DiffusionHistogram,
    coverage_distribution,
)
from ctxcollapse.anova import AnovaInputError, AnovaResult, one_way_anova
from ctxcollapse.graphs import Coloring, SiteGraph, container_assignment, to_dot
from ctxcollapse.model import CrawlRecordSet

TOOL_VERSION = "0.1.0"
SCHEMA_VERSION = 1

BETWEEN_HEADERS = [
    "First Context",
    "Average unique third-parties",
    "Average number of cookies",
    "Average of Persistent Identifiers",
    "Percentage of Persistent Identifiers",
    "Participating Websites in Context Collapse",
]
WITHIN_HEADERS = ["Context"] + BETWEEN_HEADERS[1:]

_NUMBER_WORDS = (
    "One", "Two", "Three", "Four", "Five", "Six",
    "Seven", "Eight", "Nine", "Ten", "Eleven", "Twelve",
)


def diffusion_bucket_header(label: str) -> str:
    if label == "all":
        return "Diffusion across all contexts"
    n = int(label)
    word = _NUMBER_WORDS[n - 1] if n <= len(_NUMBER_WORDS) else str(n)
    plural = "s" if n > 1 else ""
    return f"{word} Context{plural} Diffusion"


def write_atomic(path, data: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="") as fh:
        fh.write(data)
    os.replace(tmp, path)


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _csv_text(headers: list[str], rows: Iterable[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(headers)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def collapse_csv(reports: list[CollapseReport], scope: str) -> str:
    headers = BETWEEN_HEADERS if scope == "between" else WITHIN_HEADERS
    rows = [
        [
            r.origin_context,
            _fmt(r.unique_third_parties),
            _fmt(r.cookie_count),
            _fmt(r.persistent_identifiers),
            _fmt(r.pct_persistent),
            _fmt(r.participating_sites_pct),
        ]
        for r in reports
    ]
    return _csv_text(headers, rows)


def diffusion_csv(histograms: list[DiffusionHistogram]) -> str:
    if histograms:
        labels = list(histograms[0].buckets)
    else:
        labels = []
    headers = ["First Context", "Average Number of Persistent Identifiers"] + [
        diffusion_bucket_header(label) for label in labels
    ]
    rows = [
        [h.origin_context, _fmt(h.mean_identifiers)]
        + [_fmt(h.buckets[label]) for label in labels]
        for h in histograms
    ]
    return _csv_text(headers, rows)


def coverage_csv(results: CorpusFindings, scope: str) -> str:
    by_run = (
        results.between_by_run if scope == "between" else results.within_by_run
    )
    per_origin: dict[str, list] = {}
    for (_, origin), findings in by_run.items():
        per_origin.setdefault(origin, []).extend(findings)
    rows = []
    for origin in sorted(per_origin):
        for tracker, pct in coverage_distribution(per_origin[origin]):
            rows.append([origin, tracker, _fmt(pct)])
    return _csv_text(["Context", "Tracker", "Percent of Connected Websites"], rows)


def overlap_json(overlap: Mapping[str, Mapping[str, frozenset[str]]]) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        **{
            scope: {part: sorted(trackers) for part, trackers in parts.items()}
            for scope, parts in overlap.items()
        },
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def containers_json(
    colorings: Mapping[str, tuple[SiteGraph, Coloring]]
) -> str:
    payload: dict = {"schema_version": SCHEMA_VERSION, "contexts": {}}
    for ctx in sorted(colorings):
        _, coloring = colorings[ctx]
        payload["contexts"][ctx] = {
            "num_colors": coloring.num_colors,
            "exact": coloring.exact,
            "containers": {
                str(color): sites
                for color, sites in container_assignment(coloring).items()
            },
        }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def containers_table(coloring: Coloring) -> str:
    """Two-column text table: container index and first-party website."""
    lines = ["container\tfirst_party"]
    for color, sites in container_assignment(coloring).items():
        for site in sites:
            lines.append(f"{color}\t{site}")
    return "\n".join(lines) + "\n"


def anova_csv(corpus: CrawlRecordSet, results: CorpusFindings) -> str:
    """ANOVA tables for per-day persistent-identifier and participation series."""
    from ctxcollapse.analytics import collapse_report

    headers = ["Metric", "Scope", "Source", "SS", "df", "MS", "F", "p"]
    rows: list[list] = []
    for scope in ("between", "within"):
        reports = collapse_report(corpus, scope, results)
        for metric in ("persistent_identifiers", "participating_sites_pct"):
            groups = {
                r.origin_context: list(r.per_day[metric]) for r in reports
            }
            try:
                result = one_way_anova(groups)
            except AnovaInputError:
                continue
            rows.extend(_anova_rows(metric, scope, result))
    return _csv_text(headers, rows)


def _anova_rows(metric: str, scope: str, r: AnovaResult) -> list[list]:
    ms_between = r.ss_between / r.df_between
    ms_within = (
        r.ss_within / r.df_within if r.df_within else 0.0
    )
    return [
        [
            metric,
            scope,
            "Between Groups",
            f"{r.ss_between:.6g}",
            r.df_between,
            f"{ms_between:.6g}",
            f"{r.f_statistic:.6g}",
            f"{r.p_value:.6g}",
        ],
        [
            metric,
            scope,
            "Within Groups",
            f"{r.ss_within:.6g}",
            r.df_within,
            f"{ms_within:.6g}",
            "",
            "",
        ],
    ]


def write_manifest(
    out_dir,
    subcommand: str,
    inputs: Mapping[str, Optional[str]],
    outputs: list[str],
    seed: int = 0,
) -> None:
    manifest = {
        "tool_version": TOOL_VERSION,
        "subcommand": subcommand,
        "seed": seed,
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "inputs": {
            name: {"path": str(path), "sha256": file_digest(path)}
            for name, path in inputs.items()
            if path is not None
        },
        "outputs": sorted(outputs),
    }
    write_atomic(
        os.path.join(out_dir, "manifest.json"),
        json.dumps(manifest, sort_keys=True, indent=2) + "\n",
    )
