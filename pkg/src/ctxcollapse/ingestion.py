"""Corpus parsing and domain normalization.

Domains are reduced to registrable form (eTLD+1) against a vendored
public-suffix snapshot; a --suffix-table override can point at any file
in the same rule format.  Unknown TLDs fall back to the last-two-labels
rule so that lookup is total.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from importlib import resources
from typing import Optional

from ctxcollapse.model import (
    CookieObservation,
    CrawlRecordSet,
    CrawlRun,
    ScriptObservation,
    SiteVisit,
    validate_corpus,
)


class DomainParseError(ValueError):
    """Raised for hostnames that are not syntactically valid DNS names."""


class CorpusFormatError(ValueError):
    """Raised for malformed corpus or context-map files (includes line number)."""


_LABEL_RE = re.compile(r"^[a-z0-9_](?:[a-z0-9_-]*[a-z0-9_])?$")


@dataclass(frozen=True)
class SuffixTable:
    rules: frozenset[str]
    wildcards: frozenset[str]  # stored without the "*." prefix
    exceptions: frozenset[str]  # stored without the "!" prefix
    version: str = "unknown"

    @classmethod
    def from_file(cls, path) -> "SuffixTable":
        with open(path, encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    @classmethod
    def from_text(cls, text: str) -> "SuffixTable":
        rules: set[str] = set()
        wildcards: set[str] = set()
        exceptions: set[str] = set()
        version = "unknown"
        for raw in text.splitlines():
            line = raw.strip()
            if line.startswith("//"):
                if "version:" in line:
                    version = line.split("version:", 1)[1].strip()
                continue
            if not line:
                continue
            if line.startswith("!"):
                exceptions.add(line[1:].lower())
            elif line.startswith("*."):
                wildcards.add(line[2:].lower())
            else:
                rules.add(line.lower())
        if not (rules or wildcards):
            raise CorpusFormatError("suffix table contains no rules")
        return cls(
            rules=frozenset(rules),
            wildcards=frozenset(wildcards),
            exceptions=frozenset(exceptions),
            version=version,
        )


_default_table: Optional[SuffixTable] = None


def default_suffix_table() -> SuffixTable:
    global _default_table
    if _default_table is None:
        text = (
            resources.files("ctxcollapse.data")
            .joinpath("public_suffix.dat")
            .read_text(encoding="utf-8")
        )
        _default_table = SuffixTable.from_text(text)
    return _default_table


def normalize_domain(hostname: str, table: Optional[SuffixTable] = None) -> str:
    """Reduce a hostname to its registrable domain (eTLD+1).

    Case-insensitive and idempotent.  A hostname that is itself a public
    suffix is returned unchanged.
    """
    if table is None:
        table = default_suffix_table()
    host = hostname.strip().lower().rstrip(".")
    if not host:
        raise DomainParseError("empty hostname")
    labels = host.split(".")
    for label in labels:
        if not _LABEL_RE.match(label):
            raise DomainParseError(f"illegal label {label!r} in hostname {hostname!r}")

    suffix_len = 1  # default rule: the bare TLD is the public suffix
    n = len(labels)
    for i in range(n):  # i ascending = longest candidate first
        candidate = ".".join(labels[i:])
        if candidate in table.exceptions:
            # exception rule: the rule itself is registrable
            suffix_len = n - i - 1
            break
        if candidate in table.rules:
            suffix_len = n - i
            break
        if i + 1 < n and ".".join(labels[i + 1 :]) in table.wildcards:
            suffix_len = n - i
            break
    if n <= suffix_len:
        return host  # the hostname is itself a public suffix
    return ".".join(labels[n - suffix_len - 1 :])


def load_context_map(path, table: Optional[SuffixTable] = None) -> dict[str, str]:
    """Read a tab-separated "first_party<TAB>context" mapping file."""
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[1].strip():
                raise CorpusFormatError(
                    f"{path}:{lineno}: expected 'first_party<TAB>context'"
                )
            mapping[normalize_domain(parts[0], table)] = parts[1].strip()
    return mapping


def _parse_cookie(d: dict, table: SuffixTable) -> CookieObservation:
    return CookieObservation(
        setter_domain=normalize_domain(d["setter_domain"], table),
        name=d["name"],
        value=d["value"],
        expiry=d.get("expiry"),
        mechanism=d["mechanism"],
        observed_at=d["observed_at"],
    )


def _parse_script(d: dict, table: SuffixTable) -> ScriptObservation:
    return ScriptObservation(
        script_origin=normalize_domain(d["script_origin"], table),
        script_url=d["script_url"],
        api_calls=dict(d["api_calls"]),
        label=d.get("label"),
    )


def load_corpus(
    path,
    context_map_path=None,
    suffix_table: Optional[SuffixTable] = None,
) -> CrawlRecordSet:
    """Parse a canonical corpus file into a validated :class:`CrawlRecordSet`.

    Domains are normalized to registrable form.  If ``context_map_path``
    is given its entries override the corpus header's site_context_map.
    Raises :class:`CorpusFormatError` on malformed input (with the line
    number) or when the loaded corpus fails validation.
    """
    table = suffix_table or default_suffix_table()
    meta: Optional[dict] = None
    run_visits: dict[tuple[int, str], list[SiteVisit]] = {}
    run_orders: dict[tuple[int, str], tuple[str, ...]] = {}

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            kind = record.get("kind")
            if kind == "meta":
                if meta is not None:
                    raise CorpusFormatError(f"{path}:{lineno}: duplicate meta record")
                meta = record
            elif kind == "visit":
                if meta is None:
                    raise CorpusFormatError(
                        f"{path}:{lineno}: visit record before meta header"
                    )
                try:
                    key = (record["day_index"], record["origin_context"])
                    order = tuple(record["context_order"])
                    visit = SiteVisit(
                        first_party=normalize_domain(record["first_party"], table),
                        context=record["context"],
                        visit_order=record["visit_order"],
                        cookies=tuple(
                            _parse_cookie(c, table) for c in record.get("cookies", [])
                        ),
                        scripts=tuple(
                            _parse_script(s, table) for s in record.get("scripts", [])
                        ),
                    )
                except (KeyError, TypeError, DomainParseError) as exc:
                    raise CorpusFormatError(f"{path}:{lineno}: {exc}") from exc
                if key in run_orders and run_orders[key] != order:
                    raise CorpusFormatError(
                        f"{path}:{lineno}: inconsistent context_order for run {key}"
                    )
                run_orders[key] = order
                run_visits.setdefault(key, []).append(visit)
            else:
                raise CorpusFormatError(
                    f"{path}:{lineno}: unknown record kind {kind!r}"
                )

    if meta is None:
        raise CorpusFormatError(f"{path}: missing meta header line")

    site_context_map = {
        normalize_domain(site, table): ctx
        for site, ctx in meta.get("site_context_map", {}).items()
    }
    contexts = set(meta.get("contexts", []))
    if context_map_path is not None:
        overrides = load_context_map(context_map_path, table)
        site_context_map.update(overrides)
        contexts.update(overrides.values())

    runs = tuple(
        CrawlRun(
            day_index=day,
            origin_context=origin,
            context_order=run_orders[(day, origin)],
            visits=tuple(sorted(run_visits[(day, origin)], key=lambda v: v.visit_order)),
        )
        for day, origin in sorted(run_visits)
    )
    corpus = CrawlRecordSet(
        runs=runs,
        contexts=frozenset(contexts),
        site_context_map=site_context_map,
    )
    violations = validate_corpus(corpus)
    if violations:
        raise CorpusFormatError(
            f"{path}: corpus failed validation: {violations[0]}"
            + (f" (+{len(violations) - 1} more)" if len(violations) > 1 else "")
        )
    return corpus
