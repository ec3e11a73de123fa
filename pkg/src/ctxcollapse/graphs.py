"""Website link graphs, chromatic numbers, and container assignments.

Each finding's evidence sites form a clique, directed by visit order.
Coloring the undirected projection gives the minimum number of browser
storage containers preventing linkage; small graphs are colored exactly
by branch and bound, larger ones by the DSATUR heuristic with the exact
flag recording which path ran.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from ctxcollapse.analytics import PersistentIdentifierFinding
from ctxcollapse.model import CrawlRun

DEFAULT_EXACT_NODE_LIMIT = 25
DEFAULT_TIME_BUDGET = 10.0  # seconds for the exact search


@dataclass(frozen=True)
class SiteGraph:
    nodes: Mapping[str, str]  # first_party -> context
    edges: Mapping[tuple[str, str], frozenset[str]]  # (a, b) -> trackers

    def undirected_adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {node: set() for node in self.nodes}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj


@dataclass(frozen=True)
class Coloring:
    color_of: Mapping[str, int]
    num_colors: int
    exact: bool


def build_site_graph(
    findings: Iterable[PersistentIdentifierFinding],
    run: CrawlRun,
    scope: str,
) -> SiteGraph:
    """Clique edges over each finding's evidence sites, directed by visit order."""
    order = {visit.first_party: visit.visit_order for visit in run.visits}
    nodes: dict[str, str] = {}
    edges: dict[tuple[str, str], set[str]] = {}
    for finding in findings:
        if finding.scope != scope:
            continue
        site_ctx = {row.first_party: row.context for row in finding.evidence}
        sites = sorted(site_ctx, key=lambda s: order.get(s, 0))
        for site in sites:
            nodes.setdefault(site, site_ctx[site])
        for i, a in enumerate(sites):
            for b in sites[i + 1 :]:
                if a == b:
                    continue
                edges.setdefault((a, b), set()).add(finding.tracker)
    return SiteGraph(
        nodes=nodes, edges={e: frozenset(t) for e, t in edges.items()}
    )


def merge_site_graphs(graphs: Iterable[SiteGraph]) -> SiteGraph:
    """Union of per-run graphs (used to aggregate one context across days)."""
    nodes: dict[str, str] = {}
    edges: dict[tuple[str, str], set[str]] = {}
    for graph in graphs:
        for node, ctx in graph.nodes.items():
            nodes.setdefault(node, ctx)
        for edge, trackers in graph.edges.items():
            edges.setdefault(edge, set()).update(trackers)
    return SiteGraph(nodes=nodes, edges={e: frozenset(t) for e, t in edges.items()})


def context_graphs(corpus, results, scope: str) -> dict[str, SiteGraph]:
    """One merged graph per origin context, aggregating every day's run."""
    by_run = results.between_by_run if scope == "between" else results.within_by_run
    runs = {(r.day_index, r.origin_context): r for r in corpus.runs}
    grouped: dict[str, list[SiteGraph]] = {}
    for key, findings in by_run.items():
        run = runs[key]
        grouped.setdefault(run.origin_context, []).append(
            build_site_graph(findings, run, scope)
        )
    return {
        origin: merge_site_graphs(graphs)
        for origin, graphs in sorted(grouped.items())
    }


def _dsatur(adj: dict[str, set[str]]) -> dict[str, int]:
    colors: dict[str, int] = {}
    uncolored = set(adj)
    while uncolored:
        # highest saturation, then highest degree, then name
        node = min(
            uncolored,
            key=lambda n: (
                -len({colors[m] for m in adj[n] if m in colors}),
                -len(adj[n]),
                n,
            ),
        )
        used = {colors[m] for m in adj[node] if m in colors}
        c = 0
        while c in used:
            c += 1
        colors[node] = c
        uncolored.remove(node)
    return colors


def _greedy_clique(adj: dict[str, set[str]]) -> list[str]:
    clique: list[str] = []
    candidates = sorted(adj, key=lambda n: (-len(adj[n]), n))
    for node in candidates:
        if all(node in adj[c] for c in clique):
            clique.append(node)
    return clique


class _Deadline(Exception):
    pass


def _exact_coloring(
    adj: dict[str, set[str]], upper: dict[str, int], deadline: float
) -> dict[str, int]:
    """Branch and bound: improve on the DSATUR bound until proven optimal."""
    best = dict(upper)
    best_k = max(best.values()) + 1 if best else 0
    clique = _greedy_clique(adj)
    lower = len(clique)
    if best_k <= lower:
        return best
    nodes = sorted(adj, key=lambda n: (n not in clique, -len(adj[n]), n))
    assignment: dict[str, int] = {}

    def extend(index: int, used: int) -> None:
        nonlocal best, best_k
        if time.monotonic() > deadline:
            raise _Deadline()
        if used >= best_k:
            return
        if index == len(nodes):
            best = dict(assignment)
            best_k = used
            return
        node = nodes[index]
        neighbor_colors = {
            assignment[m] for m in adj[node] if m in assignment
        }
        for color in range(min(used + 1, best_k - 1)):
            if color in neighbor_colors:
                continue
            assignment[node] = color
            extend(index + 1, max(used, color + 1))
            del assignment[node]
            if best_k <= lower:
                return

    extend(0, 0)
    return best


def chromatic_number(
    graph: SiteGraph,
    exact_node_limit: int = DEFAULT_EXACT_NODE_LIMIT,
    time_budget: float = DEFAULT_TIME_BUDGET,
) -> Coloring:
    """Color the undirected projection; exact when small enough, else DSATUR.

    The returned coloring is always valid; ``exact`` is true only when the
    branch-and-bound search completed within its budget.
    """
    adj = graph.undirected_adjacency()
    if not adj:
        return Coloring(color_of={}, num_colors=0, exact=True)
    colors = _dsatur(adj)
    exact = False
    if len(adj) <= exact_node_limit:
        try:
            colors = _exact_coloring(
                adj, colors, time.monotonic() + time_budget
            )
            exact = True
        except _Deadline:
            pass
    num_colors = max(colors.values()) + 1
    for a, neighbors in adj.items():
        for b in neighbors:
            assert colors[a] != colors[b], "invalid coloring produced"
    return Coloring(color_of=colors, num_colors=num_colors, exact=exact)


def container_assignment(coloring: Coloring) -> dict[int, list[str]]:
    """Partition of sites into containers, deterministically ordered."""
    containers: dict[int, list[str]] = {}
    for node in sorted(coloring.color_of):
        containers.setdefault(coloring.color_of[node], []).append(node)
    return {color: sorted(sites) for color, sites in sorted(containers.items())}


def degree_report(
    graph: SiteGraph, sort_by: str = "out"
) -> list[tuple[str, str, int, int]]:
    """Rows of (site, context, in_degree, out_degree), sorted descending."""
    if sort_by not in ("in", "out"):
        raise ValueError(f"unknown degree kind {sort_by!r}")
    in_deg = {node: 0 for node in graph.nodes}
    out_deg = {node: 0 for node in graph.nodes}
    for a, b in graph.edges:
        out_deg[a] += 1
        in_deg[b] += 1
    rows = [
        (node, graph.nodes[node], in_deg[node], out_deg[node])
        for node in graph.nodes
    ]
    key_index = 2 if sort_by == "in" else 3
    rows.sort(key=lambda r: (-r[key_index], r[0]))
    return rows


def to_dot(
    graph: SiteGraph,
    name: str = "sites",
    coloring: Optional[Coloring] = None,
) -> str:
    """Deterministic DOT serialization; context and color as node attributes."""
    safe_name = "".join(c if c.isalnum() or c == "_" else "_" for c in name)
    lines = [f"digraph {safe_name} {{"]
    for node in sorted(graph.nodes):
        attrs = [f'context="{graph.nodes[node]}"']
        if coloring is not None and node in coloring.color_of:
            attrs.append(f'fillcolor="{coloring.color_of[node]}"')
            attrs.append('style="filled"')
        lines.append(f'  "{node}" [{", ".join(attrs)}];')
    for a, b in sorted(graph.edges):
        trackers = ",".join(sorted(graph.edges[(a, b)]))
        lines.append(f'  "{a}" -> "{b}" [trackers="{trackers}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
