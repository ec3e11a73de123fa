import itertools
import random

import pytest
from conftest import cookie, run, visit

from ctxcollapse.analytics import between_context_findings
from ctxcollapse.graphs import (
    Coloring,
    SiteGraph,
    build_site_graph,
    chromatic_number,
    container_assignment,
    context_graphs,
    degree_report,
    merge_site_graphs,
    to_dot,
)


def _graph(edge_list, node_ctx=None):
    nodes = {}
    for a, b in edge_list:
        nodes.setdefault(a, (node_ctx or {}).get(a, "ctx"))
        nodes.setdefault(b, (node_ctx or {}).get(b, "ctx"))
    return SiteGraph(
        nodes=nodes,
        edges={(a, b): frozenset({"t.net"}) for a, b in edge_list},
    )


def _finding_run(site_ctx_value, order):
    visits = []
    for i, (site, ctx, value) in enumerate(site_ctx_value):
        visits.append(visit(site, ctx, i, [cookie("t.net", value)]))
    return run(0, order[0], order, visits)


def test_clique_over_evidence_sites():
    r = _finding_run(
        [("a.com", "news", "V1"), ("b.com", "shop", "V1"), ("c.com", "health", "V1")],
        ("news", "shop", "health"),
    )
    findings = between_context_findings(r, {"t.net": "uid"}, {})
    g = build_site_graph(findings, r, "between")
    assert set(g.nodes) == {"a.com", "b.com", "c.com"}
    assert set(g.edges) == {
        ("a.com", "b.com"), ("a.com", "c.com"), ("b.com", "c.com")
    }
    assert all(t == frozenset({"t.net"}) for t in g.edges.values())


def test_edges_directed_by_visit_order():
    r = _finding_run(
        [("b.com", "news", "V1"), ("a.com", "shop", "V1")], ("news", "shop")
    )
    findings = between_context_findings(r, {"t.net": "uid"}, {})
    g = build_site_graph(findings, r, "between")
    # b.com visited first, so the edge runs b -> a despite name order
    assert set(g.edges) == {("b.com", "a.com")}


def test_merge_unions_trackers():
    g1 = SiteGraph(nodes={"a": "x", "b": "x"},
                   edges={("a", "b"): frozenset({"t1"})})
    g2 = SiteGraph(nodes={"a": "x", "b": "x"},
                   edges={("a", "b"): frozenset({"t2"})})
    merged = merge_site_graphs([g1, g2])
    assert merged.edges[("a", "b")] == frozenset({"t1", "t2"})


def test_context_graphs_grouped_by_origin():
    from ctxcollapse import analytics
    from ctxcollapse.simulate import default_plan, generate

    generated, truth = generate(default_plan(seed=1, n_planted=8))
    results = analytics.analyze_corpus(generated)
    graphs = context_graphs(generated, results, "between")
    expected = {
        origin: edges
        for (scope, origin), edges in truth.edges.items()
        if scope == "between" and edges
    }
    got = {
        origin: {e: set(t) for e, t in g.edges.items()}
        for origin, g in graphs.items()
        if g.edges
    }
    assert got == {
        origin: {e: set(t) for e, t in edges.items()}
        for origin, edges in expected.items()
    }


# -- coloring ---------------------------------------------------------------

def _exhaustive_chromatic(adj):
    """Independent oracle: try k = 1.. with symmetry-broken backtracking."""
    nodes = sorted(adj)
    if not nodes:
        return 0

    def colorable(k):
        assignment = {}

        def place(i, used):
            if i == len(nodes):
                return True
            node = nodes[i]
            banned = {assignment[m] for m in adj[node] if m in assignment}
            for c in range(min(used + 1, k)):
                if c in banned:
                    continue
                assignment[node] = c
                if place(i + 1, max(used, c + 1)):
                    return True
                del assignment[node]
            return False

        return place(0, 0)

    for k in range(1, len(nodes) + 1):
        if colorable(k):
            return k
    raise AssertionError("unreachable")


def _random_graph(rng, n, p):
    edges = [
        (f"n{i}", f"n{j}")
        for i, j in itertools.combinations(range(n), 2)
        if rng.random() < p
    ]
    nodes = {f"n{i}": "ctx" for i in range(n)}
    return SiteGraph(nodes=nodes,
                     edges={e: frozenset({"t"}) for e in edges})


def test_empty_graph():
    coloring = chromatic_number(SiteGraph(nodes={}, edges={}))
    assert coloring.num_colors == 0 and coloring.exact


def test_edgeless_graph_one_color():
    g = SiteGraph(nodes={"a": "x", "b": "x"}, edges={})
    coloring = chromatic_number(g)
    assert coloring.num_colors == 1 and coloring.exact


def test_triangle_needs_three():
    g = _graph([("a", "b"), ("b", "c"), ("a", "c")])
    assert chromatic_number(g).num_colors == 3


def test_bipartite_needs_two():
    # complete bipartite K_{3,3}
    g = _graph([(f"l{i}", f"r{j}") for i in range(3) for j in range(3)])
    coloring = chromatic_number(g)
    assert coloring.num_colors == 2 and coloring.exact


def test_odd_cycle_needs_three():
    g = _graph([(f"n{i}", f"n{(i + 1) % 5}") for i in range(5)])
    assert chromatic_number(g).num_colors == 3


def test_random_graphs_match_exhaustive_oracle():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(0, 10)
        g = _random_graph(rng, n, rng.choice([0.2, 0.5, 0.8]))
        coloring = chromatic_number(g)
        assert coloring.exact
        assert coloring.num_colors == _exhaustive_chromatic(
            g.undirected_adjacency()
        )


def test_heuristic_never_beats_exact():
    rng = random.Random(5)
    for _ in range(40):
        g = _random_graph(rng, rng.randint(2, 10), 0.5)
        exact = chromatic_number(g)
        heuristic = chromatic_number(g, exact_node_limit=0)
        assert not heuristic.exact
        assert heuristic.num_colors >= exact.num_colors


def test_coloring_valid_above_exact_limit():
    rng = random.Random(3)
    g = _random_graph(rng, 40, 0.3)
    coloring = chromatic_number(g)  # 40 > default exact limit
    assert not coloring.exact
    adj = g.undirected_adjacency()
    for a, nbrs in adj.items():
        for b in nbrs:
            assert coloring.color_of[a] != coloring.color_of[b]


def test_container_assignment_partitions_nodes():
    g = _graph([("a", "b"), ("b", "c"), ("a", "c"), ("c", "d")])
    coloring = chromatic_number(g)
    containers = container_assignment(coloring)
    flat = [s for sites in containers.values() for s in sites]
    assert sorted(flat) == sorted(g.nodes)
    assert len(flat) == len(set(flat))
    assert len(containers) == coloring.num_colors


def test_container_assignment_deterministic():
    rng = random.Random(9)
    g = _random_graph(rng, 12, 0.4)
    c1 = container_assignment(chromatic_number(g))
    c2 = container_assignment(chromatic_number(g))
    assert c1 == c2


def test_degree_report_counts():
    g = _graph([("a", "b"), ("a", "c"), ("b", "c")])
    rows = degree_report(g, sort_by="out")
    assert rows[0] == ("a", "ctx", 0, 2)
    by_in = degree_report(g, sort_by="in")
    assert by_in[0] == ("c", "ctx", 2, 0)


def test_degree_report_rejects_unknown_sort():
    with pytest.raises(ValueError):
        degree_report(_graph([]), sort_by="total")


def test_to_dot_deterministic_and_complete():
    g = _graph([("b", "a"), ("a", "c")], node_ctx={"a": "news"})
    coloring = chromatic_number(g)
    dot1 = to_dot(g, name="g one", coloring=coloring)
    dot2 = to_dot(g, name="g one", coloring=coloring)
    assert dot1 == dot2
    assert dot1.startswith("digraph g_one {")
    for node in g.nodes:
        assert f'"{node}" [' in dot1
    assert '"b" -> "a" [trackers="t.net"];' in dot1
    assert 'context="news"' in dot1
    assert "fillcolor=" in dot1


def test_to_dot_without_coloring_has_no_fill():
    g = _graph([("a", "b")])
    assert "fillcolor" not in to_dot(g)
