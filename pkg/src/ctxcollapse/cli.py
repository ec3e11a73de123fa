"""Command-line entry point: analyze, simulate, and containers subcommands."""

from __future__ import annotations

import os
import sys

import click

from ctxcollapse import analytics, graphs, report
from ctxcollapse.classifier import ClassifierConfig
from ctxcollapse.fingerprint import load_keywords
from ctxcollapse.ingestion import CorpusFormatError, SuffixTable, load_corpus
from ctxcollapse.model import dump_corpus
from ctxcollapse.simulate import PlanError, SimPlan, default_plan, generate


def _fail(message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


def _load(corpus_path, context_map, suffix_table_path):
    table = (
        SuffixTable.from_file(suffix_table_path) if suffix_table_path else None
    )
    if context_map is not None and not os.path.exists(context_map):
        _fail(f"context map not found: {context_map}")
    try:
        return load_corpus(corpus_path, context_map, table)
    except (OSError, CorpusFormatError) as exc:
        _fail(str(exc))


@click.group()
@click.version_option(report.TOOL_VERSION, prog_name="ctxcollapse")
def main() -> None:
    """Persistent browser-identification analysis for crawl corpora."""


@main.command("analyze")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--context-map", default=None, type=click.Path())
@click.option("--config", default=None, type=click.Path(exists=True))
@click.option("--keywords", default=None, type=click.Path(exists=True))
@click.option("--suffix-table", default=None, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--seed", default=0, show_default=True)
@click.option("--exact-limit", default=graphs.DEFAULT_EXACT_NODE_LIMIT, show_default=True)
def cmd_analyze(corpus, context_map, config, keywords, suffix_table, out, seed, exact_limit):
    """Run the full pipeline and emit every report artifact."""
    data = _load(corpus, context_map, suffix_table)
    cfg = ClassifierConfig.from_file(config) if config else ClassifierConfig()
    keyword_set = load_keywords(keywords)
    results = analytics.analyze_corpus(data, cfg, keyword_set)

    os.makedirs(out, exist_ok=True)
    outputs = []

    def emit(name: str, text: str) -> None:
        report.write_atomic(os.path.join(out, name), text)
        outputs.append(name)

    for scope in ("between", "within"):
        reports = analytics.collapse_report(data, scope, results)
        emit(f"{scope}.csv", report.collapse_csv(reports, scope))
        emit(f"coverage_{scope}.csv", report.coverage_csv(results, scope))
        ctx_graphs = graphs.context_graphs(data, results, scope)
        colorings = {
            ctx: (g, graphs.chromatic_number(g, exact_node_limit=exact_limit))
            for ctx, g in ctx_graphs.items()
        }
        emit(f"containers_{scope}.json", report.containers_json(colorings))
        for ctx, (g, coloring) in sorted(colorings.items()):
            emit(
                f"graph_{scope}_{ctx}.dot",
                graphs.to_dot(g, name=f"{scope}_{ctx}", coloring=coloring),
            )

    emit("diffusion.csv", report.diffusion_csv(
        analytics.diffusion_histograms(data, results)
    ))
    emit("overlap.json", report.overlap_json(analytics.mechanism_overlap(results)))
    emit("anova.csv", report.anova_csv(data, results))
    report.write_manifest(
        out,
        "analyze",
        {
            "corpus": corpus,
            "context_map": context_map,
            "config": config,
            "keywords": keywords,
            "suffix_table": suffix_table,
        },
        outputs,
        seed=seed,
    )


@main.command("simulate")
@click.option("--plan", default=None, type=click.Path(exists=True))
@click.option("--out", required=True, type=click.Path())
@click.option("--seed", default=None, type=int)
def cmd_simulate(plan, out, seed):
    """Generate a synthetic corpus plus its ground truth."""
    try:
        sim_plan = SimPlan.from_file(plan) if plan else default_plan(seed or 0)
        if seed is not None and plan:
            sim_plan = SimPlan(
                contexts=sim_plan.contexts,
                sites_per_context=sim_plan.sites_per_context,
                days=sim_plan.days,
                planted=sim_plan.planted,
                seed=seed,
                decoys_per_criterion=sim_plan.decoys_per_criterion,
            )
        corpus, truth = generate(sim_plan)
    except PlanError as exc:
        _fail(str(exc))

    os.makedirs(out, exist_ok=True)
    dump_corpus(corpus, os.path.join(out, "corpus.jsonl"))
    report.write_atomic(os.path.join(out, "ground_truth.json"), truth.to_json())
    map_lines = "".join(
        f"{site}\t{ctx}\n" for site, ctx in sorted(corpus.site_context_map.items())
    )
    report.write_atomic(os.path.join(out, "context_map.tsv"), map_lines)
    report.write_manifest(
        out,
        "simulate",
        {"plan": plan},
        ["corpus.jsonl", "ground_truth.json", "context_map.tsv"],
        seed=sim_plan.seed,
    )
    click.echo(
        f"wrote corpus with {len(corpus.runs)} runs and"
        f" {len(truth.between)} expected between-context findings"
    )


@main.command("containers")
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--context-map", default=None, type=click.Path())
@click.option("--suffix-table", default=None, type=click.Path(exists=True))
@click.option("--origin", required=True)
@click.option("--scope", type=click.Choice(["between", "within"]), default="within",
              show_default=True)
@click.option("--out", required=True, type=click.Path())
@click.option("--exact-limit", default=graphs.DEFAULT_EXACT_NODE_LIMIT, show_default=True)
def cmd_containers(corpus, context_map, suffix_table, origin, scope, out, exact_limit):
    """Color one context's site graph and write its container table."""
    data = _load(corpus, context_map, suffix_table)
    if origin not in data.contexts:
        _fail(f"unknown context {origin!r}")
    results = analytics.analyze_corpus(data)
    ctx_graphs = graphs.context_graphs(data, results, scope)
    graph = ctx_graphs.get(
        origin, graphs.SiteGraph(nodes={}, edges={})
    )
    coloring = graphs.chromatic_number(graph, exact_node_limit=exact_limit)
    report.write_atomic(out, report.containers_table(coloring))
    click.echo(f"num_colors={coloring.num_colors} exact={coloring.exact}")


if __name__ == "__main__":
    main()
