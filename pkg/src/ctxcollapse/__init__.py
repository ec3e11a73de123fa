"""Persistent browser-identification analysis for web-crawl corpora."""

from ctxcollapse.analytics import (
    CorpusFindings,
    PersistentIdentifierFinding,
    analyze_corpus,
    between_context_findings,
    collapse_report,
    coverage_distribution,
    diffusion_distance,
    diffusion_histograms,
    mechanism_overlap,
    within_context_findings,
)
from ctxcollapse.anova import one_way_anova, regularized_incomplete_beta
from ctxcollapse.classifier import (
    ClassifierConfig,
    CookieHistory,
    classify_cookie,
    id_cookies_per_tracker,
)
from ctxcollapse.fingerprint import (
    compute_keyword_stats,
    fingerprinting_trackers,
    flag_keywords,
    load_keywords,
)
from ctxcollapse.graphs import (
    Coloring,
    SiteGraph,
    build_site_graph,
    chromatic_number,
    container_assignment,
    degree_report,
)
from ctxcollapse.ingestion import SuffixTable, load_corpus, normalize_domain
from ctxcollapse.model import (
    CookieObservation,
    CrawlRecordSet,
    CrawlRun,
    ScriptObservation,
    SiteVisit,
    dump_corpus,
    validate_corpus,
)
from ctxcollapse.similarity import ratcliff_obershelp
from ctxcollapse.simulate import PlantedTracker, SimPlan, default_plan, generate

__version__ = "0.1.0"
