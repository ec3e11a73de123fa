"""Synthetic crawl-corpus generation with planted ground truth.

Produces multi-day corpora with rotating priority contexts, planted
trackers (cookie, fingerprint, or both), and decoy cookies that each
violate exactly one classifier criterion, so the whole pipeline can be
checked against a known answer.  Generation is deterministic per seed.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Optional

from ctxcollapse.fingerprint import load_keywords
from ctxcollapse.model import (
    CookieObservation,
    CrawlRecordSet,
    CrawlRun,
    ScriptObservation,
    SiteVisit,
)

BASE_TIME = 1_700_000_000
SECONDS_PER_DAY = 86400

# one alphabet per day (cycled); disjoint alphabets guarantee near-zero
# cross-day similarity for fresh-per-day cookie values
_DAY_ALPHABETS = (
    "0123456789",
    "abcdefghij",
    "klmnopqrst",
    "uvwxyzABCD",
    "EFGHIJKLMN",
    "OPQRSTUVWX",
)

DECOY_FAMILIES = {
    "short_lifetime": "lifetime",
    "bad_length": "length",
    "intra_unstable": "intra_stability",
    "inter_stable": "inter_variability",
}


class PlanError(ValueError):
    """Raised for structurally invalid simulation plans."""


@dataclass(frozen=True)
class PlantedTracker:
    tracker: str
    mechanism: str  # "cookie", "fingerprint", or "both"
    target_sites: tuple[tuple[str, str], ...]  # (site, context)
    value_policy: str = "fresh_per_day"  # or "stable_within_day"
    lifetime_days: int = 365
    cookie_name: str = "uid"


@dataclass(frozen=True)
class SimPlan:
    contexts: tuple[str, ...]
    sites_per_context: int
    days: int
    planted: tuple[PlantedTracker, ...] = ()
    seed: int = 0
    decoys_per_criterion: int = 1

    @classmethod
    def from_file(cls, path) -> "SimPlan":
        with open(path, encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise PlanError(f"{path}: invalid JSON: {exc}") from exc
        try:
            planted = tuple(
                PlantedTracker(
                    tracker=p["tracker"],
                    mechanism=p["mechanism"],
                    target_sites=tuple(
                        (site, ctx) for site, ctx in p["target_sites"]
                    ),
                    value_policy=p.get("value_policy", "fresh_per_day"),
                    lifetime_days=p.get("lifetime_days", 365),
                    cookie_name=p.get("cookie_name", "uid"),
                )
                for p in raw.get("planted", [])
            )
            return cls(
                contexts=tuple(raw["contexts"]),
                sites_per_context=raw["sites_per_context"],
                days=raw["days"],
                planted=planted,
                seed=raw.get("seed", 0),
                decoys_per_criterion=raw.get("decoys_per_criterion", 1),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise PlanError(f"{path}: malformed plan: {exc}") from exc


@dataclass(frozen=True)
class GroundTruth:
    """Expected pipeline output for a generated corpus."""

    # (day, origin, tracker, mechanism, sites, distance)
    between: frozenset[tuple[int, str, str, str, frozenset[str], int]]
    # (day, origin, tracker, mechanism, sites) for the run's origin context
    within: frozenset[tuple[int, str, str, str, frozenset[str]]]
    # (scope, origin) -> {(a, b): trackers}
    edges: dict[tuple[str, str], dict[tuple[str, str], frozenset[str]]]
    id_cookies: dict[str, str]
    fp_sites: dict[str, frozenset[str]]
    decoy_criteria: dict[str, str]

    def to_json(self) -> str:
        payload = {
            "between": sorted(
                [d, o, t, m, sorted(s), dist]
                for d, o, t, m, s, dist in self.between
            ),
            "within": sorted(
                [d, o, t, m, sorted(s)] for d, o, t, m, s in self.within
            ),
            "edges": {
                f"{scope}/{origin}": {
                    f"{a}->{b}": sorted(trackers)
                    for (a, b), trackers in sorted(edge_map.items())
                }
                for (scope, origin), edge_map in sorted(self.edges.items())
            },
            "id_cookies": dict(sorted(self.id_cookies.items())),
            "fp_sites": {
                t: sorted(s) for t, s in sorted(self.fp_sites.items())
            },
            "decoy_criteria": dict(sorted(self.decoy_criteria.items())),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _sites_for(plan: SimPlan) -> dict[str, list[str]]:
    sites: dict[str, list[str]] = {
        ctx: [f"{ctx}-{i:03d}.com" for i in range(plan.sites_per_context)]
        for ctx in plan.contexts
    }
    for plant in plan.planted:
        for site, ctx in plant.target_sites:
            if ctx not in sites:
                raise PlanError(
                    f"plant {plant.tracker!r} references unknown context {ctx!r}"
                )
            if site not in sites[ctx]:
                sites[ctx].append(site)
    return sites


def _value(rng: random.Random, alphabet: str, length: int = 16) -> str:
    return "".join(rng.choice(alphabet) for _ in range(length))


def _is_id_plant(plant: PlantedTracker, days: int) -> bool:
    return (
        plant.mechanism in ("cookie", "both")
        and plant.value_policy == "fresh_per_day"
        and plant.lifetime_days > 90
        and days >= 2
    )


def generate(plan: SimPlan) -> tuple[CrawlRecordSet, GroundTruth]:
    """Build the corpus and its expected analysis results.

    Each (day, origin context) pair yields one run whose context order
    starts with the origin followed by the remaining contexts in seeded
    random order.  Ground truth is derived from the plant specifications
    and the generated orders, not from the analysis code.
    """
    if len(set(plan.contexts)) != len(plan.contexts) or not plan.contexts:
        raise PlanError("contexts must be non-empty and distinct")
    if plan.days < 1 or plan.sites_per_context < 1:
        raise PlanError("days and sites_per_context must be positive")
    for plant in plan.planted:
        if plant.mechanism not in ("cookie", "fingerprint", "both"):
            raise PlanError(f"unknown mechanism {plant.mechanism!r}")
        if not plant.target_sites:
            raise PlanError(f"plant {plant.tracker!r} has no target sites")
    has_cookie_plants = any(
        _is_id_plant(p, plan.days) or p.mechanism in ("cookie", "both")
        for p in plan.planted
    )
    if has_cookie_plants and plan.days < 2:
        raise PlanError("cookie plants need at least two days to qualify")

    sites = _sites_for(plan)
    site_context_map = {
        site: ctx for ctx, ctx_sites in sites.items() for site in ctx_sites
    }

    rng_values = random.Random(f"{plan.seed}:values")
    plant_values: dict[tuple[str, int], str] = {}
    for plant in plan.planted:
        if plant.mechanism == "fingerprint":
            continue
        if plant.value_policy == "stable_within_day":
            stable = _value(rng_values, _DAY_ALPHABETS[0])
            for day in range(plan.days):
                plant_values[(plant.tracker, day)] = stable
        else:
            for day in range(plan.days):
                alphabet = _DAY_ALPHABETS[day % len(_DAY_ALPHABETS)]
                plant_values[(plant.tracker, day)] = _value(rng_values, alphabet)

    decoys = _decoy_specs(plan, rng_values)
    fp_keywords = sorted(load_keywords())[:2]

    runs = []
    for day in range(plan.days):
        for origin in plan.contexts:
            rng_run = random.Random(f"{plan.seed}:{day}:{origin}")
            others = [c for c in plan.contexts if c != origin]
            rng_run.shuffle(others)
            order = (origin, *others)
            visits = []
            visit_order = 0
            for ctx in order:
                for site in sites[ctx]:
                    observed_at = (
                        BASE_TIME + day * SECONDS_PER_DAY + visit_order * 10
                    )
                    cookies = [
                        CookieObservation(
                            setter_domain=site,
                            name="session",
                            value=_value(rng_run, "0123456789abcdef"),
                            expiry=None,
                            mechanism="http",
                            observed_at=observed_at,
                        )
                    ]
                    scripts = [
                        ScriptObservation(
                            script_origin=site,
                            script_url=f"https://{site}/main.js",
                            api_calls={"addEventListener": 2, "querySelector": 1},
                        )
                    ]
                    for plant in plan.planted:
                        if (site, ctx) not in plant.target_sites:
                            continue
                        if plant.mechanism in ("cookie", "both"):
                            cookies.append(
                                CookieObservation(
                                    setter_domain=plant.tracker,
                                    name=plant.cookie_name,
                                    value=plant_values[(plant.tracker, day)],
                                    expiry=observed_at
                                    + plant.lifetime_days * SECONDS_PER_DAY,
                                    mechanism="http",
                                    observed_at=observed_at,
                                )
                            )
                        if plant.mechanism in ("fingerprint", "both"):
                            scripts.append(
                                ScriptObservation(
                                    script_origin=plant.tracker,
                                    script_url=f"https://{plant.tracker}/fp.js",
                                    api_calls={k: 1 for k in fp_keywords},
                                )
                            )
                    for decoy in decoys:
                        cookie = decoy.observation(
                            site, ctx, day, origin, observed_at
                        )
                        if cookie is not None:
                            cookies.append(cookie)
                    visits.append(
                        SiteVisit(
                            first_party=site,
                            context=ctx,
                            visit_order=visit_order,
                            cookies=tuple(cookies),
                            scripts=tuple(scripts),
                        )
                    )
                    visit_order += 1
            runs.append(
                CrawlRun(
                    day_index=day,
                    origin_context=origin,
                    context_order=order,
                    visits=tuple(visits),
                )
            )

    corpus = CrawlRecordSet(
        runs=tuple(runs),
        contexts=frozenset(plan.contexts),
        site_context_map=site_context_map,
    )
    truth = _ground_truth(plan, corpus, decoys)
    return corpus, truth


@dataclass(frozen=True)
class _DecoySpec:
    tracker: str
    family: str
    sites: tuple[tuple[str, str], ...]  # (site, context)
    day_values: tuple[str, ...]  # indexed by day, family-specific semantics

    def observation(
        self, site: str, ctx: str, day: int, origin: str, observed_at: int
    ) -> Optional[CookieObservation]:
        if (site, ctx) not in self.sites:
            return None
        value = self.day_values[day]
        lifetime_days = 365
        if self.family == "short_lifetime":
            lifetime_days = 10
        elif self.family == "intra_unstable":
            # distinct value per run within the day
            value = f"{value}-{origin}"
        return CookieObservation(
            setter_domain=self.tracker,
            name="uid",
            value=value,
            expiry=observed_at + lifetime_days * SECONDS_PER_DAY,
            mechanism="js",
            observed_at=observed_at,
        )


def _decoy_specs(plan: SimPlan, rng: random.Random) -> list[_DecoySpec]:
    all_sites = [
        (f"{ctx}-{i:03d}.com", ctx)
        for ctx in plan.contexts
        for i in range(plan.sites_per_context)
    ]
    specs = []
    for family in sorted(DECOY_FAMILIES):
        for i in range(plan.decoys_per_criterion):
            chosen = tuple(rng.sample(all_sites, min(2, len(all_sites))))
            if family == "bad_length":
                day_values = tuple(
                    _value(rng, _DAY_ALPHABETS[d % len(_DAY_ALPHABETS)], 4)
                    for d in range(plan.days)
                )
            elif family == "inter_stable":
                stable = _value(rng, _DAY_ALPHABETS[0])
                day_values = tuple(stable for _ in range(plan.days))
            else:
                day_values = tuple(
                    _value(rng, _DAY_ALPHABETS[d % len(_DAY_ALPHABETS)])
                    for d in range(plan.days)
                )
            specs.append(
                _DecoySpec(
                    tracker=f"decoy-{family.replace('_', '')}-{i}.net",
                    family=family,
                    sites=chosen,
                    day_values=day_values,
                )
            )
    return specs


def _ground_truth(
    plan: SimPlan, corpus: CrawlRecordSet, decoys: list[_DecoySpec]
) -> GroundTruth:
    id_cookies = {
        p.tracker: p.cookie_name
        for p in plan.planted
        if _is_id_plant(p, plan.days)
    }
    fp_sites = {
        p.tracker: frozenset(site for site, _ in p.target_sites)
        for p in plan.planted
        if p.mechanism in ("fingerprint", "both")
    }

    between = set()
    within = set()
    edges: dict[tuple[str, str], dict[tuple[str, str], set[str]]] = {}

    def add_clique(scope: str, origin: str, ordered_sites: list[str], tracker: str):
        edge_map = edges.setdefault((scope, origin), {})
        for i, a in enumerate(ordered_sites):
            for b in ordered_sites[i + 1 :]:
                edge_map.setdefault((a, b), set()).add(tracker)

    for run in corpus.runs:
        positions = {ctx: i for i, ctx in enumerate(run.context_order)}
        visit_order = {v.first_party: v.visit_order for v in run.visits}
        for plant in plan.planted:
            cookie_ok = plant.tracker in id_cookies
            fp_ok = (
                plant.tracker in fp_sites and len(fp_sites[plant.tracker]) >= 2
            )
            if not (cookie_ok or fp_ok):
                continue
            mechanism = (
                "both"
                if cookie_ok and fp_ok
                else ("cookie" if cookie_ok else "fingerprint")
            )
            plant_positions = {positions[ctx] for _, ctx in plant.target_sites}
            all_sites = sorted(
                {site for site, _ in plant.target_sites},
                key=lambda s: visit_order[s],
            )
            if 0 in plant_positions and any(p > 0 for p in plant_positions):
                distance = max(plant_positions)
                between.add(
                    (
                        run.day_index,
                        run.origin_context,
                        plant.tracker,
                        mechanism,
                        frozenset(all_sites),
                        distance,
                    )
                )
                add_clique(
                    "between", run.origin_context, all_sites, plant.tracker
                )
            origin_sites = sorted(
                {
                    site
                    for site, ctx in plant.target_sites
                    if ctx == run.origin_context
                },
                key=lambda s: visit_order[s],
            )
            if len(origin_sites) >= 2:
                within.add(
                    (
                        run.day_index,
                        run.origin_context,
                        plant.tracker,
                        mechanism,
                        frozenset(origin_sites),
                    )
                )
                add_clique(
                    "within", run.origin_context, origin_sites, plant.tracker
                )

    return GroundTruth(
        between=frozenset(between),
        within=frozenset(within),
        edges={
            key: {e: frozenset(t) for e, t in edge_map.items()}
            for key, edge_map in edges.items()
        },
        id_cookies=id_cookies,
        fp_sites=fp_sites,
        decoy_criteria={d.tracker: DECOY_FAMILIES[d.family] for d in decoys},
    )


DEFAULT_CONTEXTS = (
    "adult",
    "ecommerce",
    "education",
    "finance",
    "health",
    "lgbtq",
    "news_media",
)


def default_plan(
    seed: int = 0,
    contexts: tuple[str, ...] = DEFAULT_CONTEXTS,
    sites_per_context: int = 20,
    days: int = 3,
    n_planted: int = 12,
) -> SimPlan:
    """Deterministic plan with a mix of cookie, fingerprint, and dual plants."""
    rng = random.Random(f"plan:{seed}")
    mechanisms = ("cookie", "cookie", "fingerprint", "both")
    planted = []
    for i in range(n_planted):
        mechanism = mechanisms[i % len(mechanisms)]
        n_contexts = rng.randint(1, min(3, len(contexts)))
        chosen_contexts = rng.sample(list(contexts), n_contexts)
        targets = []
        for ctx in chosen_contexts:
            n_sites = rng.randint(1, 3) if n_contexts > 1 else rng.randint(2, 3)
            indices = rng.sample(range(sites_per_context), n_sites)
            targets.extend((f"{ctx}-{j:03d}.com", ctx) for j in sorted(indices))
        if len({s for s, _ in targets}) < 2:
            # every plant must be able to link at least two sites
            ctx = targets[0][1]
            j = (int(targets[0][0].split("-")[-1].split(".")[0]) + 1) % sites_per_context
            targets.append((f"{ctx}-{j:03d}.com", ctx))
        planted.append(
            PlantedTracker(
                tracker=f"plant-{i:02d}.net",
                mechanism=mechanism,
                target_sites=tuple(sorted(set(targets))),
            )
        )
    return SimPlan(
        contexts=contexts,
        sites_per_context=sites_per_context,
        days=days,
        planted=tuple(planted),
        seed=seed,
    )
