import json

import pytest

from ctxcollapse import analytics
from ctxcollapse.classifier import build_histories, classify_cookie
from ctxcollapse.model import dump_corpus, validate_corpus
from ctxcollapse.simulate import (
    DECOY_FAMILIES,
    PlanError,
    PlantedTracker,
    SimPlan,
    default_plan,
    generate,
)

SMALL = dict(sites_per_context=4, days=2, n_planted=6)


def test_same_seed_same_bytes(tmp_path):
    c1, t1 = generate(default_plan(seed=5, **SMALL))
    c2, t2 = generate(default_plan(seed=5, **SMALL))
    p1, p2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
    dump_corpus(c1, p1)
    dump_corpus(c2, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert t1.to_json() == t2.to_json()


def test_different_seeds_differ(tmp_path):
    c1, _ = generate(default_plan(seed=1, **SMALL))
    c2, _ = generate(default_plan(seed=2, **SMALL))
    assert c1 != c2


def test_output_passes_validation():
    generated, _ = generate(default_plan(seed=3, **SMALL))
    assert validate_corpus(generated) == []


def test_one_run_per_day_and_context():
    plan = default_plan(seed=0, **SMALL)
    generated, _ = generate(plan)
    keys = {(r.day_index, r.origin_context) for r in generated.runs}
    assert keys == {
        (d, c) for d in range(plan.days) for c in plan.contexts
    }
    for r in generated.runs:
        assert r.context_order[0] == r.origin_context
        assert sorted(r.context_order) == sorted(plan.contexts)


def test_decoys_fail_exactly_their_criterion():
    plan = default_plan(seed=8, **SMALL)
    generated, truth = generate(plan)
    histories = build_histories(generated)
    seen = set()
    for (tracker, name, site), hist in histories.items():
        if tracker not in truth.decoy_criteria:
            continue
        verdict = classify_cookie(hist)
        assert verdict.failed_criteria == frozenset(
            {truth.decoy_criteria[tracker]}
        ), (tracker, site)
        seen.add(truth.decoy_criteria[tracker])
    assert seen == set(DECOY_FAMILIES.values())


def test_decoys_never_reach_id_map():
    generated, truth = generate(default_plan(seed=8, **SMALL))
    results = analytics.analyze_corpus(generated)
    assert not set(results.id_map) & set(truth.decoy_criteria)


def test_zero_plants_zero_findings():
    plan = SimPlan(contexts=("a", "b", "c"), sites_per_context=3, days=2)
    generated, truth = generate(plan)
    assert truth.between == frozenset() and truth.within == frozenset()
    results = analytics.analyze_corpus(generated)
    assert all(not f for f in results.between_by_run.values())
    assert all(not f for f in results.within_by_run.values())


def test_analysis_matches_ground_truth():
    for seed in range(3):
        generated, truth = generate(default_plan(seed=seed, **SMALL))
        results = analytics.analyze_corpus(generated)
        assert results.id_map == truth.id_cookies
        assert results.fp_map == truth.fp_sites
        got_between = frozenset(
            (
                run_key[0],
                run_key[1],
                f.tracker,
                f.mechanism,
                f.sites,
                analytics.diffusion_distance(
                    f,
                    next(
                        r for r in generated.runs
                        if (r.day_index, r.origin_context) == run_key
                    ),
                ),
            )
            for run_key, findings in results.between_by_run.items()
            for f in findings
        )
        assert got_between == truth.between
        got_within = frozenset(
            (run_key[0], run_key[1], f.tracker, f.mechanism, f.sites)
            for run_key, findings in results.within_by_run.items()
            for f in findings
        )
        assert got_within == truth.within


def test_plan_file_round_trip(tmp_path):
    path = tmp_path / "plan.json"
    path.write_text(json.dumps({
        "contexts": ["a", "b"],
        "sites_per_context": 3,
        "days": 2,
        "planted": [{
            "tracker": "t.net",
            "mechanism": "cookie",
            "target_sites": [["a-000.com", "a"], ["b-000.com", "b"]],
        }],
    }))
    plan = SimPlan.from_file(path)
    assert plan.contexts == ("a", "b")
    assert plan.planted[0].target_sites == (("a-000.com", "a"), ("b-000.com", "b"))


def test_plan_file_invalid_json(tmp_path):
    path = tmp_path / "plan.json"
    path.write_text("{nope")
    with pytest.raises(PlanError):
        SimPlan.from_file(path)


def test_plan_file_missing_key(tmp_path):
    path = tmp_path / "plan.json"
    path.write_text('{"contexts": ["a"]}')
    with pytest.raises(PlanError):
        SimPlan.from_file(path)


def test_unknown_mechanism_rejected():
    plan = SimPlan(
        contexts=("a",), sites_per_context=2, days=2,
        planted=(PlantedTracker("t.net", "magic", (("a-000.com", "a"),)),),
    )
    with pytest.raises(PlanError):
        generate(plan)


def test_plant_with_unknown_context_rejected():
    plan = SimPlan(
        contexts=("a",), sites_per_context=2, days=2,
        planted=(PlantedTracker("t.net", "cookie", (("x.com", "zzz"),)),),
    )
    with pytest.raises(PlanError):
        generate(plan)


def test_cookie_plants_need_two_days():
    plan = SimPlan(
        contexts=("a", "b"), sites_per_context=2, days=1,
        planted=(
            PlantedTracker(
                "t.net", "cookie",
                (("a-000.com", "a"), ("b-000.com", "b")),
            ),
        ),
    )
    with pytest.raises(PlanError):
        generate(plan)


def test_empty_contexts_rejected():
    with pytest.raises(PlanError):
        generate(SimPlan(contexts=(), sites_per_context=2, days=1))


def test_stable_value_plant_not_an_id_cookie():
    plan = SimPlan(
        contexts=("a", "b"), sites_per_context=2, days=3,
        planted=(
            PlantedTracker(
                "stable.net", "cookie",
                (("a-000.com", "a"), ("b-000.com", "b")),
                value_policy="stable_within_day",
            ),
        ),
    )
    generated, truth = generate(plan)
    assert truth.id_cookies == {}
    results = analytics.analyze_corpus(generated)
    assert "stable.net" not in results.id_map
