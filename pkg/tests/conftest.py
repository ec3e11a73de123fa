"""Shared fixture-building helpers for the test suite."""

import functools

from ctxcollapse.model import (
    CookieObservation,
    CrawlRecordSet,
    CrawlRun,
    ScriptObservation,
    SiteVisit,
)

DAY = 86400
T0 = 1_700_000_000


def cookie(setter, value, name="uid", lifetime_days=365, observed_at=T0,
           mechanism="http"):
    expiry = None if lifetime_days is None else observed_at + lifetime_days * DAY
    return CookieObservation(
        setter_domain=setter,
        name=name,
        value=value,
        expiry=expiry,
        mechanism=mechanism,
        observed_at=observed_at,
    )


def script(origin, api_calls, url=None, label=None):
    return ScriptObservation(
        script_origin=origin,
        script_url=url or f"https://{origin}/s.js",
        api_calls=dict(api_calls),
        label=label,
    )


def visit(site, ctx, order, cookies=(), scripts=()):
    return SiteVisit(
        first_party=site,
        context=ctx,
        visit_order=order,
        cookies=tuple(cookies),
        scripts=tuple(scripts),
    )


def run(day, origin, order, visits):
    return CrawlRun(
        day_index=day,
        origin_context=origin,
        context_order=tuple(order),
        visits=tuple(visits),
    )


ACCEPTANCE_RESULTS = []


def acceptance(number, description):
    """Record one pass/fail summary line per acceptance criterion."""

    def wrap(fn):
        @functools.wraps(fn)
        def inner(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                ACCEPTANCE_RESULTS.append(
                    (number, f"FAIL criterion {number}: {description}")
                )
                raise
            ACCEPTANCE_RESULTS.append(
                (number, f"PASS criterion {number}: {description}")
            )

        return inner

    return wrap


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_RESULTS):
            terminalreporter.write_line(line)


def corpus(runs, site_ctx, contexts=None):
    if contexts is None:
        contexts = {c for r in runs for c in r.context_order} | set(site_ctx.values())
    return CrawlRecordSet(
        runs=tuple(runs),
        contexts=frozenset(contexts),
        site_context_map=dict(site_ctx),
    )
