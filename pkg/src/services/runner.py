# src/services/runner.py
"""Commands shared by the CLI and the HTTP endpoints.

Every command takes a decoded ``InputDocument`` (or a named fixture) and
``RunOptions`` and returns a ``RunReport``. Domain precondition failures
propagate as ``CovalgError``; failed identities only flip ``passed``.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Any, Callable

import msgspec
import numpy as np

from src.exceptions import MalformedInput
from src.models.algebra import matrix_norm
from src.models.crossed_product import CrossedProductElement, from_words, random_crossed_element
from src.models.interaction import CheckItem, Interaction, InteractionReport
from src.models.representation import CovariantRep, RegularAmplification
from src.schemas.payloads import (
    InputDocument,
    build_crossed_element,
    build_element,
    build_interaction,
    build_rep,
    interaction_of,
)
from src.services import corpus
from src.services.covariance import certify_power_partial_isometries, property_star_check, verify_covariant
from src.services.dynamics import coefficient_recovery_check, partial_dynamics, topological_freedom_check
from src.services.interactions import (
    check_central_multiplicativity,
    check_complete,
    check_conditional_expectations,
    check_hereditary_ranges,
    check_interaction,
    check_projection_family,
    derive_dual_from_projections,
    derive_dual_from_rep,
    dual_agreement,
)
from src.services.norms import norm_enclosure

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
NORM_SLACK = 1e-8


class RunOptions(msgspec.Struct, kw_only=True):
    tol: float = 1e-9
    seed: int = 0
    samples: int = 24
    x_max: int = 4
    max_k: int = 3
    window: int = 8
    grid_size: int = 1024

    @classmethod
    def from_config(cls, config, **overrides) -> "RunOptions":
        values = {
            "tol": config.get("TOLERANCE", 1e-9),
            "seed": config.get("SEED", 0),
            "samples": config.get("SAMPLES", 24),
            "x_max": config.get("X_MAX", 4),
            "max_k": config.get("MAX_K", 3),
            "window": config.get("WINDOW", 8),
            "grid_size": config.get("GRID_SIZE", 1024),
        }
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)

    def with_document(self, doc: "InputDocument | None", pinned=()) -> "RunOptions":
        """Take ``x_max`` from the document unless the caller pinned it."""
        if doc is None or doc.x_max is None or "x_max" in pinned:
            return self
        return msgspec.structs.replace(self, x_max=doc.x_max)

    def validate(self) -> "RunOptions":
        if self.tol < 0 or self.samples < 0 or self.x_max < 1 or self.max_k < 1 or self.window < 1:
            raise MalformedInput(f"invalid options: {self}")
        return self


class RunReport(msgspec.Struct, kw_only=True):
    schema_version: int = SCHEMA_VERSION
    command: str
    options: RunOptions
    passed: bool
    checks: list[CheckItem] = msgspec.field(default_factory=list)
    details: dict[str, Any] = msgspec.field(default_factory=dict)
    timings: dict[str, float] = msgspec.field(default_factory=dict)


@dataclass
class Context:
    """What a command runs on: an interaction, maybe a representation."""

    interaction: Interaction
    rep: CovariantRep | None = None
    has_dual: bool = True
    doc: InputDocument | None = None


def resolve(doc: InputDocument | None, fixture: str | None, opts: RunOptions) -> Context:
    if fixture is not None:
        try:
            fx = corpus.load_fixture(fixture, opts.tol)
        except ValueError as e:
            raise MalformedInput(str(e)) from e
        return Context(fx.interaction, fx.rep, True, doc)
    if doc is None:
        raise MalformedInput("no input given")
    payload = interaction_of(doc)
    I = build_interaction(payload, opts.tol)
    rep = build_rep(I.algebra, doc.rep, opts.tol) if doc.rep is not None else None
    return Context(I, rep, payload.H is not None, doc)


def _items(report: InteractionReport) -> list[CheckItem]:
    return list(report.items)


def _flag(name: str, x: int, ok: bool, witness=None, informational=False) -> CheckItem:
    return CheckItem(name=name, x=x, passed=bool(ok), residual=0.0 if ok else 1.0,
                     witness=None if ok else witness, informational=informational)


def _elements(ctx: Context, opts: RunOptions, rng) -> list[CrossedProductElement]:
    """Elements from the input, or random ones over a fixture."""
    doc = ctx.doc
    I = ctx.interaction
    out = []
    if doc is not None and doc.element is not None:
        out.append(build_crossed_element(doc.element, I))
    if doc is not None and doc.elements is not None:
        out.extend(build_crossed_element(e, I) for e in doc.elements)
    if not out:
        count = max(1, opts.samples // 4)
        out = [random_crossed_element(I, rng) for _ in range(count)]
    return out


def _report(command: str, opts: RunOptions, checks, details=None, passed=None) -> RunReport:
    checks = list(checks)
    if passed is None:
        passed = all(c.passed for c in checks if not c.informational)
    return RunReport(command=command, options=opts, passed=passed, checks=checks, details=details or {})


def check_interaction_command(ctx: Context, opts: RunOptions, rng) -> RunReport:
    I = ctx.interaction
    report = check_interaction(I, opts.x_max, opts.samples, opts.tol, rng)
    if report.passed:
        report.extend(check_projection_family(I, opts.x_max, opts.samples, opts.tol, rng))
        for x in range(1, opts.x_max + 1):
            report.extend(check_conditional_expectations(I, x, opts.samples, opts.tol, rng))
    return _report("check-interaction", opts, report.items, {"certified_up_to": I.certified_up_to})


def check_complete_command(ctx: Context, opts: RunOptions, rng) -> RunReport:
    I = ctx.interaction
    report = check_complete(I, opts.x_max, opts.samples, opts.tol, rng)
    if report.passed:
        report.extend(check_hereditary_ranges(I, opts.x_max, opts.tol))
    report.extend(check_central_multiplicativity(I, opts.x_max, opts.samples, opts.tol, rng))
    return _report("check-complete", opts, report.items, {"complete_up_to": I.complete_up_to})


def derive_dual_command(ctx: Context, opts: RunOptions, rng) -> RunReport:
    I = ctx.interaction
    algebra = I.algebra
    doc = ctx.doc
    derived = {}
    U1 = ctx.rep.U1 if ctx.rep is not None else None
    if U1 is not None:
        derived["rep"] = derive_dual_from_rep(I.V, U1, opts.tol)
    projections = None
    if doc is not None and doc.projections is not None:
        projections = [build_element(algebra, blocks) for blocks in doc.projections]
    elif ctx.has_dual and doc is None:
        projections = [I.h1(x) for x in range(1, opts.x_max + 1)]
    if projections:
        derived["projections"] = derive_dual_from_projections(I.V, projections, opts.tol)
    if not derived:
        raise MalformedInput("derive-dual needs a representation or a projection family")
    reach = min(opts.x_max, len(projections)) if projections else opts.x_max
    checks = []
    details = {"methods": sorted(derived)}
    for method, H in derived.items():
        details[f"H1_{method}"] = H.superoperator(1)
        if ctx.has_dual:
            gap = dual_agreement(H, I.H, reach, algebra)
            checks.append(CheckItem(name=f"matches_given_dual_{method}", x=reach, passed=gap <= opts.tol,
                                    residual=gap))
    if len(derived) == 2:
        gap = dual_agreement(derived["rep"], derived["projections"], reach, algebra)
        checks.append(CheckItem(name="methods_agree", x=reach, passed=gap <= opts.tol, residual=gap))
    return _report("derive-dual", opts, checks, details)


def _need_rep(ctx: Context, command: str) -> CovariantRep:
    if ctx.rep is None:
        raise MalformedInput(f"{command} needs a representation")
    return ctx.rep


def verify_rep_command(ctx: Context, opts: RunOptions, rng) -> RunReport:
    rep = _need_rep(ctx, "verify-rep")
    report = verify_covariant(rep, ctx.interaction, opts.x_max, opts.samples, opts.tol, rng)
    certificate = certify_power_partial_isometries(rep, opts.tol)
    checks = _items(report) + [_flag("power_partial_isometries", certificate.checked_up_to,
                                     certificate.certified)]
    return _report("verify-rep", opts, checks, {"power_certificate": certificate})


def norm_command(ctx: Context, opts: RunOptions, rng) -> RunReport:
    I = ctx.interaction
    checks, enclosures = [], []
    for index, a in enumerate(_elements(ctx, opts, rng)):
        enclosure = norm_enclosure(a, I, opts.max_k)
        entry = {"enclosure": enclosure}
        checks.append(_flag("growth_bound", index, enclosure.growth_ok, enclosure.growth_trace))
        checks.append(_flag("enclosure_ordered", index, enclosure.lower <= enclosure.upper))
        if ctx.rep is not None and a.max_degree:
            window = max(opts.window, 2 * opts.max_k * a.max_degree)
            value = matrix_norm(RegularAmplification(ctx.rep, window).evaluate(a))
            entry.update(window=window, amplified_norm=value)
            checks.append(_flag("amplified_norm_enclosed", index, enclosure.contains(value, NORM_SLACK), value))
        enclosures.append(entry)
    return _report("norm", opts, checks, {"elements": enclosures})


def property_star_command(ctx: Context, opts: RunOptions, rng) -> RunReport:
    rep = _need_rep(ctx, "property-star")
    checks, margins = [], []
    for index, a in enumerate(_elements(ctx, opts, rng)):
        verdict = property_star_check(rep, a, opts.tol)
        checks.append(CheckItem(name="property_star", x=index, passed=verdict.passed,
                                residual=verdict.residual, witness=verdict.witness))
        margins.append(verdict.detail["margin"])
    return _report("property-star", opts, checks, {"margins": margins})


def topfree_command(ctx: Context, opts: RunOptions, rng) -> RunReport:
    I = ctx.interaction
    dynamics = partial_dynamics(I, opts.x_max, opts.tol)
    verdict = topological_freedom_check(I, opts.x_max, opts.tol)
    checks = [
        _flag("topological_freedom", opts.x_max, verdict.verdict, verdict.fixed_points),
        _flag("partial_map_semigroup", opts.x_max, dynamics.semigroup_ok),
    ]
    details = {"verdict": verdict, "dynamics": dynamics}
    if verdict.verdict and ctx.rep is not None and ctx.doc is not None and ctx.doc.elements:
        samples = [build_crossed_element(e, I) for e in ctx.doc.elements]
        margins = coefficient_recovery_check(ctx.rep, I, samples, opts.tol)
        details["coefficient_recovery"] = margins
        checks.append(_flag("coefficient_recovery", opts.x_max, margins.passed))
    return _report("topfree", opts, checks, details)


def _example_report(run: corpus.ExampleRun, opts: RunOptions, extra=None) -> RunReport:
    details = dict(run.details)
    details["expected_failures"] = sorted(run.expected_failures)
    details.update(extra or {})
    return _report(f"example {run.name}", opts, run.report.items, details, passed=run.as_expected)


def _trivial_counterexample(opts: RunOptions) -> corpus.ExampleRun:
    fx = corpus.trivial_fixture(opts.tol)
    run = corpus.fixture_run(fx, opts.x_max, opts.samples, opts.tol, np.random.default_rng(opts.seed))
    unit = fx.algebra.unit()
    a = from_words(fx.algebra, [((unit,), ()), ((-1.0 * unit, unit), (1,))], fx.interaction)
    verdict = property_star_check(fx.rep, a, opts.tol)
    run.report.items.append(CheckItem(name="property_star", x=1, passed=verdict.passed,
                                      residual=verdict.residual, witness=verdict.witness))
    freedom = topological_freedom_check(fx.interaction, opts.x_max, opts.tol)
    run.report.items.append(_flag("topological_freedom", opts.x_max, freedom.verdict, freedom.fixed_points))
    run.expected_failures |= {("property_star", 1), ("topological_freedom", opts.x_max)}
    run.details["fixed_points"] = freedom.fixed_points
    return run


def example_command(name: str, opts: RunOptions, rng, rho: str = "half", n: int | None = None,
                    orbit: str = "doubling") -> RunReport:
    if name == "ex23":
        return _example_report(corpus.example_2_3(opts.samples, opts.tol, rng), opts)
    if name == "ex31":
        n_max = n if n is not None else 2
        try:
            run = corpus.example_3_1(rho, n_max, opts.grid_size, orbit, opts.samples, opts.tol, rng)
        except ValueError as e:
            raise MalformedInput(str(e)) from e
        return _example_report(run, opts)
    if name == "shift":
        fx = corpus.shift_fixture(n if n is not None else 4, opts.tol)
        run = corpus.fixture_run(fx, opts.x_max, opts.samples, opts.tol, rng)
        freedom = topological_freedom_check(fx.interaction, opts.x_max, opts.tol)
        run.report.items.append(_flag("topological_freedom", opts.x_max, freedom.verdict, freedom.fixed_points))
        return _example_report(run, opts)
    if name == "trivial":
        return _example_report(_trivial_counterexample(opts), opts)
    raise MalformedInput(f"unknown example {name!r}, expected one of {corpus.EXAMPLES}")


COMMANDS: dict[str, Callable] = {
    "check-interaction": check_interaction_command,
    "check-complete": check_complete_command,
    "derive-dual": derive_dual_command,
    "verify-rep": verify_rep_command,
    "norm": norm_command,
    "property-star": property_star_command,
    "topfree": topfree_command,
}


def run_command(command: str, doc: InputDocument | None, opts: RunOptions, fixture: str | None = None) -> RunReport:
    """Resolve the input, run ``command`` with a generator seeded from
    ``opts.seed`` and stamp the elapsed time."""
    if command not in COMMANDS:
        raise MalformedInput(f"unknown command {command!r}")
    opts.validate()
    started = time.perf_counter()
    rng = np.random.default_rng(opts.seed)
    ctx = resolve(doc, fixture, opts)
    report = COMMANDS[command](ctx, opts, rng)
    report.timings["total_seconds"] = time.perf_counter() - started
    logger.info("%s finished: passed=%s", command, report.passed)
    return report


def run_example(name: str, opts: RunOptions, **kwargs) -> RunReport:
    opts.validate()
    started = time.perf_counter()
    report = example_command(name, opts, np.random.default_rng(opts.seed), **kwargs)
    report.timings["total_seconds"] = time.perf_counter() - started
    logger.info("example %s finished: passed=%s", name, report.passed)
    return report
