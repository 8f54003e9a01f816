"""Acceptance suite: worked examples and theorem-level checks, one function
per criterion, shared by tests/test_acceptance.py and the selfcheck command."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from . import expr as ex
from .expr import normalize
from .cring import (
    OracleConfig,
    apply_op,
    ideal_member,
    present_ring,
    square_zero,
)
from .derham import Form, d as dform
from .geometry import (
    BasicOpen,
    ClosedSet,
    DiffSpace,
    GermRep,
    IncompatibleFamily,
    Section,
    bump,
    compose_maps,
    germ_invert,
    glue,
    ringed_map,
)
from .integrate import (
    QuadratureRule,
    SimplexMap,
    boundary,
    chart_ring,
    identity_simplex,
    stokes_check,
)
from .kaehler import (
    contract,
    d0,
    enumerate_tangent_derivations,
    kaehler_presentation,
    oneform_member_J,
)
from .randomized import (
    extra_homs,
    random_invertible_expr,
    random_poly_expr,
    run_identity_suites,
    self_hom_pool,
    standard_rings,
)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    runtime_s: float
    limit_s: float | None = None
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.runtime_s:.2f}s)"

    def to_dict(self) -> dict:
        return {
            "criterion": self.number,
            "name": self.name,
            "passed": self.passed,
            "runtime_s": self.runtime_s,
            "limit_s": self.limit_s,
            "details": self.details,
        }


def _timed(number, name, limit, fn) -> CriterionResult:
    start = time.perf_counter()
    try:
        passed, details = fn()
    except Exception as exc:  # a crash is a failure, not an excuse
        elapsed = time.perf_counter() - start
        return CriterionResult(number, name, False, elapsed, limit,
                               {"error": f"{type(exc).__name__}: {exc}"})
    elapsed = time.perf_counter() - start
    if limit is not None and elapsed > limit:
        passed = False
        details["runtime_exceeded"] = elapsed
    return CriterionResult(number, name, passed, elapsed, limit, details)


# ---------------------------------------------------------------------------


def criterion_1(seed: int = 0) -> CriterionResult:
    """Coordinate-cross suite: the defining relation is zero, x1 dx2 is not in
    the relation submodule up to degree 6, and every bounded-degree tangent
    field contracts x1 dx2 into the ideal."""

    def run():
        cross = present_ring(2, ["x1*x2"], OracleConfig(seed=seed))
        module = kaehler_presentation(cross)
        rel = module.element(["x2", "x1"])
        v_rel = oneform_member_J(rel, 6)
        xdy = module.element([0, "x1"])
        v_xdy = oneform_member_J(xdy, 6)
        fields = enumerate_tangent_derivations(cross, 4)
        contractions_ok = True
        for v in fields:
            verdict = ideal_member(cross, contract(v, xdy))
            if verdict.kind != "proved_equal":
                contractions_ok = False
        ok = (
            v_rel.kind == "proved_equal"
            and v_xdy.label() == "NotMemberUpToDegree(6)"
            and fields
            and contractions_ok
        )
        return ok, {
            "relation_in_J": v_rel.label(),
            "x1dx2_in_J": v_xdy.label(),
            "tangent_fields": len(fields),
            "all_contractions_in_ideal": contractions_ok,
        }

    return _timed(1, "coordinate-cross 1-form suite", 5.0, run)


def criterion_2(seed: int = 0) -> CriterionResult:
    """Free rings up to n=5: rank-n relation-free module and the exact
    chain-rule law for the universal derivation on random polynomial ops."""

    def run():
        rng = random.Random(seed)
        ranks_ok = True
        for n in range(1, 6):
            free = present_ring(n, [])
            module = kaehler_presentation(free)
            if module.rank != n or module.relations:
                ranks_ok = False
        free = present_ring(3, [])
        module = kaehler_presentation(free)
        law_failures = 0
        for _ in range(100):
            m = rng.randint(1, 3)
            g = random_poly_expr(rng, m, max_degree=3, max_terms=3)
            elts = [free.element(random_poly_expr(rng, 3)) for _ in range(m)]
            lhs = d0(module, apply_op(free, g, elts))
            rhs = module.zero()
            for j in range(1, m + 1):
                dj = apply_op(free, normalize(ex.partial(g, j)), elts)
                rhs = rhs + d0(module, elts[j - 1]).scale(dj)
            if any(
                a.rep != b.rep for a, b in zip(lhs.coeffs, rhs.coeffs)
            ):
                law_failures += 1
        return (ranks_ok and law_failures == 0), {
            "ranks_ok": ranks_ok,
            "chain_rule_trials": 100,
            "chain_rule_failures": law_failures,
        }

    return _timed(2, "free-ring differential module", 5.0, run)


def criterion_3(seed: int = 0) -> CriterionResult:
    """CDGA laws: d^2, graded Leibniz, graded commutativity, pullback
    compatibility with d and wedge, and the pullback functor law; 100 exact
    randomized checks per suite per ring."""

    def run():
        rings = standard_rings(seed)
        homs = []
        for ring in rings.values():
            homs.extend(self_hom_pool(ring))
        homs.extend(extra_homs(rings))
        all_results = {}
        ok = True
        for name, ring in rings.items():
            for suite in run_identity_suites(ring, 100, seed, homs):
                all_results[f"{name}.{suite.name}"] = suite.failures
                if not suite.passed:
                    ok = False
        return ok, {"failures_by_suite": all_results}

    return _timed(3, "CDGA identity suites", 30.0, run)


def criterion_4(seed: int = 0) -> CriterionResult:
    """Stokes on a 20-case suite (identity triangle at 1e-8, trigonometric
    maps into the circle ring, random polynomial data) and exact dd = 0
    for chains up to dimension 4."""

    def run():
        rng = random.Random(seed)
        rule = QuadratureRule(degree=7, max_refinements=6, tol=1e-10)
        cases = []
        free2 = chart_ring(2)
        ident2 = identity_simplex(2)
        # pinned case: gamma = x1 dx2 on the identity triangle, both sides 1/2
        rep = stokes_check(ident2, Form(free2, 1, {(2,): "x1"}), 1e-8, rule)
        pinned_ok = (
            rep.passed
            and abs(rep.lhs - 0.5) <= 1e-8
            and abs(rep.rhs - 0.5) <= 1e-8
        )
        cases.append(("identity-triangle x1 dx2", rep.residual, rep.passed))
        # exact-closed form: gamma = d(f) has both sides equal and d(gamma)=0
        f = Form(free2, 0, {(): "x1^2*x2 + x2"})
        gamma_exact = dform(f)
        rep2 = stokes_check(ident2, gamma_exact, 1e-8, rule)
        closed_ok = rep2.passed and dform(gamma_exact).is_zero_rep()
        cases.append(("exact gamma = df", rep2.residual, rep2.passed))
        # trigonometric maps into the circle presentation
        circle = present_ring(2, ["x1^2+x2^2-1"])
        t1, t2 = ex.var(2, 1), ex.var(2, 2)
        arg = ex.const(2, Fraction(3)) * t1 + ex.const(2, Fraction(2)) * t2
        sigma_circ = SimplexMap(2, circle, [ex.cos(arg), ex.sin(arg)])
        rep3 = stokes_check(sigma_circ, Form(circle, 1, {(2,): "x1"}), 1e-7, rule)
        cases.append(("circle 2-simplex x1 dx2", rep3.residual, rep3.passed))
        t = ex.var(1, 1)
        sigma_arc = SimplexMap(1, circle, [ex.cos(t), ex.sin(t)])
        rep4 = stokes_check(sigma_arc, Form(circle, 0, {(): "x1*x2"}), 1e-8, rule)
        cases.append(("circle arc 0-form", rep4.residual, rep4.passed))
        # randomized polynomial cases on curved 2-simplices
        while len(cases) < 18:
            comps = [random_poly_expr(rng, 2, max_degree=2, max_terms=3, coef_bound=2)
                     for _ in range(2)]
            sigma = SimplexMap(2, free2, comps, check=False)
            gamma = Form(
                free2,
                1,
                {
                    (1,): random_poly_expr(rng, 2, max_degree=2, max_terms=3, coef_bound=2),
                    (2,): random_poly_expr(rng, 2, max_degree=2, max_terms=3, coef_bound=2),
                },
            )
            r = stokes_check(sigma, gamma, 1e-6, rule)
            cases.append((f"random poly case {len(cases)}", r.residual, r.passed))
        # a 3-dimensional case and a 1-dimensional trig case
        free3 = chart_ring(3)
        sigma3 = identity_simplex(3)
        gamma3 = Form(free3, 2, {(1, 2): "x3^2", (1, 3): "x1*x2", (2, 3): "x1"})
        r5 = stokes_check(sigma3, gamma3, 1e-6, rule)
        cases.append(("identity 3-simplex", r5.residual, r5.passed))
        sig_line = SimplexMap(1, chart_ring(1), [ex.sin(ex.var(1, 1))], check=False)
        r6 = stokes_check(sig_line, Form(chart_ring(1), 0, {(): "x1^3"}), 1e-8, rule)
        cases.append(("sin-curve 0-form", r6.residual, r6.passed))
        dd_ok = all(
            boundary(boundary(identity_simplex(k))).is_empty() for k in range(2, 5)
        )
        all_ok = pinned_ok and closed_ok and dd_ok and all(p for _, _, p in cases)
        worst = max(res for _, res, _ in cases)
        return all_ok, {
            "cases": len(cases),
            "worst_residual": worst,
            "pinned_triangle_ok": pinned_ok,
            "closed_form_ok": closed_ok,
            "dd_zero_k_le_4": dd_ok,
        }

    return _timed(4, "Stokes suite and boundary squared", 60.0, run)


def criterion_5(seed: int = 0) -> CriterionResult:
    """Square-zero extension: module part multiplies to zero and the general
    operation formula reproduces the product rule for f(x,y) = xy."""

    def run():
        rng = random.Random(seed)
        cross = present_ring(2, ["x1*x2"])
        module = kaehler_presentation(cross)
        sz = square_zero(cross, module)
        mul = ex.var(2, 1) * ex.var(2, 2)
        failures = 0
        for _ in range(50):
            m1 = module.element(
                [random_poly_expr(rng, 2), random_poly_expr(rng, 2)]
            )
            m2 = module.element(
                [random_poly_expr(rng, 2), random_poly_expr(rng, 2)]
            )
            z = sz.element(0, m1) * sz.element(0, m2)
            if not (z.a.is_zero_rep() and all(c.is_zero_rep() for c in z.m.coeffs)):
                failures += 1
                continue
            a1 = cross.element(random_poly_expr(rng, 2))
            a2 = cross.element(random_poly_expr(rng, 2))
            got = sz.apply_op(mul, [sz.element(a1, m1), sz.element(a2, m2)])
            want_a = a1 * a2
            want_m = m1.scale(a2.reduced()) + m2.scale(a1.reduced())
            if got.a.rep != want_a.rep or any(
                x.rep != y.rep for x, y in zip(got.m.coeffs, want_m.coeffs)
            ):
                failures += 1
        return failures == 0, {"trials": 50, "failures": failures}

    return _timed(5, "square-zero extension law", None, run)


def criterion_6(seed: int = 0) -> CriterionResult:
    """Derivative-of-inverse identity: w(1/a) + (1/a)^2 w(a) normalizes to the
    zero tree for random invertible expressions."""

    def run():
        rng = random.Random(seed)
        failures = 0
        for _ in range(20):
            n = rng.randint(1, 3)
            a = random_invertible_expr(rng, n)
            i = rng.randint(1, n)
            lhs = normalize(
                ex.partial(ex.recip(a), i)
                + ex.Pow(n, ex.recip(a), 2) * ex.partial(a, i)
            )
            if not ex.is_zero(lhs):
                failures += 1
        return failures == 0, {"trials": 20, "failures": failures}

    return _timed(6, "inverse-derivative identity", None, run)


def criterion_7(seed: int = 0) -> CriterionResult:
    """Bump functions: range [0,1] on 1000 samples, exact 1 on the inner ball,
    exact 0 on the closed set, tolerance 1e-12."""

    def run():
        rng = random.Random(seed)
        closed = ClosedSet([(2.2, 0.3), (-2.5, 1.0), (0.0, -2.4), (3.0, 3.0)])
        tau = bump(2, closed, [Fraction(0), Fraction(0)], Fraction(1), Fraction(2))
        range_ok = True
        for _ in range(1000):
            p = (rng.uniform(-3, 3), rng.uniform(-3, 3))
            v = ex.evaluate(tau, p)
            if not -1e-12 <= v <= 1 + 1e-12:
                range_ok = False
        inner_ok = True
        for _ in range(200):
            r = rng.uniform(0, 0.999)
            th = rng.uniform(0, 2 * math.pi)
            p = (r * math.cos(th), r * math.sin(th))
            if abs(ex.evaluate(tau, p) - 1.0) > 1e-12:
                inner_ok = False
        closed_ok = all(abs(ex.evaluate(tau, p)) <= 1e-12 for p in closed.points)
        return (range_ok and inner_ok and closed_ok), {
            "range_ok": range_ok,
            "inner_ball_one": inner_ok,
            "closed_set_zero": closed_ok,
        }

    return _timed(7, "bump function construction", None, run)


def criterion_8(seed: int = 0) -> CriterionResult:
    """Sheaf layer on the circle: a three-open cover glues a consistent family
    with zero disagreement, rejects an inconsistent one with a witness, and
    germ inversion produces products within 1e-10 of 1."""

    def run():
        circle = present_ring(2, ["x1^2+x2^2-1"], OracleConfig(seed=seed))
        space = DiffSpace(circle, seed=seed)
        arcs = [
            BasicOpen(space, ["x2 + 1/2"]),
            BasicOpen(space, ["-1/2 - x1"]),
            BasicOpen(space, ["x1 - x2"]),
        ]
        rep = ex.parse("x1 + x2^2", 2)
        sections = [Section(a, rep) for a in arcs]
        glued, cert = glue(arcs, sections)
        glue_ok = cert.max_overlap_disagreement == 0.0 and cert.max_blend_error <= 1e-8
        rejected = False
        witnessed = None
        try:
            bad = [Section(arcs[0], rep), Section(arcs[1], rep),
                   Section(arcs[2], ex.parse("x1 + x2^2 + 1/20", 2))]
            glue(arcs, bad)
        except IncompatibleFamily as e:
            rejected = True
            witnessed = e.witness
        rng = random.Random(seed)
        germ_failures = 0
        whole = space.whole()
        pts = space.samples(60)
        for _ in range(20):
            g = random_poly_expr(rng, 2, max_degree=2, max_terms=3)
            base = pts[rng.randrange(len(pts))]
            if abs(ex.evaluate(g, base)) < 0.1:
                g = normalize(g + ex.const(2, 1) + ex.const(2, Fraction(1, 2)))
                if abs(ex.evaluate(g, base)) < 0.1:
                    continue
            germ = GermRep(Section(whole, g), base)
            inv = germ_invert(germ)
            nbhd = [p for p in pts if inv.section.open_set.contains(p)]
            if not nbhd:
                germ_failures += 1
                continue
            err = max(abs(germ.section(p) * inv.section(p) - 1.0) for p in nbhd)
            if err > 1e-10:
                germ_failures += 1
        ok = glue_ok and rejected and germ_failures == 0
        return ok, {
            "glue_disagreement": cert.max_overlap_disagreement,
            "glue_blend_error": cert.max_blend_error,
            "inconsistent_rejected": rejected,
            "witness": witnessed,
            "germ_failures": germ_failures,
        }

    return _timed(8, "sheaf gluing and germ inversion", None, run)


def criterion_9(seed: int = 0) -> CriterionResult:
    """Functoriality of the ringed-space embedding: pullback along a
    composition equals composed pullbacks on sections, and the induced
    section map is pointwise composition."""

    def run():
        rng = random.Random(seed)
        line = present_ring(1, [], OracleConfig(seed=seed))
        cross = present_ring(2, ["x1*x2"], OracleConfig(seed=seed))
        circle = present_ring(2, ["x1^2+x2^2-1"], OracleConfig(seed=seed))
        sp_line = DiffSpace(line, seed=seed)
        sp_cross = DiffSpace(cross, seed=seed)
        sp_circle = DiffSpace(circle, seed=seed)
        f = ringed_map(["x1", "0"], sp_line, sp_cross)
        g = ringed_map(["cos(x1+x2)", "sin(x1+x2)"], sp_cross, sp_circle)
        gf = compose_maps(g, f)
        pts = sp_line.samples(20)
        worst_functor = 0.0
        worst_pointwise = 0.0
        for _ in range(20):
            h = random_poly_expr(rng, 2, max_degree=3, max_terms=3)
            via_comp = gf.pullback_function(h)
            via_steps = f.pullback_function(g.pullback_function(h))
            for p in pts:
                worst_functor = max(
                    worst_functor,
                    abs(ex.evaluate(via_comp, p) - ex.evaluate(via_steps, p)),
                )
                worst_pointwise = max(
                    worst_pointwise,
                    abs(ex.evaluate(f.pullback_function(h), p) - ex.evaluate(h, f.apply_point(p))),
                )
        ok = worst_functor <= 1e-10 and worst_pointwise <= 1e-10
        return ok, {
            "max_functor_deviation": worst_functor,
            "max_pointwise_deviation": worst_pointwise,
            "sections": 20,
            "sample_points": len(pts),
        }

    return _timed(9, "ringed-space functoriality", None, run)


ALL_CRITERIA = [
    criterion_1,
    criterion_2,
    criterion_3,
    criterion_4,
    criterion_5,
    criterion_6,
    criterion_7,
    criterion_8,
    criterion_9,
]


def run_all(seed: int = 0) -> list[CriterionResult]:
    return [fn(seed) for fn in ALL_CRITERIA]
