"""Seeded random generators and identity suites shared by tests and the CLI."""

from __future__ import annotations

import random
from fractions import Fraction

from . import expr as ex
from .expr import SmoothExpr, normalize
from .cring import (
    IllDefinedHom,
    OracleConfig,
    RingHom,
    RingPresentation,
    hom,
    hom_compose,
    identity_hom,
    present_ring,
)
from .derham import Form, d, pullback, wedge


def random_poly_expr(rng: random.Random, n: int, max_degree: int = 3,
                     max_terms: int = 4, coef_bound: int = 5) -> SmoothExpr:
    """A random polynomial expression with small rational coefficients."""
    terms = []
    for _ in range(rng.randint(1, max_terms)):
        coef = Fraction(rng.randint(-coef_bound, coef_bound), rng.randint(1, 3))
        if coef == 0:
            coef = Fraction(1)
        term: SmoothExpr = ex.const(n, coef)
        degree = rng.randint(0, max_degree)
        for _ in range(degree):
            if n:
                term = term * ex.var(n, rng.randint(1, n))
        terms.append(term)
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return normalize(total)


def random_smooth_expr(rng: random.Random, n: int, max_degree: int = 2) -> SmoothExpr:
    """Polynomial data decorated with occasional transcendental primitives."""
    base = random_poly_expr(rng, n, max_degree=max_degree, max_terms=3, coef_bound=3)
    roll = rng.random()
    if roll < 0.25:
        return normalize(ex.sin(base))
    if roll < 0.4:
        return normalize(ex.cos(base))
    if roll < 0.5:
        return normalize(ex.exp(base))
    if roll < 0.6:
        other = random_poly_expr(rng, n, max_degree=1, max_terms=2, coef_bound=2)
        return normalize(base * ex.sin(other) if rng.random() < 0.5 else base + ex.cos(other))
    return base


def random_invertible_expr(rng: random.Random, n: int) -> SmoothExpr:
    """Expressions with a global nonvanishing guarantee (for recip)."""
    p = random_poly_expr(rng, n, max_degree=2, max_terms=3, coef_bound=3)
    shape = rng.randrange(3)
    if shape == 0:
        return normalize(ex.const(n, 1) + p * p)
    if shape == 1:
        return normalize(ex.exp(p))
    return normalize(ex.const(n, 2) + ex.sin(p))


def random_form(rng: random.Random, ring: RingPresentation, degree: int,
                max_coeff_degree: int = 2) -> Form:
    import itertools

    coeffs = {}
    indices = list(itertools.combinations(range(1, ring.n + 1), degree))
    rng.shuffle(indices)
    for idx in indices[: max(1, len(indices) - 1)]:
        coeffs[idx] = random_poly_expr(rng, ring.n, max_degree=max_coeff_degree,
                                       max_terms=3, coef_bound=3)
    return Form(ring, degree, coeffs)


def standard_rings(seed: int = 0) -> dict[str, RingPresentation]:
    cfg = OracleConfig(seed=seed)
    return {
        "free": present_ring(2, [], cfg),
        "cross": present_ring(2, ["x1*x2"], cfg),
        "circle": present_ring(2, ["x1^2+x2^2-1"], cfg),
    }


def self_hom_pool(ring: RingPresentation) -> list[RingHom]:
    """Well-defined self-maps: identity plus coordinate permutations and sign
    flips that happen to preserve the ideal."""
    import itertools

    pool = [identity_hom(ring)]
    coords = ring.coordinates()
    n = ring.n
    seen = {tuple(str(c) for c in (im.rep for im in pool[0].images))}
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1, -1), repeat=n):
            images = [
                coords[perm[i]] if signs[i] > 0 else -coords[perm[i]]
                for i in range(n)
            ]
            key = tuple(str(im.rep) for im in images)
            if key in seen:
                continue
            seen.add(key)
            try:
                pool.append(hom(ring, ring, images))
            except IllDefinedHom:
                continue
    return pool


def extra_homs(rings: dict[str, RingPresentation]) -> list[RingHom]:
    """Cross-ring maps used by the pullback suites."""
    out = []
    cross, circle, free = rings["cross"], rings["circle"], rings["free"]
    line = present_ring(1, [])
    out.append(hom(cross, line, ["x1", 0]))
    # exact rational rotation on the circle
    c, s = Fraction(3, 5), Fraction(4, 5)
    out.append(
        hom(
            circle,
            circle,
            [
                ex.const(2, c) * ex.var(2, 1) - ex.const(2, s) * ex.var(2, 2),
                ex.const(2, s) * ex.var(2, 1) + ex.const(2, c) * ex.var(2, 2),
            ],
        )
    )
    out.append(hom(free, cross, ["x1", "x2"], check=False))
    out.append(hom(free, circle, ["x1*x2", "x1+x2"], check=False))
    return out


# ---------------------------------------------------------------------------
# Identity suites


class SuiteResult:
    def __init__(self, name: str):
        self.name = name
        self.trials = 0
        self.failures = 0
        self.notes: list[str] = []

    def record(self, ok: bool, note: str = ""):
        self.trials += 1
        if not ok:
            self.failures += 1
            if note:
                self.notes.append(note)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "trials": self.trials,
            "failures": self.failures,
            "passed": self.passed,
            "notes": self.notes[:5],
        }


def suite_d_squared(ring: RingPresentation, trials: int, rng: random.Random) -> SuiteResult:
    res = SuiteResult("d_squared_zero")
    for _ in range(trials):
        k = rng.randint(0, max(0, ring.n - 1))
        alpha = random_form(rng, ring, k)
        res.record(d(d(alpha)).is_zero_rep())
    return res


def suite_graded_leibniz(ring: RingPresentation, trials: int, rng: random.Random) -> SuiteResult:
    res = SuiteResult("graded_leibniz")
    for _ in range(trials):
        ka = rng.randint(0, ring.n)
        kb = rng.randint(0, ring.n - ka) if ring.n > ka else 0
        alpha = random_form(rng, ring, ka)
        beta = random_form(rng, ring, kb)
        lhs = d(wedge(alpha, beta))
        rhs = wedge(d(alpha), beta)
        signed = wedge(alpha, d(beta))
        rhs = rhs + signed if ka % 2 == 0 else rhs - signed
        res.record((lhs - rhs).is_zero_rep())
    return res


def suite_wedge_commutativity(ring: RingPresentation, trials: int, rng: random.Random) -> SuiteResult:
    res = SuiteResult("wedge_graded_commutativity")
    for _ in range(trials):
        ka = rng.randint(0, ring.n)
        kb = rng.randint(0, ring.n)
        alpha = random_form(rng, ring, ka)
        beta = random_form(rng, ring, kb)
        lhs = wedge(beta, alpha)
        rhs = wedge(alpha, beta)
        if (ka * kb) % 2 == 1:
            rhs = -rhs
        res.record((lhs - rhs).is_zero_rep())
    return res


def suite_chain_rule(ring: RingPresentation, trials: int, rng: random.Random) -> SuiteResult:
    """partial(compose(g, args), i) equals the chain-rule expansion exactly."""
    res = SuiteResult("chain_rule")
    n = ring.n
    for _ in range(trials):
        m = rng.randint(1, 3)
        g = random_poly_expr(rng, m, max_degree=3, max_terms=3)
        args = tuple(random_smooth_expr(rng, n) for _ in range(m))
        i = rng.randint(1, n)
        composed = ex.Compose(n, g, args)
        lhs = normalize(ex.partial(composed, i))
        total = ex.const(n, 0)
        for j in range(1, m + 1):
            dg = normalize(ex.partial(g, j))
            total = total + ex.compose(dg, args, nvars=n) * ex.partial(args[j - 1], i)
        res.record(lhs == normalize(total))
    return res


def suite_pullback_cdga(ring: RingPresentation, homs: list[RingHom], trials: int,
                        rng: random.Random) -> SuiteResult:
    """Pullback commutes with d and wedge, exactly on representatives."""
    res = SuiteResult("pullback_cdga")
    usable = [h for h in homs if h.source is ring]
    if not usable:
        return res
    for _ in range(trials):
        phi = rng.choice(usable)
        k = rng.randint(0, ring.n)
        alpha = random_form(rng, ring, k)
        beta = random_form(rng, ring, rng.randint(0, ring.n))
        ok_d = (pullback(phi, d(alpha)) - d(pullback(phi, alpha))).is_zero_rep()
        ok_w = (
            pullback(phi, wedge(alpha, beta))
            - wedge(pullback(phi, alpha), pullback(phi, beta))
        ).is_zero_rep()
        res.record(ok_d and ok_w, "pullback/d or pullback/wedge mismatch")
    return res


def suite_pullback_functor(ring: RingPresentation, homs: list[RingHom], trials: int,
                           rng: random.Random) -> SuiteResult:
    res = SuiteResult("pullback_functor")
    usable = [h for h in homs if h.source is ring]
    if not usable:
        return res
    for _ in range(trials):
        phi = rng.choice(usable)
        follow = [h for h in homs if h.source is phi.target]
        if not follow:
            res.record(True)
            continue
        psi = rng.choice(follow)
        alpha = random_form(rng, ring, rng.randint(0, ring.n))
        composite = hom_compose(psi, phi)
        lhs = pullback(composite, alpha)
        rhs = pullback(psi, pullback(phi, alpha))
        res.record((lhs - rhs).is_zero_rep())
    return res


def run_identity_suites(ring: RingPresentation, trials: int, seed: int,
                        homs: list[RingHom] | None = None) -> list[SuiteResult]:
    rng = random.Random(seed)
    if homs is None:
        homs = self_hom_pool(ring)
    return [
        suite_d_squared(ring, trials, rng),
        suite_graded_leibniz(ring, trials, rng),
        suite_wedge_commutativity(ring, trials, rng),
        suite_chain_rule(ring, trials, rng),
        suite_pullback_cdga(ring, homs, trials, rng),
        suite_pullback_functor(ring, homs, trials, rng),
    ]
