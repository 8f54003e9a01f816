"""Finitely presented smooth function rings C^inf(R^n)/<g_1..g_k>.

Elements are ambient smooth expressions modulo the ideal generated by the
presentation's generators.  Equality of elements is undecidable in general,
so every comparison returns a Verdict: exact proofs when the polynomial
machinery applies, seeded sampling on the zero set otherwise, and Unknown as
an honest fallback.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import expr as ex
from .expr import (
    EvaluationError,
    NonRationalEvaluation,
    SmoothExpr,
    evaluate,
    evaluate_exact,
    normalize,
    to_poly,
    from_poly,
    to_text,
)
from .groebner import GroebnerBasis
from .poly import Poly


class CRingError(Exception):
    pass


class PresentationMismatch(CRingError):
    pass


class SamplingFailed(CRingError):
    pass


class PointOffZeroSet(CRingError):
    pass


class IllDefinedHom(CRingError):
    def __init__(self, generator_index: int, verdict: "Verdict"):
        super().__init__(
            f"generator {generator_index} does not map to zero: {verdict.label()}"
        )
        self.generator_index = generator_index
        self.verdict = verdict


# ---------------------------------------------------------------------------
# Verdicts

PROVED_EQUAL = "proved_equal"
PROVED_UNEQUAL = "proved_unequal"
NUMERICALLY_EQUAL = "numerically_equal"
NUMERICALLY_UNEQUAL = "numerically_unequal"
UNKNOWN = "unknown"


@dataclass
class Verdict:
    """Three-valued comparison result with provenance.

    kind is one of proved_equal / proved_unequal / numerically_equal /
    numerically_unequal / unknown.  Numerical verdicts record the sampling
    seed and deviation data; degree-stamped non-membership records the bound.
    """

    kind: str
    witness: tuple | None = None
    seed: int | None = None
    samples: int | None = None
    max_deviation: float | None = None
    tolerance: float | None = None
    degree_bound: int | None = None
    reason: str | None = None
    cofactors: list | None = None

    @property
    def equal(self) -> bool:
        return self.kind in (PROVED_EQUAL, NUMERICALLY_EQUAL)

    @property
    def unequal(self) -> bool:
        return self.kind in (PROVED_UNEQUAL, NUMERICALLY_UNEQUAL)

    @property
    def proved(self) -> bool:
        return self.kind in (PROVED_EQUAL, PROVED_UNEQUAL)

    @property
    def is_unknown(self) -> bool:
        return self.kind == UNKNOWN

    def label(self) -> str:
        if self.kind == PROVED_UNEQUAL and self.degree_bound is not None:
            return f"NotMemberUpToDegree({self.degree_bound})"
        return {
            PROVED_EQUAL: "ProvedEqual",
            PROVED_UNEQUAL: "ProvedUnequal",
            NUMERICALLY_EQUAL: "NumericallyEqual",
            NUMERICALLY_UNEQUAL: "NumericallyUnequal",
            UNKNOWN: "Unknown",
        }[self.kind]

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind, "label": self.label()}
        if self.witness is not None:
            out["witness"] = list(self.witness)
        for name in ("seed", "samples", "max_deviation", "tolerance", "degree_bound", "reason"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        if self.cofactors is not None:
            out["cofactors"] = [to_text(c) for c in self.cofactors]
        return out


# ---------------------------------------------------------------------------
# Oracle configuration


@dataclass(frozen=True)
class OracleConfig:
    """Equality-oracle knobs: degree bounds, sampling effort, tolerances."""

    degree_bound: int = 8
    samples: int = 40
    tolerance: float = 1e-9
    residual_tol: float = 1e-10
    box: tuple | None = None
    seed: int = 0

    def box_for(self, n: int) -> list[tuple[float, float]]:
        if self.box is None:
            return [(-2.0, 2.0)] * n
        return [tuple(b) for b in self.box]

    def to_dict(self) -> dict:
        return {
            "degree_bound": self.degree_bound,
            "samples": self.samples,
            "tolerance": self.tolerance,
            "residual_tol": self.residual_tol,
            "box": None if self.box is None else [list(b) for b in self.box],
            "seed": self.seed,
        }


# ---------------------------------------------------------------------------
# Presentations and elements


class RingPresentation:
    """C^inf(R^n) / <gens>; the free ring when gens is empty.

    When every generator is polynomial, a reduced graded-lex Groebner basis
    is cached and polynomial representatives have confluent normal forms.
    """

    def __init__(self, n: int, gens, oracle: OracleConfig | None = None):
        if n < 0:
            raise CRingError("need n >= 0 ambient variables")
        self.n = n
        self.oracle = oracle or OracleConfig()
        parsed = []
        for g in gens:
            e = ex.parse(g, n) if isinstance(g, str) else normalize(g)
            if e.nvars != n:
                raise CRingError(f"generator {to_text(e)} is not over {n} variables")
            if not ex.is_zero(e):
                parsed.append(e)
        self.gens: tuple[SmoothExpr, ...] = tuple(parsed)
        self._gens_poly: list[Poly] | None = self._compute_gens_poly()
        self._groebner: GroebnerBasis | None = None
        self._gen_grads: list[list[SmoothExpr]] | None = None
        self._sample_pool: dict = {}

    def _compute_gens_poly(self):
        polys = []
        for g in self.gens:
            p = to_poly(g)
            if p is None:
                return None
            polys.append(p)
        return polys

    @property
    def is_free(self) -> bool:
        return not self.gens

    @property
    def is_polynomial(self) -> bool:
        return self._gens_poly is not None

    def gens_poly(self) -> list[Poly]:
        if self._gens_poly is None:
            raise CRingError("presentation has non-polynomial generators")
        return self._gens_poly

    def groebner(self) -> GroebnerBasis | None:
        if not self.is_polynomial or self.is_free:
            return None
        if self._groebner is None:
            self._groebner = GroebnerBasis(self.gens_poly())
        return self._groebner

    # -- element construction ------------------------------------------------

    def element(self, obj, reduce: bool = True) -> "RingElement":
        if isinstance(obj, RingElement):
            if obj.ring is not self:
                raise PresentationMismatch("element belongs to another presentation")
            return obj
        if isinstance(obj, str):
            e = ex.parse(obj, self.n)
        elif isinstance(obj, SmoothExpr):
            if obj.nvars != self.n:
                raise CRingError("expression context does not match the presentation")
            e = normalize(obj)
        else:
            e = ex.const(self.n, Fraction(obj))
        return RingElement(self, e, reduce=reduce)

    def coordinate(self, i: int) -> "RingElement":
        return RingElement(self, ex.var(self.n, i), reduce=False)

    def coordinates(self) -> list["RingElement"]:
        return [self.coordinate(i) for i in range(1, self.n + 1)]

    def zero(self) -> "RingElement":
        return RingElement(self, ex.const(self.n, 0), reduce=False)

    def one(self) -> "RingElement":
        return RingElement(self, ex.const(self.n, 1), reduce=False)

    def reduce_expr(self, e: SmoothExpr) -> SmoothExpr:
        """Normal form of the polynomial fragment modulo the cached basis."""
        e = normalize(e)
        gb = self.groebner()
        if gb is None:
            return e
        p = to_poly(e)
        if p is None:
            return e
        return from_poly(gb.normal_form(p))

    # -- zero set sampling ---------------------------------------------------

    def _gradients(self) -> list[list[SmoothExpr]]:
        if self._gen_grads is None:
            self._gen_grads = [ex.gradient(g) for g in self.gens]
        return self._gen_grads

    def sample_zero_set(self, count: int, box=None, seed: int | None = None) -> list[tuple]:
        """Points p with max_j |g_j(p)| <= residual_tol, deterministic per seed.

        Random restarts followed by damped Gauss-Newton projection; raises
        SamplingFailed when the iteration budget runs out.
        """
        if seed is None:
            seed = self.oracle.seed
        boxes = [tuple(b) for b in (box or self.oracle.box_for(self.n))]
        key = (tuple(boxes), seed)
        pool = self._sample_pool.setdefault(key, [])
        if len(pool) >= count:
            return pool[:count]
        rng = np.random.default_rng(seed)
        pool.clear()
        lows = np.array([b[0] for b in boxes])
        highs = np.array([b[1] for b in boxes])
        tol = self.oracle.residual_tol
        attempts = 0
        max_attempts = max(count * 40, 200)
        while len(pool) < count and attempts < max_attempts:
            attempts += 1
            x = rng.uniform(lows, highs)
            if self.is_free:
                pool.append(tuple(float(v) for v in x))
                continue
            x = self._project(x, tol)
            if x is None:
                continue
            if np.all(x >= lows - 1e-9) and np.all(x <= highs + 1e-9):
                pool.append(tuple(float(v) for v in x))
        if len(pool) < count:
            raise SamplingFailed(
                f"found {len(pool)} of {count} zero-set points in {attempts} attempts"
            )
        return pool[:count]

    def _project(self, x: np.ndarray, tol: float):
        grads = self._gradients()
        for _ in range(60):
            try:
                res = np.array([evaluate(g, x) for g in self.gens])
            except EvaluationError:
                return None
            err = np.max(np.abs(res)) if res.size else 0.0
            if err <= tol:
                return x
            jac = np.array(
                [[evaluate(d, x) for d in row] for row in grads]
            )
            try:
                step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
            except np.linalg.LinAlgError:
                return None
            t = 1.0
            improved = False
            for _ in range(25):
                cand = x + t * step
                try:
                    cres = np.array([evaluate(g, cand) for g in self.gens])
                except EvaluationError:
                    t *= 0.5
                    continue
                if np.max(np.abs(cres)) < err:
                    x = cand
                    improved = True
                    break
                t *= 0.5
            if not improved:
                return None
        return None

    def residual(self, p) -> float:
        if not self.gens:
            return 0.0
        return max(abs(evaluate(g, p)) for g in self.gens)

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "generators": [to_text(g) for g in self.gens],
            "oracle": self.oracle.to_dict(),
        }

    def __repr__(self):
        gens = ", ".join(to_text(g) for g in self.gens) or "0"
        return f"RingPresentation(n={self.n}, ideal=<{gens}>)"


def present_ring(n: int, gens, oracle: OracleConfig | None = None) -> RingPresentation:
    return RingPresentation(n, gens, oracle)


def ring_from_dict(data: dict) -> RingPresentation:
    oracle = data.get("oracle") or {}
    box = oracle.get("box")
    cfg = OracleConfig(
        degree_bound=int(oracle.get("degree_bound", 8)),
        samples=int(oracle.get("samples", 40)),
        tolerance=float(oracle.get("tolerance", 1e-9)),
        residual_tol=float(oracle.get("residual_tol", 1e-10)),
        box=None if box is None else tuple(tuple(b) for b in box),
        seed=int(oracle.get("seed", 0)),
    )
    return RingPresentation(int(data["n"]), data.get("generators", []), cfg)


def load_ring(path: str) -> RingPresentation:
    with open(path, "r", encoding="utf-8") as fh:
        return ring_from_dict(json.load(fh))


class RingElement:
    """An element of a presented ring, stored as an ambient representative."""

    __slots__ = ("ring", "rep")

    def __init__(self, ring: RingPresentation, rep: SmoothExpr, reduce: bool = True):
        self.ring = ring
        rep = normalize(rep)
        if reduce:
            rep = ring.reduce_expr(rep)
        self.rep = rep

    @classmethod
    def raw(cls, ring: RingPresentation, rep: SmoothExpr) -> "RingElement":
        return cls(ring, rep, reduce=False)

    def reduced(self) -> "RingElement":
        return RingElement(self.ring, self.rep, reduce=True)

    def _coerce(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            if other.ring is not self.ring:
                raise PresentationMismatch("elements of different presentations")
            return other
        return self.ring.element(other, reduce=False)

    def __add__(self, other):
        o = self._coerce(other)
        return RingElement(self.ring, self.rep + o.rep)

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        o = self._coerce(other)
        return RingElement(self.ring, self.rep - o.rep)

    def __mul__(self, other):
        o = self._coerce(other)
        return RingElement(self.ring, self.rep * o.rep)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __neg__(self):
        return RingElement(self.ring, -self.rep)

    def __pow__(self, k: int):
        return RingElement(self.ring, self.rep**k)

    def is_zero_rep(self) -> bool:
        return ex.is_zero(self.rep)

    def __repr__(self):
        return f"<{to_text(self.rep)}>"

    def __str__(self):
        return to_text(self.rep)


# ---------------------------------------------------------------------------
# Operations


def apply_op(ring: RingPresentation, g: SmoothExpr, elts) -> RingElement:
    """Apply the m-ary smooth operation g to m ring elements (Eq-style
    composition on representatives, reduced)."""
    elts = list(elts)
    for elt in elts:
        if not isinstance(elt, RingElement) or elt.ring is not ring:
            raise PresentationMismatch("operation applied to foreign elements")
    composed = ex.compose(g, [elt.rep for elt in elts], nvars=ring.n)
    return RingElement(ring, composed, reduce=True)


def _exact_witness(ring: RingPresentation, diff: SmoothExpr):
    """Search small rational points that lie exactly on the zero set and
    separate diff from zero; a found point is a genuine proof."""
    n = ring.n
    if n == 0:
        try:
            v = evaluate_exact(diff, [])
            return () if v != 0 else None
        except (NonRationalEvaluation, EvaluationError):
            return None
    coords = [Fraction(c) for c in (0, 1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2),
                                    Fraction(3, 2), Fraction(-3, 2))]
    if n > 3:
        coords = [Fraction(c) for c in (0, 1, -1)]
    lo_hi = ring.oracle.box_for(n)
    axis = []
    for (lo, hi) in lo_hi:
        axis.append([c for c in coords if lo <= c <= hi])
    budget = 5000
    for pt in itertools.product(*axis):
        budget -= 1
        if budget < 0:
            break
        try:
            if any(evaluate_exact(g, pt) != 0 for g in ring.gens):
                continue
            if evaluate_exact(diff, pt) != 0:
                return pt
        except (NonRationalEvaluation, EvaluationError):
            return None
    return None


def _sampling_verdict(ring: RingPresentation, diff: SmoothExpr, seed: int | None = None) -> Verdict:
    cfg = ring.oracle
    seed = cfg.seed if seed is None else seed
    try:
        pts = ring.sample_zero_set(cfg.samples, seed=seed)
    except SamplingFailed as exc:
        return Verdict(UNKNOWN, reason=f"sampling failed: {exc}", seed=seed)
    worst = None
    worst_pt = None
    for p in pts:
        try:
            v = abs(evaluate(diff, p))
        except EvaluationError as exc:
            return Verdict(UNKNOWN, reason=f"evaluation failed at {p}: {exc}", seed=seed)
        if worst is None or v > worst:
            worst, worst_pt = v, p
    if worst is None:
        return Verdict(UNKNOWN, reason="no sample points", seed=seed)
    if worst <= cfg.tolerance:
        return Verdict(
            NUMERICALLY_EQUAL,
            seed=seed,
            samples=len(pts),
            max_deviation=worst,
            tolerance=cfg.tolerance,
        )
    return Verdict(
        NUMERICALLY_UNEQUAL,
        witness=worst_pt,
        seed=seed,
        samples=len(pts),
        max_deviation=worst,
        tolerance=cfg.tolerance,
    )


def equal(ring: RingPresentation, a, b, seed: int | None = None) -> Verdict:
    """Equality of two elements in the quotient ring.

    Exact proof when the difference is polynomial over a polynomial
    presentation (Groebner normal form; exact rational witnesses for
    inequality); seeded zero-set sampling otherwise.
    """
    ea = ring.element(a, reduce=False)
    eb = ring.element(b, reduce=False)
    diff = normalize(ea.rep - eb.rep)
    if ex.is_zero(diff):
        return Verdict(PROVED_EQUAL)
    p = to_poly(diff)
    if p is not None and ring.is_polynomial:
        gb = ring.groebner()
        if gb is None:
            # free ring: distinct polynomials are distinct smooth functions
            wit = _exact_witness(ring, diff)
            if wit is not None:
                return Verdict(PROVED_UNEQUAL, witness=tuple(float(x) for x in wit))
            wit = _random_rational_witness(ring, diff, seed)
            if wit is not None:
                return Verdict(PROVED_UNEQUAL, witness=tuple(float(x) for x in wit))
            return _sampling_verdict(ring, diff, seed)
        cof = gb.membership_cofactors(p)
        if cof is not None:
            return Verdict(PROVED_EQUAL, cofactors=[from_poly(c) for c in cof])
        wit = _exact_witness(ring, diff)
        if wit is not None:
            return Verdict(PROVED_UNEQUAL, witness=tuple(float(x) for x in wit))
        return _sampling_verdict(ring, diff, seed)
    return _sampling_verdict(ring, diff, seed)


def _random_rational_witness(ring: RingPresentation, diff: SmoothExpr, seed: int | None):
    rng = np.random.default_rng(ring.oracle.seed if seed is None else seed)
    for _ in range(200):
        pt = [Fraction(int(rng.integers(-400, 400)), 100) for _ in range(ring.n)]
        try:
            if any(evaluate_exact(g, pt) != 0 for g in ring.gens):
                continue
            if evaluate_exact(diff, pt) != 0:
                return pt
        except (NonRationalEvaluation, EvaluationError):
            return None
    return None


def ideal_member(ring: RingPresentation, e, degree_bound: int | None = None,
                 seed: int | None = None) -> Verdict:
    """Membership of e in the presentation ideal, with explicit cofactors.

    Polynomial members come back ProvedEqual with cofactors h_j such that
    e = sum h_j g_j; exact rational zero-set witnesses refute membership;
    anything else is sampled or Unknown.  Non-membership claims are only as
    strong as the verdict kind states: the polynomial route cannot exclude
    smooth cofactors, so a clean sampling pass yields Unknown, not a proof.
    """
    if degree_bound is None:
        degree_bound = ring.oracle.degree_bound
    elt = ring.element(e, reduce=False)
    diff = elt.rep
    if ex.is_zero(diff):
        return Verdict(PROVED_EQUAL, cofactors=[ex.const(ring.n, 0) for _ in ring.gens])
    if not ring.gens:
        verdict = equal(ring, elt, 0, seed=seed)
        if verdict.equal:
            return Verdict(UNKNOWN, reason="zero function but not the zero ideal")
        verdict.degree_bound = None
        return verdict
    p = to_poly(diff)
    if p is not None and ring.is_polynomial:
        gb = ring.groebner()
        cof = gb.membership_cofactors(p)
        if cof is not None:
            return Verdict(PROVED_EQUAL, cofactors=[from_poly(c) for c in cof])
    wit = _exact_witness(ring, diff)
    if wit is not None:
        return Verdict(PROVED_UNEQUAL, witness=tuple(float(x) for x in wit))
    verdict = _sampling_verdict(ring, diff, seed)
    if verdict.kind == NUMERICALLY_EQUAL:
        return Verdict(
            UNKNOWN,
            reason=f"vanishes on samples but no cofactor certificate at degree {degree_bound}",
            seed=verdict.seed,
            samples=verdict.samples,
            max_deviation=verdict.max_deviation,
            degree_bound=degree_bound,
        )
    return verdict


# ---------------------------------------------------------------------------
# Homomorphisms


class RingHom:
    """A map of presented rings determined by images of the coordinates."""

    def __init__(self, source: RingPresentation, target: RingPresentation,
                 images, check: bool = True):
        if len(images) != source.n:
            raise CRingError(
                f"need {source.n} coordinate images, got {len(images)}"
            )
        self.source = source
        self.target = target
        self.images = tuple(target.element(im, reduce=False) for im in images)
        self.gen_verdicts: list[Verdict] = []
        if check:
            for j, g in enumerate(source.gens):
                pushed = ex.compose(g, [im.rep for im in self.images], nvars=target.n)
                verdict = equal(target, target.element(pushed, reduce=False), 0)
                self.gen_verdicts.append(verdict)
                if verdict.unequal:
                    raise IllDefinedHom(j, verdict)

    def apply(self, elt) -> RingElement:
        e = self.source.element(elt, reduce=False)
        composed = ex.compose(e.rep, [im.rep for im in self.images], nvars=self.target.n)
        return RingElement(self.target, composed, reduce=True)

    def apply_raw(self, rep: SmoothExpr) -> SmoothExpr:
        """Composition on representatives without quotient reduction."""
        return ex.compose(rep, [im.rep for im in self.images], nvars=self.target.n)

    def __call__(self, elt) -> RingElement:
        return self.apply(elt)

    def __repr__(self):
        ims = ", ".join(to_text(im.rep) for im in self.images)
        return f"RingHom({self.source!r} -> {self.target!r}; {ims})"


def hom(source: RingPresentation, target: RingPresentation, images,
        check: bool = True) -> RingHom:
    return RingHom(source, target, images, check=check)


def identity_hom(ring: RingPresentation) -> RingHom:
    return RingHom(ring, ring, ring.coordinates(), check=False)


def hom_compose(outer: RingHom, inner: RingHom) -> RingHom:
    """outer . inner, with images composed on representatives."""
    if inner.target is not outer.source:
        raise PresentationMismatch("homs are not composable")
    images = [
        RingElement.raw(outer.target, outer.apply_raw(im.rep)) for im in inner.images
    ]
    return RingHom(inner.source, outer.target, images, check=False)


# ---------------------------------------------------------------------------
# R-points


class RPoint:
    """Evaluation functional at a numeric point of the zero set."""

    def __init__(self, ring: RingPresentation, point):
        point = tuple(float(x) for x in point)
        if len(point) != ring.n:
            raise PointOffZeroSet("point has wrong dimension")
        res = ring.residual(point)
        if res > ring.oracle.tolerance:
            raise PointOffZeroSet(
                f"point {point} violates the ideal: residual {res:.3g}"
            )
        self.ring = ring
        self.point = point

    def __call__(self, elt) -> float:
        e = self.ring.element(elt, reduce=False)
        return evaluate(e.rep, self.point)


def r_point(ring: RingPresentation, point) -> RPoint:
    return RPoint(ring, point)


# ---------------------------------------------------------------------------
# Modules and square-zero extensions


class FreeModule:
    """Free module C^rank with componentwise operations."""

    def __init__(self, ring: RingPresentation, rank: int):
        self.ring = ring
        self.rank = rank

    def zero(self) -> "FreeModuleElement":
        return FreeModuleElement(self, tuple(self.ring.zero() for _ in range(self.rank)))

    def element(self, comps) -> "FreeModuleElement":
        comps = tuple(self.ring.element(c, reduce=False) for c in comps)
        if len(comps) != self.rank:
            raise CRingError(f"need {self.rank} components")
        return FreeModuleElement(self, comps)


class FreeModuleElement:
    __slots__ = ("module", "comps")

    def __init__(self, module: FreeModule, comps: tuple):
        self.module = module
        self.comps = comps

    def __add__(self, other: "FreeModuleElement"):
        if other.module is not self.module:
            raise PresentationMismatch("elements of different modules")
        return FreeModuleElement(
            self.module, tuple(a + b for a, b in zip(self.comps, other.comps))
        )

    def scale(self, a: RingElement) -> "FreeModuleElement":
        return FreeModuleElement(self.module, tuple(a * c for c in self.comps))

    def __repr__(self):
        return "(" + ", ".join(str(c) for c in self.comps) + ")"


class SquareZeroElement:
    __slots__ = ("parent", "a", "m")

    def __init__(self, parent: "SquareZeroRing", a: RingElement, m):
        self.parent = parent
        self.a = a
        self.m = m

    def __add__(self, other):
        return self.parent.apply_op(_add2(), [self, other])

    def __mul__(self, other):
        return self.parent.apply_op(_mul2(), [self, other])

    def __repr__(self):
        return f"({self.a!r}, {self.m!r})"


def _add2() -> SmoothExpr:
    return ex.var(2, 1) + ex.var(2, 2)


def _mul2() -> SmoothExpr:
    return ex.var(2, 1) * ex.var(2, 2)


class SquareZeroRing:
    """The ring C x M with operations f((a_i, m_i)) = (f(a), sum d_if(a).m_i).

    The module part multiplies to zero: (0, m)(0, m') = (0, 0).
    """

    def __init__(self, ring: RingPresentation, module):
        if module.ring is not ring:
            raise PresentationMismatch("module is over a different ring")
        self.ring = ring
        self.module = module

    def element(self, a, m=None) -> SquareZeroElement:
        a = self.ring.element(a, reduce=False)
        if m is None:
            m = self.module.zero()
        return SquareZeroElement(self, a, m)

    def one(self) -> SquareZeroElement:
        return self.element(self.ring.one())

    def apply_op(self, g: SmoothExpr, elts) -> SquareZeroElement:
        elts = list(elts)
        for elt in elts:
            if not isinstance(elt, SquareZeroElement) or elt.parent is not self:
                raise PresentationMismatch("foreign square-zero elements")
        if g.nvars != len(elts):
            raise CRingError("operation arity mismatch")
        firsts = [e.a for e in elts]
        a_out = apply_op(self.ring, g, firsts)
        m_out = self.module.zero()
        for i, elt in enumerate(elts, start=1):
            coeff = apply_op(self.ring, normalize(ex.partial(g, i)), firsts)
            m_out = m_out + elt.m.scale(coeff)
        return SquareZeroElement(self, a_out, m_out)


def square_zero(ring: RingPresentation, module) -> SquareZeroRing:
    return SquareZeroRing(ring, module)
