"""Zero sets as differential spaces: bumps, finite covers, gluing, germs.

Carriers are zero sets of presentation generators inside a bounding box, and
every set-level assertion (membership, inclusion, covering, agreement) is
checked on seeded sample points.  Opens are finite intersections of
positivity sets {h > 0}, which is exactly the basis the smooth-step bump
construction generates.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction

from . import expr as ex
from .expr import EvaluationError, SmoothExpr, evaluate, normalize
from .cring import (
    CRingError,
    RingHom,
    RingPresentation,
    hom,
    ring_from_dict,
)


class GeometryError(CRingError):
    pass


class IncompatibleFamily(GeometryError):
    def __init__(self, witness, pair, deviation):
        super().__init__(
            f"sections {pair[0]} and {pair[1]} disagree at {witness} by {deviation:.3g}"
        )
        self.witness = witness
        self.pair = pair
        self.deviation = deviation


class NotIncluded(GeometryError):
    def __init__(self, witness):
        super().__init__(f"witness point {witness} lies outside the larger open")
        self.witness = witness


class DiffSpace:
    """A zero set carrier with its ring of restricted ambient functions."""

    def __init__(self, ring: RingPresentation, box=None, seed: int | None = None):
        self.ring = ring
        self.box = [tuple(b) for b in (box or ring.oracle.box_for(ring.n))]
        self.seed = ring.oracle.seed if seed is None else seed
        self._samples: list[tuple] = []
        # carrier must be nonempty
        self.samples(1)

    def samples(self, count: int) -> list[tuple]:
        if len(self._samples) < count:
            self._samples = self.ring.sample_zero_set(count, box=self.box, seed=self.seed)
        return self._samples[:count]

    def contains(self, p, tol: float | None = None) -> bool:
        tol = self.ring.oracle.residual_tol if tol is None else tol
        inside = all(lo - 1e-9 <= v <= hi + 1e-9 for v, (lo, hi) in zip(p, self.box))
        return inside and self.ring.residual(p) <= tol

    def whole(self) -> "BasicOpen":
        return BasicOpen(self, [])

    def __repr__(self):
        return f"DiffSpace({self.ring!r})"


class BasicOpen:
    """{h_1 > 0} ∩ ... ∩ {h_m > 0} ∩ carrier; empty list means the whole carrier."""

    def __init__(self, space: DiffSpace, positivity):
        self.space = space
        self.positivity = [
            ex.parse(h, space.ring.n) if isinstance(h, str) else normalize(h)
            for h in positivity
        ]

    def contains(self, p) -> bool:
        try:
            return all(evaluate(h, p) > 0 for h in self.positivity)
        except EvaluationError:
            return False

    def samples(self, count: int) -> list[tuple]:
        pool = self.space.samples(max(count * 4, 40))
        return [p for p in pool if self.contains(p)][:count]

    def is_degenerate(self, probe: int = 40) -> bool:
        return not self.samples(1)

    def __repr__(self):
        hs = ", ".join(str(h) for h in self.positivity) or "whole"
        return f"BasicOpen({hs})"


class UnionOpen:
    """Finite union of basic opens (the domain of a glued section)."""

    def __init__(self, opens: list[BasicOpen]):
        if not opens:
            raise GeometryError("empty union")
        self.space = opens[0].space
        self.opens = list(opens)

    def contains(self, p) -> bool:
        return any(u.contains(p) for u in self.opens)

    def samples(self, count: int) -> list[tuple]:
        pool = self.space.samples(max(count * 4, 40))
        return [p for p in pool if self.contains(p)][:count]


class Section:
    """An open set together with an ambient smooth representative."""

    def __init__(self, open_set, rep: SmoothExpr):
        self.open_set = open_set
        self.rep = normalize(rep)

    def __call__(self, p) -> float:
        return evaluate(self.rep, p)

    def restrict(self, smaller) -> "Section":
        """Presheaf restriction; inclusion is verified on sample points."""
        for p in smaller.samples(30):
            if not _open_contains(self.open_set, p):
                raise NotIncluded(p)
        return Section(smaller, self.rep)

    def __repr__(self):
        return f"Section({self.rep!s})"


def _open_contains(open_set, p) -> bool:
    return open_set.contains(p)


def section(space_or_open, rep) -> Section:
    target = space_or_open.whole() if isinstance(space_or_open, DiffSpace) else space_or_open
    rep = ex.parse(rep, target.space.ring.n) if isinstance(rep, str) else rep
    return Section(target, rep)


# ---------------------------------------------------------------------------
# Bump functions


class ClosedSet:
    """A closed set known through sample points (complement of opens)."""

    def __init__(self, points):
        self.points = [tuple(float(x) for x in p) for p in points]

    def distance_to(self, x) -> float:
        if not self.points:
            return math.inf
        return min(
            math.sqrt(sum((a - b) ** 2 for a, b in zip(x, p))) for p in self.points
        )


def smooth_step_expr(n: int, arg: SmoothExpr) -> SmoothExpr:
    return ex.rho0(arg)


def bump(space_or_n, closed_set: ClosedSet, x, r_in, r_out) -> SmoothExpr:
    """tau with tau == 1 on B(x, r_in), tau == 0 outside B(x, r_out), 0<=tau<=1.

    Built as rho0 of an affine function of |y - x|^2 that sends r_in^2 to 1
    and r_out^2 to 2, so the plateaus are exact values of the smooth step.
    Requires dist(x, closed_set) > r_out (checked against the set's samples).
    """
    n = space_or_n if isinstance(space_or_n, int) else space_or_n.ring.n
    x = [Fraction(v) for v in x]
    r_in = Fraction(r_in)
    r_out = Fraction(r_out)
    if not 0 < r_in < r_out:
        raise GeometryError("need 0 < r_in < r_out")
    if closed_set is not None and closed_set.distance_to([float(v) for v in x]) <= float(r_out):
        raise GeometryError("point is too close to the closed set")
    s = ex.const(n, 0)
    for i in range(1, n + 1):
        s = s + (ex.var(n, i) - ex.const(n, x[i - 1])) ** 2
    scale = Fraction(1) / (r_out**2 - r_in**2)
    arg = (s - ex.const(n, r_in**2)) * ex.const(n, scale) + ex.const(n, 1)
    return normalize(ex.rho0(normalize(arg)))


def positivity_ramp(n: int, h: SmoothExpr, width=Fraction(1, 4)) -> SmoothExpr:
    """Smooth theta(h): zero exactly where h <= 0, one where h >= width."""
    width = Fraction(width)
    arg = ex.const(n, 2) - h * ex.const(n, Fraction(1) / width)
    return ex.rho0(normalize(arg))


# ---------------------------------------------------------------------------
# Gluing


class GlueCertificate:
    def __init__(self, max_overlap_disagreement: float, max_blend_error: float,
                 overlap_points: int):
        self.max_overlap_disagreement = max_overlap_disagreement
        self.max_blend_error = max_blend_error
        self.overlap_points = overlap_points

    def to_dict(self) -> dict:
        return {
            "max_overlap_disagreement": self.max_overlap_disagreement,
            "max_blend_error": self.max_blend_error,
            "overlap_points": self.overlap_points,
        }

    def __repr__(self):
        return (
            f"GlueCertificate(disagreement={self.max_overlap_disagreement:.3g}, "
            f"blend_error={self.max_blend_error:.3g})"
        )


def glue(cover: list[BasicOpen], sections: list[Section], tol: float | None = None,
         sample_count: int = 60) -> tuple[Section, GlueCertificate]:
    """Glue a compatible family over a finite cover.

    Agreement is checked pairwise on overlap samples; the glued section is the
    partition-of-unity blend sum(rho_i s_i) / sum(rho_i) with rho_i built from
    smooth-step ramps of the opens' positivity functions, so it restricts to
    each input up to the blend error recorded in the certificate.
    """
    if len(cover) != len(sections):
        raise GeometryError("cover and section family have different lengths")
    if not cover:
        raise GeometryError("empty cover")
    space = cover[0].space
    n = space.ring.n
    if tol is None:
        tol = space.ring.oracle.tolerance
    # pairwise agreement on overlaps
    worst = 0.0
    overlap_points = 0
    for i in range(len(cover)):
        for j in range(i + 1, len(cover)):
            pool = space.samples(sample_count * 3)
            for p in pool:
                if cover[i].contains(p) and cover[j].contains(p):
                    overlap_points += 1
                    dev = abs(sections[i](p) - sections[j](p))
                    if dev > tol:
                        raise IncompatibleFamily(p, (i, j), dev)
                    worst = max(worst, dev)
    # coverage check on samples
    for p in space.samples(sample_count):
        if not any(u.contains(p) for u in cover):
            raise GeometryError(f"cover misses the sampled carrier point {p}")
    # partition-of-unity blend
    rhos = []
    for u in cover:
        rho = ex.const(n, 1)
        for h in u.positivity:
            rho = rho * positivity_ramp(n, h)
        rhos.append(normalize(rho))
    numer = ex.const(n, 0)
    denom = ex.const(n, 0)
    for rho, s in zip(rhos, sections):
        numer = numer + rho * s.rep
        denom = denom + rho
    glued_rep = normalize(ex.recip(normalize(denom)) * numer)
    glued = Section(UnionOpen(cover), glued_rep)
    blend_err = 0.0
    for u, s in zip(cover, sections):
        for p in u.samples(sample_count // 2):
            blend_err = max(blend_err, abs(glued(p) - s(p)))
    return glued, GlueCertificate(worst, blend_err, overlap_points)


# ---------------------------------------------------------------------------
# Germs and stalk-level inversion


class GermRep:
    """A germ at a point, represented by a section on a neighborhood."""

    def __init__(self, section: Section, point):
        point = tuple(float(v) for v in point)
        if not _open_contains(section.open_set, point):
            raise GeometryError("base point is not in the section's open set")
        self.section = section
        self.point = point

    def value(self) -> float:
        return self.section(self.point)

    def agrees_with(self, other: "GermRep", radii=(0.5, 0.25, 0.125), tol: float = 1e-9,
                    probe: int = 200) -> bool:
        """Sampled germ equality: agreement on shrinking neighborhoods."""
        space = self.section.open_set.space
        for r in radii:
            pts = [
                p
                for p in space.samples(probe)
                if math.dist(p, self.point) <= r
                and _open_contains(self.section.open_set, p)
                and _open_contains(other.section.open_set, p)
            ]
            for p in pts:
                if abs(self.section(p) - other.section(p)) > tol:
                    return False
        return True


def germ_invert(germ: GermRep) -> GermRep:
    """Multiplicative inverse of a germ with nonvanishing value.

    Modifies the reciprocal into an everywhere-defined smooth function that
    equals 1/t on (a/2, 3a/2) for a = g(x), then composes with the
    representative; the inverse lives on the preimage of that interval.
    """
    a_val = germ.value()
    if a_val == 0.0:
        raise GeometryError("germ vanishes at the base point")
    g = germ.section.rep
    space = germ.section.open_set.space
    n = space.ring.n
    negate = a_val < 0
    if negate:
        g = normalize(-g)
        a_val = -a_val
    a = Fraction(a_val)
    four_over_a = Fraction(4) / a
    t = ex.var(1, 1)
    up = ex.rho0(normalize(ex.const(1, 2) - (t - ex.const(1, a / 4)) * ex.const(1, four_over_a)))
    down = ex.rho0(normalize(ex.const(1, 1) + (t - ex.const(1, 3 * a / 2)) * ex.const(1, four_over_a)))
    chi = up * down
    eta = ex.const(1, a / 8) * (ex.const(1, 1) - chi) + t * chi
    zeta = ex.recip(normalize(eta))
    inv_rep = ex.compose(zeta, [g])
    if negate:
        inv_rep = normalize(-inv_rep)
    lo = a / 2
    hi = 3 * a / 2
    base = normalize(-germ.section.rep) if negate else germ.section.rep
    neighborhood = BasicOpen(
        space,
        [normalize(base - ex.const(n, lo)), normalize(ex.const(n, hi) - base)],
    )
    return GermRep(Section(neighborhood, inv_rep), germ.point)


# ---------------------------------------------------------------------------
# Maps of ringed spaces


class RingedSpaceMap:
    """f: source -> target acting on functions by f_#(h) = h o f."""

    def __init__(self, source: DiffSpace, target: DiffSpace, components,
                 check: bool = True):
        self.source = source
        self.target = target
        self.components = tuple(
            ex.parse(c, source.ring.n) if isinstance(c, str) else normalize(c)
            for c in components
        )
        if len(self.components) != target.ring.n:
            raise GeometryError(
                f"need {target.ring.n} component functions, got {len(self.components)}"
            )
        if check:
            tol = max(source.ring.oracle.tolerance, 1e-8)
            for p in source.samples(30):
                image = self.apply_point(p)
                res = target.ring.residual(image)
                if res > tol:
                    raise GeometryError(
                        f"image {image} of sample {p} is off the target zero set "
                        f"(residual {res:.3g})"
                    )
            # algebraic check: pullbacks of target generators vanish in the source ring
            self.hom: RingHom = hom(target.ring, source.ring, list(self.components))
        else:
            self.hom = hom(target.ring, source.ring, list(self.components), check=False)

    def apply_point(self, p) -> tuple:
        return tuple(evaluate(c, p) for c in self.components)

    def pullback_function(self, h) -> SmoothExpr:
        h = ex.parse(h, self.target.ring.n) if isinstance(h, str) else h
        return ex.compose(h, list(self.components), nvars=self.source.ring.n)

    def pullback_section(self, s: Section) -> Section:
        rep = self.pullback_function(s.rep)
        return Section(self.source.whole(), rep)

    def __repr__(self):
        comps = ", ".join(str(c) for c in self.components)
        return f"RingedSpaceMap({comps})"


def ringed_map(components, source: DiffSpace, target: DiffSpace) -> RingedSpaceMap:
    return RingedSpaceMap(source, target, components)


def compose_maps(outer: RingedSpaceMap, inner: RingedSpaceMap) -> RingedSpaceMap:
    """outer o inner, with components composed symbolically."""
    if inner.target is not outer.source:
        raise GeometryError("maps are not composable")
    comps = [
        ex.compose(c, list(inner.components), nvars=inner.source.ring.n)
        for c in outer.components
    ]
    return RingedSpaceMap(inner.source, outer.target, comps, check=False)


# ---------------------------------------------------------------------------
# JSON descriptions


def space_from_dict(data: dict, base_dir: str = ".") -> tuple[DiffSpace, list[BasicOpen]]:
    ring_spec = data["ring"]
    if isinstance(ring_spec, str):
        import os

        with open(os.path.join(base_dir, ring_spec), "r", encoding="utf-8") as fh:
            ring = ring_from_dict(json.load(fh))
    else:
        ring = ring_from_dict(ring_spec)
    space = DiffSpace(ring, box=data.get("box"), seed=data.get("seed"))
    opens = [
        BasicOpen(space, o.get("positivity", [])) for o in data.get("opens", [])
    ]
    return space, opens
