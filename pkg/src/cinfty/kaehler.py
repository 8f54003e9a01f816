"""Modules of smooth Kahler differentials for presented rings.

For C = C^inf(R^n)/<g_1..g_k> the module of 1-forms is presented as
C.dx1 + ... + C.dxn modulo the rows dg_j = sum_i (d_i g_j) dx_i; for the free
ring it is free of rank n.  Membership in the relation submodule is decided
by an exact linear solve over polynomial cofactors of bounded degree, so
non-membership verdicts are always degree-stamped.
"""

from __future__ import annotations

from fractions import Fraction

from . import expr as ex
from .expr import normalize, to_poly, from_poly, to_text
from .linalg import nullspace, solve
from .poly import Poly, monomials_up_to_degree
from .cring import (
    NUMERICALLY_EQUAL,
    PROVED_EQUAL,
    PROVED_UNEQUAL,
    UNKNOWN,
    CRingError,
    PresentationMismatch,
    RingElement,
    RingHom,
    RingPresentation,
    Verdict,
    ideal_member,
)


class NotTangent(CRingError):
    def __init__(self, generator_index: int, verdict: Verdict):
        super().__init__(
            f"vector field is not tangent to generator {generator_index}: {verdict.label()}"
        )
        self.generator_index = generator_index
        self.verdict = verdict


class KaehlerPresentation:
    """Presentation of the 1-form module: rank-n free part and rows dg_j."""

    def __init__(self, ring: RingPresentation):
        self.ring = ring
        self.rank = ring.n
        self.relations: list[tuple[RingElement, ...]] = [
            tuple(
                RingElement.raw(ring, normalize(ex.partial(g, i)))
                for i in range(1, ring.n + 1)
            )
            for g in ring.gens
        ]

    def zero(self) -> "OneForm":
        return OneForm(self, [self.ring.zero()] * self.rank, reduce=False)

    def element(self, coeffs, reduce: bool = True) -> "OneForm":
        return OneForm(self, coeffs, reduce=reduce)

    def basis_form(self, i: int) -> "OneForm":
        coeffs = [self.ring.zero()] * self.rank
        coeffs[i - 1] = self.ring.one()
        return OneForm(self, coeffs, reduce=False)

    def __repr__(self):
        return f"KaehlerPresentation(rank={self.rank}, relations={len(self.relations)})"


def kaehler_presentation(ring: RingPresentation) -> KaehlerPresentation:
    """The (cached) 1-form module presentation of a ring."""
    cached = getattr(ring, "_kaehler", None)
    if cached is None:
        cached = KaehlerPresentation(ring)
        ring._kaehler = cached
    return cached


class OneForm:
    """sum_i f_i dx_i with coefficients in the base ring."""

    __slots__ = ("module", "coeffs")

    def __init__(self, module: KaehlerPresentation, coeffs, reduce: bool = True):
        if len(coeffs) != module.rank:
            raise CRingError(f"need {module.rank} coefficients")
        self.module = module
        self.coeffs = tuple(module.ring.element(c, reduce=reduce) for c in coeffs)

    def _check(self, other: "OneForm"):
        if other.module is not self.module:
            raise PresentationMismatch("forms over different modules")

    def __add__(self, other: "OneForm") -> "OneForm":
        self._check(other)
        return OneForm(
            self.module,
            [a + b for a, b in zip(self.coeffs, other.coeffs)],
            reduce=False,
        )

    def __sub__(self, other: "OneForm") -> "OneForm":
        self._check(other)
        return OneForm(
            self.module,
            [a - b for a, b in zip(self.coeffs, other.coeffs)],
            reduce=False,
        )

    def __neg__(self) -> "OneForm":
        return OneForm(self.module, [-a for a in self.coeffs], reduce=False)

    def scale(self, a) -> "OneForm":
        a = self.module.ring.element(a, reduce=False)
        return OneForm(self.module, [a * c for c in self.coeffs], reduce=False)

    def is_zero_rep(self) -> bool:
        return all(c.is_zero_rep() for c in self.coeffs)

    def coeff_polys(self) -> list[Poly] | None:
        polys = []
        for c in self.coeffs:
            p = to_poly(c.rep)
            if p is None:
                return None
            polys.append(p)
        return polys

    def __repr__(self):
        parts = [
            f"({c!s}) dx{i}"
            for i, c in enumerate(self.coeffs, start=1)
            if not c.is_zero_rep()
        ]
        return " + ".join(parts) if parts else "0"


def d0(ring_or_module, a) -> OneForm:
    """Universal derivation: a |-> sum_i (d_i a) dx_i in the presentation."""
    module = (
        ring_or_module
        if isinstance(ring_or_module, KaehlerPresentation)
        else kaehler_presentation(ring_or_module)
    )
    elt = module.ring.element(a, reduce=False)
    coeffs = [
        normalize(ex.partial(elt.rep, i)) for i in range(1, module.rank + 1)
    ]
    return OneForm(module, coeffs, reduce=True)


# ---------------------------------------------------------------------------
# Relation-submodule membership (shared with the graded layer)


def module_membership(
    ring: RingPresentation,
    relation_rows: list[list[Poly]],
    target: list[Poly],
    degree: int,
) -> tuple[list[Poly] | None, bool]:
    """Solve target = sum_r h_r * relation_rows[r] componentwise mod I.

    Cofactors h_r range over polynomials of total degree <= degree; working
    modulo I means comparing Groebner normal forms, which is exact for
    polynomial presentations and the identity for free rings.  Returns
    (cofactors, True) when solvable, (None, certified) otherwise, where
    certified reports that an infeasibility certificate (a separating linear
    functional over the coefficient space) was extracted.
    """
    gb = ring.groebner()
    nf = (lambda p: gb.normal_form(p)) if gb is not None else (lambda p: p)
    ncomp = len(target)
    monos = monomials_up_to_degree(ring.n, degree)
    unknowns = [(r, m) for r in range(len(relation_rows)) for m in monos]
    columns = []
    row_index: dict = {}

    def vec_of(poly_by_comp):
        vec: dict[int, Fraction] = {}
        for comp, poly in poly_by_comp:
            red = nf(poly)
            for mono, coef in red.terms.items():
                key = (comp, mono)
                idx = row_index.setdefault(key, len(row_index))
                vec[idx] = vec.get(idx, Fraction(0)) + coef
        return vec

    for r, m in unknowns:
        mono_poly = Poly(ring.n, {m: Fraction(1)})
        columns.append(
            vec_of(
                (comp, mono_poly * relation_rows[r][comp])
                for comp in range(ncomp)
                if not relation_rows[r][comp].is_zero()
            )
        )
    bvec = vec_of((comp, target[comp]) for comp in range(ncomp) if not target[comp].is_zero())
    nrows = len(row_index)
    if nrows == 0:
        return [Poly.zero(ring.n) for _ in relation_rows], True
    matrix = [[Fraction(0)] * len(unknowns) for _ in range(nrows)]
    for c, col in enumerate(columns):
        for ridx, coef in col.items():
            matrix[ridx][c] = coef
    rhs = [Fraction(0)] * nrows
    for ridx, coef in bvec.items():
        rhs[ridx] = coef
    solution, certificate = solve(matrix, rhs)
    if solution is None:
        return None, certificate is not None
    cofactors = [Poly.zero(ring.n) for _ in relation_rows]
    for (r, m), value in zip(unknowns, solution):
        if value != 0:
            cofactors[r] = cofactors[r] + Poly(ring.n, {m: value})
    return cofactors, True


def oneform_member_J(omega: OneForm, degree_bound: int = 6) -> Verdict:
    """Is omega in the relation submodule J (i.e. zero in the quotient)?"""
    module = omega.module
    ring = module.ring
    if omega.is_zero_rep():
        return Verdict(PROVED_EQUAL, cofactors=[ex.const(ring.n, 0) for _ in ring.gens])
    target = omega.coeff_polys()
    if target is None or not ring.is_polynomial:
        return Verdict(
            UNKNOWN,
            reason="non-polynomial data: relation-submodule membership needs the polynomial path",
            degree_bound=degree_bound,
        )
    if not ring.gens:
        return Verdict(PROVED_UNEQUAL, reason="free module: no relations")
    rows = [[to_poly(c.rep) for c in row] for row in module.relations]
    cof, certified = module_membership(ring, rows, target, degree_bound)
    if cof is not None:
        return Verdict(PROVED_EQUAL, cofactors=[from_poly(c) for c in cof])
    return Verdict(
        PROVED_UNEQUAL,
        degree_bound=degree_bound,
        reason="infeasible cofactor system"
        + (" (separating functional extracted)" if certified else ""),
    )


def oneform_equal(alpha: OneForm, beta: OneForm, degree_bound: int = 6) -> Verdict:
    if alpha.module is not beta.module:
        raise PresentationMismatch("forms over different modules")
    return oneform_member_J(alpha - beta, degree_bound)


# ---------------------------------------------------------------------------
# Induced maps on 1-forms


class OneFormMap:
    """Lambda^1(phi): dx_i |-> d(phi(x_i)), coefficients pushed through phi."""

    def __init__(self, phi: RingHom):
        self.phi = phi
        self.source = kaehler_presentation(phi.source)
        self.target = kaehler_presentation(phi.target)
        self.basis_images = [
            [
                normalize(ex.partial(im.rep, l))
                for l in range(1, phi.target.n + 1)
            ]
            for im in phi.images
        ]

    def __call__(self, omega: OneForm) -> OneForm:
        if omega.module is not self.source:
            raise PresentationMismatch("form is not over the source ring")
        n_t = self.phi.target.n
        out = [ex.const(n_t, 0) for _ in range(n_t)]
        for i, f in enumerate(omega.coeffs):
            pushed = self.phi.apply_raw(f.rep)
            for l in range(n_t):
                out[l] = out[l] + pushed * self.basis_images[i][l]
        return OneForm(self.target, [normalize(e) for e in out], reduce=True)


def lambda1(phi: RingHom) -> OneFormMap:
    return OneFormMap(phi)


# ---------------------------------------------------------------------------
# Derivations tangent to the ideal


class Derivation:
    """V = sum a_i d/dx_i with every V(g_j) certified to lie in the ideal."""

    __slots__ = ("ring", "coeffs", "certificates")

    def __init__(self, ring: RingPresentation, coeffs, certificates):
        self.ring = ring
        self.coeffs = tuple(coeffs)
        self.certificates = list(certificates)

    def __repr__(self):
        parts = ", ".join(str(c) for c in self.coeffs)
        return f"Derivation({parts})"


def derivation(ring: RingPresentation, coeffs, degree_bound: int | None = None) -> Derivation:
    """Build a tangent derivation; raises NotTangent when some V(g_j) fails
    the ideal-membership check."""
    coeffs = [ring.element(c, reduce=False) for c in coeffs]
    if len(coeffs) != ring.n:
        raise CRingError(f"need {ring.n} coefficients")
    certificates = []
    for j, g in enumerate(ring.gens):
        vg = ex.const(ring.n, 0)
        for i, a in enumerate(coeffs, start=1):
            vg = vg + a.rep * ex.partial(g, i)
        verdict = ideal_member(ring, normalize(vg), degree_bound)
        if verdict.kind not in (PROVED_EQUAL, NUMERICALLY_EQUAL):
            raise NotTangent(j, verdict)
        certificates.append(verdict)
    return Derivation(ring, coeffs, certificates)


def derivation_apply(v: Derivation, a) -> RingElement:
    """V(a) = sum_i a_i * d_i(rep a), reduced; well-defined on classes by
    tangency."""
    elt = v.ring.element(a, reduce=False)
    total = ex.const(v.ring.n, 0)
    for i, c in enumerate(v.coeffs, start=1):
        total = total + c.rep * ex.partial(elt.rep, i)
    return RingElement(v.ring, total, reduce=True)


def contract(v: Derivation, omega: OneForm) -> RingElement:
    """iota_v(omega) = sum_i f_i a_i; satisfies iota_v(d0(a)) = V(a)."""
    if omega.module.ring is not v.ring:
        raise PresentationMismatch("derivation and form over different rings")
    total = ex.const(v.ring.n, 0)
    for c, f in zip(v.coeffs, omega.coeffs):
        total = total + c.rep * f.rep
    return RingElement(v.ring, total, reduce=True)


def enumerate_tangent_derivations(
    ring: RingPresentation, degree_bound: int = 4
) -> list[Derivation]:
    """Basis of {(a_1..a_n) : deg a_i <= D, sum_i a_i d_i(g_j) in I for all j}.

    The tangency constraint is linear in the coefficients, so the solution
    space is an exact rational nullspace computation.
    """
    if not ring.is_polynomial:
        raise CRingError("enumeration needs a polynomial presentation")
    n = ring.n
    monos = monomials_up_to_degree(n, degree_bound)
    unknowns = [(i, m) for i in range(1, n + 1) for m in monos]
    gb = ring.groebner()
    nf = (lambda p: gb.normal_form(p)) if gb is not None else (lambda p: p)
    grads = [[to_poly(normalize(ex.partial(g, i))) for i in range(1, n + 1)] for g in ring.gens]
    row_index: dict = {}
    columns = []
    for i, m in unknowns:
        vec: dict[int, Fraction] = {}
        mono_poly = Poly(n, {m: Fraction(1)})
        for j in range(len(ring.gens)):
            red = nf(mono_poly * grads[j][i - 1])
            for mono, coef in red.terms.items():
                key = (j, mono)
                idx = row_index.setdefault(key, len(row_index))
                vec[idx] = vec.get(idx, Fraction(0)) + coef
        columns.append(vec)
    nrows = len(row_index)
    if nrows == 0:
        basis_vectors = nullspace([], cols=len(unknowns))
    else:
        matrix = [[Fraction(0)] * len(unknowns) for _ in range(nrows)]
        for cidx, col in enumerate(columns):
            for ridx, coef in col.items():
                matrix[ridx][cidx] = coef
        basis_vectors = nullspace(matrix)
    out = []
    for vec in basis_vectors:
        comps = [Poly.zero(n) for _ in range(n)]
        for (i, m), value in zip(unknowns, vec):
            if value != 0:
                comps[i - 1] = comps[i - 1] + Poly(n, {m: value})
        out.append(derivation(ring, [from_poly(p) for p in comps], degree_bound=None))
    return out


def psi_noninjectivity_report(
    ring: RingPresentation, omega: OneForm, degree_bound: int = 6,
    derivation_degree: int = 4,
) -> dict:
    """Probe whether omega is a nonzero 1-form killed by every contraction.

    A witness consists of (i) omega not in J up to the degree bound and
    (ii) iota_v(omega) in the ideal for every enumerated tangent derivation.
    """
    in_j = oneform_member_J(omega, degree_bound)
    derivations = enumerate_tangent_derivations(ring, derivation_degree)
    contraction_verdicts = []
    all_in = True
    for v in derivations:
        verdict = ideal_member(ring, contract(v, omega))
        contraction_verdicts.append(verdict)
        if verdict.kind not in (PROVED_EQUAL, NUMERICALLY_EQUAL):
            all_in = False
    # no derivations checked means no evidence, not a witness
    witness = in_j.kind == PROVED_UNEQUAL and all_in and bool(derivations)
    return {
        "omega": [to_text(c.rep) for c in omega.coeffs],
        "in_J": in_j.to_dict(),
        "derivations_checked": len(derivations),
        "all_contractions_in_I": all_in,
        "degree_bound": degree_bound,
        "derivation_degree_bound": derivation_degree,
        "seed": ring.oracle.seed,
        "witness_found": witness,
        "contraction_verdicts": [v.to_dict() for v in contraction_verdicts],
    }
