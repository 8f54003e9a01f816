"""Graded exterior calculus over a presented ring: wedge, d, pullback.

Forms are stored in the ambient free basis dx_I (strictly increasing
multi-indices) with ring-element coefficients.  Operations act on the stored
representatives, so the commutative-differential-graded-algebra identities
(d o d = 0, graded Leibniz, pullback compatibility) hold on the nose; the
quotient relations coming from the presentation ideal are enforced at
equality checks via an exact bounded-degree cofactor solve.
"""

from __future__ import annotations

import re

from . import expr as ex
from .expr import SmoothExpr, normalize, to_poly, to_text
from .cring import (
    NUMERICALLY_EQUAL,
    NUMERICALLY_UNEQUAL,
    PROVED_EQUAL,
    PROVED_UNEQUAL,
    UNKNOWN,
    CRingError,
    PresentationMismatch,
    RingElement,
    RingHom,
    RingPresentation,
    Verdict,
    equal,
)
from .kaehler import (
    Derivation,
    OneForm,
    enumerate_tangent_derivations,
    kaehler_presentation,
    module_membership,
)
from .poly import Poly


class FormError(CRingError):
    pass


def merge_indices(a: tuple, b: tuple) -> tuple[int, tuple | None]:
    """Merge two strictly increasing index tuples with the Koszul sign.

    Returns (0, None) when they share an index (the wedge vanishes).
    """
    sign = 1
    out: list[int] = []
    i = j = 0
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return 0, None
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            if (len(a) - i) % 2 == 1:
                sign = -sign
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return sign, tuple(out)


class Form:
    """Degree-k form sum_I f_I dx_I; degree 0 is a ring element."""

    __slots__ = ("ring", "degree", "coeffs")

    def __init__(self, ring: RingPresentation, degree: int, coeffs=None, reduce: bool = False):
        self.ring = ring
        self.degree = degree
        self.coeffs: dict[tuple, RingElement] = {}
        if coeffs and 0 <= degree <= ring.n:
            for idx, coef in coeffs.items():
                idx = tuple(idx)
                if len(idx) != degree or any(not 1 <= i <= ring.n for i in idx):
                    raise FormError(f"bad multi-index {idx} for degree {degree}")
                if tuple(sorted(set(idx))) != idx:
                    raise FormError(f"multi-index {idx} is not strictly increasing")
                elt = ring.element(coef, reduce=reduce)
                if not elt.is_zero_rep():
                    self.coeffs[idx] = elt

    @classmethod
    def zero(cls, ring: RingPresentation, degree: int) -> "Form":
        return cls(ring, degree)

    @classmethod
    def scalar(cls, ring: RingPresentation, value) -> "Form":
        return cls(ring, 0, {(): value})

    @classmethod
    def from_oneform(cls, omega: OneForm) -> "Form":
        ring = omega.module.ring
        return cls(
            ring,
            1,
            {(i,): c for i, c in enumerate(omega.coeffs, start=1)},
        )

    def as_oneform(self) -> OneForm:
        if self.degree != 1:
            raise FormError("only degree-1 forms convert to OneForm")
        module = kaehler_presentation(self.ring)
        coeffs = [self.coeffs.get((i,), self.ring.zero()) for i in range(1, self.ring.n + 1)]
        return OneForm(module, coeffs, reduce=False)

    def is_zero_rep(self) -> bool:
        return not self.coeffs

    def _check(self, other: "Form", same_degree: bool = True):
        if other.ring is not self.ring:
            raise PresentationMismatch("forms over different rings")
        if same_degree and other.degree != self.degree:
            raise FormError(f"degree mismatch: {self.degree} vs {other.degree}")

    def __add__(self, other: "Form") -> "Form":
        # coefficient arithmetic stays on raw representatives so the graded
        # identities hold on the nose; reduction happens only at equality
        self._check(other)
        out = dict(self.coeffs)
        for idx, coef in other.coeffs.items():
            cur = out.get(idx)
            merged = coef if cur is None else RingElement.raw(self.ring, cur.rep + coef.rep)
            if merged.is_zero_rep():
                out.pop(idx, None)
            else:
                out[idx] = merged
        res = Form(self.ring, self.degree)
        res.coeffs = out
        return res

    def __neg__(self) -> "Form":
        res = Form(self.ring, self.degree)
        res.coeffs = {
            idx: RingElement.raw(self.ring, -c.rep) for idx, c in self.coeffs.items()
        }
        return res

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def scale(self, value) -> "Form":
        a = self.ring.element(value, reduce=False)
        res = Form(self.ring, self.degree)
        for idx, c in self.coeffs.items():
            prod = RingElement.raw(self.ring, a.rep * c.rep)
            if not prod.is_zero_rep():
                res.coeffs[idx] = prod
        return res

    def reduced(self) -> "Form":
        """Coefficients in normal form modulo the cached basis."""
        res = Form(self.ring, self.degree)
        for idx, c in self.coeffs.items():
            r = c.reduced()
            if not r.is_zero_rep():
                res.coeffs[idx] = r
        return res

    def coeff_polys(self, index_list: list[tuple]) -> list[Poly] | None:
        out = []
        for idx in index_list:
            c = self.coeffs.get(idx)
            if c is None:
                out.append(Poly.zero(self.ring.n))
                continue
            p = to_poly(c.rep)
            if p is None:
                return None
            out.append(p)
        return out

    def __repr__(self):
        if not self.coeffs:
            return f"0 (degree {self.degree})"
        parts = []
        for idx in sorted(self.coeffs):
            basis = "^".join(f"dx{i}" for i in idx)
            c = str(self.coeffs[idx])
            parts.append(f"({c}) {basis}".strip())
        return " + ".join(parts)


def wedge(alpha: Form, beta: Form) -> Form:
    """Exterior product, bilinear over the ring, Koszul-graded-commutative."""
    alpha._check(beta, same_degree=False)
    ring = alpha.ring
    out = Form(ring, alpha.degree + beta.degree)
    if alpha.degree + beta.degree > ring.n:
        return out
    acc: dict[tuple, SmoothExpr] = {}
    for ia, fa in alpha.coeffs.items():
        for ib, fb in beta.coeffs.items():
            sign, merged = merge_indices(ia, ib)
            if merged is None:
                continue
            term = fa.rep * fb.rep
            if sign < 0:
                term = -term
            acc[merged] = acc[merged] + term if merged in acc else term
    for idx, e in acc.items():
        n = normalize(e)
        if not ex.is_zero(n):
            out.coeffs[idx] = RingElement.raw(ring, n)
    return out


def d(alpha: Form) -> Form:
    """Exterior differential: d(sum f_I dx_I) = sum df_I wedge dx_I."""
    ring = alpha.ring
    out = Form(ring, alpha.degree + 1)
    if alpha.degree + 1 > ring.n:
        return out
    acc: dict[tuple, SmoothExpr] = {}
    for idx, f in alpha.coeffs.items():
        for i in range(1, ring.n + 1):
            df = normalize(ex.partial(f.rep, i))
            if ex.is_zero(df):
                continue
            sign, merged = merge_indices((i,), idx)
            if merged is None:
                continue
            term = df if sign > 0 else -df
            acc[merged] = acc[merged] + term if merged in acc else term
    for idx, e in acc.items():
        n = normalize(e)
        if not ex.is_zero(n):
            out.coeffs[idx] = RingElement.raw(ring, n)
    return out


def pullback(phi: RingHom, alpha: Form) -> Form:
    """Lambda(phi): f_I dx_I |-> phi(f_I) d(phi(x_i1)) ^ ... ^ d(phi(x_ik))."""
    if alpha.ring is not phi.source:
        raise PresentationMismatch("form is not over the source of the hom")
    target = phi.target
    basis_pullbacks = []
    for im in phi.images:
        coeffs = {}
        for l in range(1, target.n + 1):
            dl = normalize(ex.partial(im.rep, l))
            if not ex.is_zero(dl):
                coeffs[(l,)] = RingElement.raw(target, dl)
        one = Form(target, 1)
        one.coeffs = coeffs
        basis_pullbacks.append(one)
    out = Form(target, alpha.degree)
    for idx, f in alpha.coeffs.items():
        term = Form.scalar(target, RingElement.raw(target, phi.apply_raw(f.rep)))
        for i in idx:
            term = wedge(term, basis_pullbacks[i - 1])
        out = out + term if term.degree == out.degree else out
    return out


def contract_form(v: Derivation, alpha: Form) -> Form:
    """Interior product: the degree -1 derivation pairing with a tangent field."""
    if alpha.ring is not v.ring:
        raise PresentationMismatch("derivation over a different ring")
    out = Form(alpha.ring, alpha.degree - 1)
    if alpha.degree == 0:
        return out
    acc: dict[tuple, SmoothExpr] = {}
    for idx, f in alpha.coeffs.items():
        for r, i in enumerate(idx):
            a = v.coeffs[i - 1]
            if a.is_zero_rep():
                continue
            rest = idx[:r] + idx[r + 1:]
            term = f.rep * a.rep
            if r % 2 == 1:
                term = -term
            acc[rest] = acc[rest] + term if rest in acc else term
    for idx, e in acc.items():
        n = normalize(e)
        if not ex.is_zero(n):
            out.coeffs[idx] = RingElement.raw(alpha.ring, n)
    return out


def _relation_rows(ring: RingPresentation, degree: int, index_list: list[tuple]):
    """Degree-k relation generators dg_j ^ dx_K expanded over the dx_I basis."""
    import itertools

    n = ring.n
    pos = {idx: c for c, idx in enumerate(index_list)}
    rows = []
    grads = [
        [to_poly(normalize(ex.partial(g, i))) for i in range(1, n + 1)]
        for g in ring.gens
    ]
    for j in range(len(ring.gens)):
        for K in itertools.combinations(range(1, n + 1), degree - 1):
            row = [Poly.zero(n) for _ in index_list]
            for i in range(1, n + 1):
                sign, merged = merge_indices((i,), K)
                if merged is None:
                    continue
                p = grads[j][i - 1]
                if p.is_zero():
                    continue
                row[pos[merged]] = row[pos[merged]] + (p if sign > 0 else -p)
            if any(not p.is_zero() for p in row):
                rows.append(row)
    return rows


def form_equal(alpha: Form, beta: Form, degree_bound: int = 6,
               seed: int | None = None) -> Verdict:
    """Equality in the quotient CDGA: coefficientwise membership of the
    difference in the degree-k relation submodule, decided exactly up to the
    cofactor degree bound on polynomial data."""
    alpha._check(beta)
    ring = alpha.ring
    k = alpha.degree
    diff = alpha - beta
    if diff.is_zero_rep():
        return Verdict(PROVED_EQUAL)
    if k == 0:
        return equal(ring, diff.coeffs[()], 0, seed=seed)
    if k > ring.n or k < 0:
        return Verdict(PROVED_EQUAL)
    import itertools

    index_list = list(itertools.combinations(range(1, ring.n + 1), k))
    target = diff.coeff_polys(index_list)
    if target is not None and ring.is_polynomial:
        if not ring.gens:
            return Verdict(PROVED_UNEQUAL, reason="free module: no relations")
        rows = _relation_rows(ring, k, index_list)
        cof, _ = module_membership(ring, rows, target, degree_bound)
        if cof is not None:
            return Verdict(PROVED_EQUAL, degree_bound=degree_bound)
        return Verdict(
            PROVED_UNEQUAL,
            degree_bound=degree_bound,
            reason="infeasible cofactor system",
        )
    if not ring.gens:
        # free module over a free ring: componentwise element equality
        worst: Verdict | None = None
        for idx in index_list:
            c = diff.coeffs.get(idx)
            if c is None:
                continue
            v = equal(ring, c, 0, seed=seed)
            if v.unequal:
                return Verdict(
                    NUMERICALLY_UNEQUAL if v.kind == NUMERICALLY_UNEQUAL else v.kind,
                    witness=v.witness,
                    seed=v.seed,
                    max_deviation=v.max_deviation,
                )
            if v.is_unknown:
                worst = v
        if worst is not None:
            return worst
        return Verdict(NUMERICALLY_EQUAL, seed=seed if seed is not None else ring.oracle.seed)
    return _falsify_by_contraction(diff, degree_bound, seed)


def _falsify_by_contraction(diff: Form, degree_bound: int, seed: int | None) -> Verdict:
    """Sound falsification for non-polynomial data: repeated contraction with
    tangent fields maps the relation submodule into the ideal, so a confident
    nonzero after full contraction refutes equality."""
    ring = diff.ring
    if not ring.is_polynomial:
        return Verdict(
            UNKNOWN,
            reason="non-polynomial presentation: no tangent fields to probe with",
        )
    fields = enumerate_tangent_derivations(ring, min(degree_bound, 2))
    if not fields:
        return Verdict(UNKNOWN, reason="no tangent fields at this bound")
    import itertools

    budget = 24
    for combo in itertools.product(fields, repeat=diff.degree):
        budget -= 1
        if budget < 0:
            break
        reduced = diff
        for v in combo:
            reduced = contract_form(v, reduced)
        scalar = reduced.coeffs.get(())
        if scalar is None:
            continue
        v0 = equal(ring, scalar, 0, seed=seed)
        if v0.unequal:
            return Verdict(
                NUMERICALLY_UNEQUAL,
                witness=v0.witness,
                seed=v0.seed,
                max_deviation=v0.max_deviation,
                reason="nonzero full contraction against tangent fields",
            )
    return Verdict(
        UNKNOWN,
        reason="non-polynomial coefficients; contraction probes found no separation",
    )


# ---------------------------------------------------------------------------
# Form literals: "f * dx1^dx3 + g * dx2^dx3"

_BASIS_RE = re.compile(r"^\s*dx(\d+)(\s*\^\s*dx\d+)*\s*$")


def parse_form(text: str, ring: RingPresentation) -> Form:
    """Parse the CLI form-literal grammar over the given ring."""
    terms = _split_top(text)
    result: Form | None = None
    for sign, chunk in terms:
        factors = _split_factors(chunk)
        basis: list[int] = []
        coeff_parts: list[str] = []
        for factor in factors:
            if _BASIS_RE.match(factor):
                basis.extend(int(m) for m in re.findall(r"dx(\d+)", factor))
            else:
                coeff_parts.append(factor)
        coeff_text = "*".join(coeff_parts) if coeff_parts else "1"
        coeff = ex.parse(coeff_text, ring.n)
        if sign < 0:
            coeff = normalize(-coeff)
        term = Form.scalar(ring, RingElement.raw(ring, coeff))
        for i in basis:
            if not 1 <= i <= ring.n:
                raise FormError(f"basis symbol dx{i} out of range for n={ring.n}")
            term = wedge(term, Form(ring, 1, {(i,): 1}))
        if result is None:
            result = term
        elif term.degree != result.degree:
            raise FormError("mixed degrees in form literal")
        else:
            result = result + term
    if result is None:
        raise FormError("empty form literal")
    return result


def _split_top(text: str) -> list[tuple[int, str]]:
    terms = []
    depth = 0
    current = []
    sign = 1
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if depth == 0 and ch in "+-" and current and current[-1] not in "*^(+-":
            terms.append((sign, "".join(current).strip()))
            sign = 1 if ch == "+" else -1
            current = []
            continue
        if not current and ch == "-":
            sign = -sign
            continue
        if not current and ch == "+":
            continue
        current.append(ch)
    if "".join(current).strip():
        terms.append((sign, "".join(current).strip()))
    return terms


def _split_factors(chunk: str) -> list[str]:
    factors = []
    depth = 0
    current = []
    for ch in chunk:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "*" and depth == 0:
            factors.append("".join(current).strip())
            current = []
            continue
        current.append(ch)
    if "".join(current).strip():
        factors.append("".join(current).strip())
    return factors


def form_to_text(alpha: Form) -> str:
    red = alpha.reduced()
    if not red.coeffs:
        return "0"
    parts = []
    for idx in sorted(red.coeffs):
        coeff = to_text(red.coeffs[idx].rep)
        basis = "^".join(f"dx{i}" for i in idx)
        if basis:
            parts.append(f"{coeff} * {basis}" if coeff != "1" else basis)
        else:
            parts.append(coeff)
    return " + ".join(parts)
