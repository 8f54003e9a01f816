"""Multivariate polynomials with exact rational coefficients.

Monomials are exponent tuples of fixed length ``nvars``; coefficients are
``fractions.Fraction``.  The monomial order used throughout is graded
lexicographic: compare total degree first, then the exponent tuples
lexicographically with x1 > x2 > ...  This order is degree compatible, so
polynomial reduction never increases total degree.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable


Monomial = tuple[int, ...]


def grlex_key(mono: Monomial) -> tuple:
    return (sum(mono), mono)


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def mono_divides(a: Monomial, b: Monomial) -> bool:
    """True when monomial a divides monomial b."""
    return all(x <= y for x, y in zip(a, b))


def mono_div(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def monomials_up_to_degree(nvars: int, degree: int) -> list[Monomial]:
    """All exponent tuples of total degree <= degree, in graded-lex order."""
    out: list[Monomial] = []

    def rec(prefix: list[int], remaining: int, slots: int) -> None:
        if slots == 0:
            out.append(tuple(prefix))
            return
        for e in range(remaining + 1):
            rec(prefix + [e], remaining - e, slots - 1)

    rec([], degree, nvars)
    out.sort(key=grlex_key)
    return out


class Poly:
    """A polynomial stored as a map from exponent tuples to nonzero Fractions."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[Monomial, Fraction] | None = None):
        self.nvars = nvars
        self.terms: dict[Monomial, Fraction] = {}
        if terms:
            for mono, coef in terms.items():
                if len(mono) != nvars:
                    raise ValueError(f"monomial {mono} has wrong arity for {nvars} vars")
                c = Fraction(coef)
                if c != 0:
                    self.terms[mono] = c

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls(nvars)

    @classmethod
    def const(cls, nvars: int, value) -> "Poly":
        c = Fraction(value)
        if c == 0:
            return cls(nvars)
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, nvars: int, index: int) -> "Poly":
        """The coordinate polynomial x_index (1-based index)."""
        if not 1 <= index <= nvars:
            raise ValueError(f"variable index {index} out of range 1..{nvars}")
        mono = tuple(1 if i == index - 1 else 0 for i in range(nvars))
        return cls(nvars, {mono: Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def copy(self) -> "Poly":
        p = Poly(self.nvars)
        p.terms = dict(self.terms)
        return p

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other: "Poly") -> "Poly":
        res = dict(self.terms)
        for mono, coef in other.terms.items():
            c = res.get(mono, Fraction(0)) + coef
            if c == 0:
                res.pop(mono, None)
            else:
                res[mono] = c
        p = Poly(self.nvars)
        p.terms = res
        return p

    def __neg__(self) -> "Poly":
        p = Poly(self.nvars)
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        res: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                c = res.get(m, Fraction(0)) + c1 * c2
                if c == 0:
                    res.pop(m, None)
                else:
                    res[m] = c
        p = Poly(self.nvars)
        p.terms = res
        return p

    def scale(self, value) -> "Poly":
        c = Fraction(value)
        p = Poly(self.nvars)
        if c != 0:
            p.terms = {m: c * v for m, v in self.terms.items()}
        return p

    def term_mul(self, mono: Monomial, coef: Fraction) -> "Poly":
        p = Poly(self.nvars)
        if coef != 0:
            p.terms = {mono_mul(m, mono): c * coef for m, c in self.terms.items()}
        return p

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative exponent")
        result = Poly.const(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def partial(self, index: int) -> "Poly":
        """Partial derivative with respect to x_index (1-based)."""
        i = index - 1
        res: dict[Monomial, Fraction] = {}
        for mono, coef in self.terms.items():
            e = mono[i]
            if e == 0:
                continue
            m = tuple(x - 1 if j == i else x for j, x in enumerate(mono))
            res[m] = res.get(m, Fraction(0)) + coef * e
        p = Poly(self.nvars)
        p.terms = {m: c for m, c in res.items() if c != 0}
        return p

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(m) for m in self.terms)

    def leading(self) -> tuple[Monomial, Fraction]:
        """Leading (monomial, coefficient) in graded-lex order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=grlex_key)
        return m, self.terms[m]

    def monic(self) -> "Poly":
        _, c = self.leading()
        return self.scale(Fraction(1) / c)

    def sorted_terms(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self.terms.items(), key=lambda mc: grlex_key(mc[0]), reverse=True)

    def coefficient(self, mono: Monomial) -> Fraction:
        return self.terms.get(mono, Fraction(0))

    def constant_part(self) -> Fraction:
        return self.terms.get((0,) * self.nvars, Fraction(0))

    def is_constant(self) -> bool:
        return all(sum(m) == 0 for m in self.terms)

    def eval_exact(self, point: Iterable) -> Fraction:
        pt = [Fraction(x) for x in point]
        if len(pt) != self.nvars:
            raise ValueError("point has wrong dimension")
        total = Fraction(0)
        for mono, coef in self.terms.items():
            v = coef
            for x, e in zip(pt, mono):
                if e:
                    v *= x**e
            total += v
        return total

    def eval_float(self, point: Iterable) -> float:
        pt = list(point)
        if len(pt) != self.nvars:
            raise ValueError("point has wrong dimension")
        total = 0.0
        for mono, coef in self.terms.items():
            v = float(coef)
            for x, e in zip(pt, mono):
                if e:
                    v *= float(x) ** e
            total += v
        return total

    def __repr__(self) -> str:
        if not self.terms:
            return "Poly(0)"
        parts = []
        for mono, coef in self.sorted_terms():
            factors = [str(coef)]
            for i, e in enumerate(mono):
                if e == 1:
                    factors.append(f"x{i + 1}")
                elif e > 1:
                    factors.append(f"x{i + 1}^{e}")
            parts.append("*".join(factors))
        return "Poly(" + " + ".join(parts) + ")"


def divmod_multi(f: Poly, divisors: list[Poly]) -> tuple[list[Poly], Poly]:
    """Multivariate division: f = sum(q_i * divisors_i) + r.

    No monomial of the remainder r is divisible by any divisor's leading
    monomial.  With a Groebner basis as divisors, r is the unique normal form.
    """
    quotients = [Poly.zero(f.nvars) for _ in divisors]
    remainder = Poly.zero(f.nvars)
    leads = [d.leading() for d in divisors]
    work = f.copy()
    while not work.is_zero():
        mono, coef = work.leading()
        for i, (lm, lc) in enumerate(leads):
            if mono_divides(lm, mono):
                t_mono = mono_div(mono, lm)
                t_coef = coef / lc
                quotients[i] = quotients[i] + Poly(f.nvars, {t_mono: t_coef})
                work = work - divisors[i].term_mul(t_mono, t_coef)
                break
        else:
            remainder = remainder + Poly(f.nvars, {mono: coef})
            work = work - Poly(f.nvars, {mono: coef})
    return quotients, remainder


def simplex_monomial_integral(exponents: Monomial) -> Fraction:
    """Exact integral of t^a over the unit simplex {t_i >= 0, sum t_i <= 1}.

    Equals prod(a_i!) / (k + sum a_i)! for k variables; used as the
    independent quadrature oracle.
    """
    k = len(exponents)
    num = 1
    for a in exponents:
        num *= math.factorial(a)
    return Fraction(num, math.factorial(k + sum(exponents)))
