"""Symbolic kernel for smooth expressions over variables x1..xn.

Expression trees are immutable and closed under a fixed primitive library:
addition, multiplication, negation, nonnegative integer powers, reciprocal
(with a declared nonvanishing assumption), sin, cos, exp, and the smooth step
rho0 (identically 1 on t <= 1 and 0 on t >= 2, glued with the classical
exp(-1/t) construction).  Differentiating rho0 leaves the public library, so
the kernel carries an internal family rho0_d1, rho0_d2, ... of its higher
derivatives; they print and parse like any other function, keeping the tree
language closed under partial derivatives.

Normal forms expand the polynomial fragment exactly (rational coefficients,
graded-lex monomial order) and treat maximal transcendental subtrees as opaque
atoms whose arguments are recursively normalized.  normalize is idempotent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .poly import Poly


class ExprError(Exception):
    """Base error for the expression kernel."""


class ParseError(ExprError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class EvaluationError(ExprError):
    """Numeric evaluation failed (domain violation, overflow, bad dimension)."""


class NonRationalEvaluation(ExprError):
    """Exact evaluation hit a transcendental value."""


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class SmoothExpr:
    nvars: int

    def _coerce(self, other) -> "SmoothExpr":
        if isinstance(other, SmoothExpr):
            if other.nvars != self.nvars:
                raise ExprError("mixed variable contexts")
            return other
        return Const(self.nvars, Fraction(other))

    def __add__(self, other):
        return Add(self.nvars, (self, self._coerce(other)))

    def __radd__(self, other):
        return Add(self.nvars, (self._coerce(other), self))

    def __sub__(self, other):
        return Add(self.nvars, (self, Neg(self.nvars, self._coerce(other))))

    def __rsub__(self, other):
        return Add(self.nvars, (self._coerce(other), Neg(self.nvars, self)))

    def __mul__(self, other):
        return Mul(self.nvars, (self, self._coerce(other)))

    def __rmul__(self, other):
        return Mul(self.nvars, (self._coerce(other), self))

    def __neg__(self):
        return Neg(self.nvars, self)

    def __pow__(self, k: int):
        return Pow(self.nvars, self, k)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Var(SmoothExpr):
    index: int

    def __post_init__(self):
        if not 1 <= self.index <= self.nvars:
            raise ExprError(
                f"variable index {self.index} out of range 1..{self.nvars}"
            )


@dataclass(frozen=True)
class Const(SmoothExpr):
    value: Fraction

    def __post_init__(self):
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Add(SmoothExpr):
    args: tuple

    def __post_init__(self):
        _check_args(self)


@dataclass(frozen=True)
class Mul(SmoothExpr):
    args: tuple

    def __post_init__(self):
        _check_args(self)


@dataclass(frozen=True)
class Neg(SmoothExpr):
    arg: SmoothExpr

    def __post_init__(self):
        _check_child(self, self.arg)


@dataclass(frozen=True)
class Pow(SmoothExpr):
    base: SmoothExpr
    exponent: int

    def __post_init__(self):
        _check_child(self, self.base)
        if not isinstance(self.exponent, int) or self.exponent < 0:
            raise ExprError("exponent must be a nonnegative integer")


@dataclass(frozen=True)
class Recip(SmoothExpr):
    """1/arg, under the declared assumption that arg does not vanish."""

    arg: SmoothExpr

    def __post_init__(self):
        _check_child(self, self.arg)


CALL_FUNCS = ("sin", "cos", "exp", "rho0")


@dataclass(frozen=True)
class Call(SmoothExpr):
    """Unary primitive application; order > 0 encodes d^order/dt^order of rho0."""

    func: str
    order: int
    arg: SmoothExpr

    def __post_init__(self):
        if self.func not in CALL_FUNCS:
            raise ExprError(f"unknown function {self.func!r}")
        if self.order and self.func != "rho0":
            raise ExprError("derivative orders only apply to rho0")
        if self.order < 0:
            raise ExprError("negative derivative order")
        _check_child(self, self.arg)


@dataclass(frozen=True)
class Compose(SmoothExpr):
    """Application of an m-ary expression to m argument expressions."""

    inner: SmoothExpr
    args: tuple

    def __post_init__(self):
        if len(self.args) != self.inner.nvars:
            raise ExprError(
                f"arity mismatch: inner expects {self.inner.nvars} args, got {len(self.args)}"
            )
        for a in self.args:
            _check_child(self, a)


def _check_args(node) -> None:
    if not node.args:
        raise ExprError("empty argument list")
    for a in node.args:
        _check_child(node, a)


def _check_child(node, child) -> None:
    if not isinstance(child, SmoothExpr):
        raise ExprError(f"expected SmoothExpr, got {type(child).__name__}")
    if child.nvars != node.nvars:
        raise ExprError("mixed variable contexts")


def sin(a: SmoothExpr) -> SmoothExpr:
    return Call(a.nvars, "sin", 0, a)


def cos(a: SmoothExpr) -> SmoothExpr:
    return Call(a.nvars, "cos", 0, a)


def exp(a: SmoothExpr) -> SmoothExpr:
    return Call(a.nvars, "exp", 0, a)


def rho0(a: SmoothExpr, order: int = 0) -> SmoothExpr:
    return Call(a.nvars, "rho0", order, a)


def recip(a: SmoothExpr) -> SmoothExpr:
    return Recip(a.nvars, a)


def var(nvars: int, index: int) -> Var:
    return Var(nvars, index)


def const(nvars: int, value) -> Const:
    return Const(nvars, Fraction(value))


# ---------------------------------------------------------------------------
# Structural keys (total order on canonical subtrees)


def structural_key(e: SmoothExpr) -> tuple:
    if isinstance(e, Var):
        return (0, e.index)
    if isinstance(e, Const):
        return (1, e.value.numerator, e.value.denominator)
    if isinstance(e, Call):
        return (2, e.func, e.order, structural_key(e.arg))
    if isinstance(e, Recip):
        return (3, structural_key(e.arg))
    if isinstance(e, Neg):
        return (4, structural_key(e.arg))
    if isinstance(e, Pow):
        return (5, e.exponent, structural_key(e.base))
    if isinstance(e, Add):
        return (6, tuple(structural_key(a) for a in e.args))
    if isinstance(e, Mul):
        return (7, tuple(structural_key(a) for a in e.args))
    if isinstance(e, Compose):
        return (
            8,
            structural_key(e.inner),
            tuple(structural_key(a) for a in e.args),
        )
    raise ExprError(f"unknown node {type(e).__name__}")


# ---------------------------------------------------------------------------
# Substitution and composition


def substitute(e: SmoothExpr, args: tuple, nvars: int) -> SmoothExpr:
    """Replace Var i by args[i-1]; result lives in an nvars context."""
    if isinstance(e, Var):
        return args[e.index - 1]
    if isinstance(e, Const):
        return Const(nvars, e.value)
    if isinstance(e, Add):
        return Add(nvars, tuple(substitute(a, args, nvars) for a in e.args))
    if isinstance(e, Mul):
        return Mul(nvars, tuple(substitute(a, args, nvars) for a in e.args))
    if isinstance(e, Neg):
        return Neg(nvars, substitute(e.arg, args, nvars))
    if isinstance(e, Pow):
        return Pow(nvars, substitute(e.base, args, nvars), e.exponent)
    if isinstance(e, Recip):
        return Recip(nvars, substitute(e.arg, args, nvars))
    if isinstance(e, Call):
        return Call(nvars, e.func, e.order, substitute(e.arg, args, nvars))
    if isinstance(e, Compose):
        return Compose(nvars, e.inner, tuple(substitute(a, args, nvars) for a in e.args))
    raise ExprError(f"unknown node {type(e).__name__}")


def compose(g: SmoothExpr, args, nvars: int | None = None) -> SmoothExpr:
    """Apply an m-ary expression to m arguments; returns a normalized result.

    For m = 0 (a constant viewed as a 0-ary operation) the target context
    nvars must be given explicitly.
    """
    args = tuple(args)
    if len(args) != g.nvars:
        raise ExprError(f"arity mismatch: expected {g.nvars} arguments, got {len(args)}")
    if args:
        n = args[0].nvars
        for a in args:
            if a.nvars != n:
                raise ExprError("composition arguments live in different contexts")
        if nvars is not None and nvars != n:
            raise ExprError("explicit nvars disagrees with arguments")
    else:
        if nvars is None:
            raise ExprError("0-ary composition needs an explicit variable count")
        n = nvars
    return normalize(Compose(n, g, args))


# ---------------------------------------------------------------------------
# Partial derivatives (symbolic chain rule)


def partial(e: SmoothExpr, i: int) -> SmoothExpr:
    """Exact partial derivative with respect to x_i (1-based), unnormalized."""
    if not 1 <= i <= e.nvars:
        raise ExprError(f"derivative index {i} out of range 1..{e.nvars}")
    return _partial(e, i)


def _partial(e: SmoothExpr, i: int) -> SmoothExpr:
    n = e.nvars
    zero = Const(n, Fraction(0))
    if isinstance(e, Var):
        return Const(n, Fraction(1 if e.index == i else 0))
    if isinstance(e, Const):
        return zero
    if isinstance(e, Add):
        return Add(n, tuple(_partial(a, i) for a in e.args))
    if isinstance(e, Mul):
        terms = []
        for j, a in enumerate(e.args):
            rest = e.args[:j] + e.args[j + 1:]
            factors = (_partial(a, i),) + rest
            terms.append(Mul(n, factors) if len(factors) > 1 else factors[0])
        return Add(n, tuple(terms)) if len(terms) > 1 else terms[0]
    if isinstance(e, Neg):
        return Neg(n, _partial(e.arg, i))
    if isinstance(e, Pow):
        if e.exponent == 0:
            return zero
        lead = Const(n, Fraction(e.exponent))
        if e.exponent == 1:
            return Mul(n, (lead, _partial(e.base, i)))
        return Mul(n, (lead, Pow(n, e.base, e.exponent - 1), _partial(e.base, i)))
    if isinstance(e, Recip):
        # d(1/u) = -u^{-2} du
        return Neg(n, Mul(n, (Pow(n, Recip(n, e.arg), 2), _partial(e.arg, i))))
    if isinstance(e, Call):
        outer = _call_derivative(e)
        return Mul(n, (outer, _partial(e.arg, i)))
    if isinstance(e, Compose):
        # X(g(a_1..a_m)) = sum_j (d_j g)(a_1..a_m) * X(a_j)
        terms = []
        for j, a in enumerate(e.args, start=1):
            dg = _partial(e.inner, j)
            terms.append(Mul(n, (Compose(n, dg, e.args), _partial(a, i))))
        if not terms:
            return zero
        return Add(n, tuple(terms)) if len(terms) > 1 else terms[0]
    raise ExprError(f"unknown node {type(e).__name__}")


def _call_derivative(e: Call) -> SmoothExpr:
    n = e.nvars
    if e.func == "sin":
        return Call(n, "cos", 0, e.arg)
    if e.func == "cos":
        return Neg(n, Call(n, "sin", 0, e.arg))
    if e.func == "exp":
        return Call(n, "exp", 0, e.arg)
    return Call(n, "rho0", e.order + 1, e.arg)


def gradient(e: SmoothExpr) -> list[SmoothExpr]:
    return [normalize(partial(e, i)) for i in range(1, e.nvars + 1)]


# ---------------------------------------------------------------------------
# Normalization

# A semi-polynomial maps monomials over generators to rational coefficients.
# Generators are either ambient variables, keyed (0, i), or transcendental
# atom subtrees, keyed (1, structural_key(atom)).  Monomials are tuples of
# (generator key, exponent) pairs sorted by generator key.

_ONE: dict = {(): Fraction(1)}


def _sp_const(c: Fraction) -> dict:
    return {(): c} if c != 0 else {}


def _sp_add(p: dict, q: dict) -> dict:
    res = dict(p)
    for m, c in q.items():
        v = res.get(m, Fraction(0)) + c
        if v == 0:
            res.pop(m, None)
        else:
            res[m] = v
    return res


def _sp_scale(p: dict, c: Fraction) -> dict:
    if c == 0:
        return {}
    return {m: c * v for m, v in p.items()}


def _sp_mono_mul(m1: tuple, m2: tuple) -> tuple:
    exps: dict = {}
    for g, e in m1 + m2:
        exps[g] = exps.get(g, 0) + e
    return tuple(sorted(exps.items()))


def _sp_mul(p: dict, q: dict) -> dict:
    res: dict = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _sp_mono_mul(m1, m2)
            v = res.get(m, Fraction(0)) + c1 * c2
            if v == 0:
                res.pop(m, None)
            else:
                res[m] = v
    return res


def _sp_pow(p: dict, k: int) -> dict:
    result = dict(_ONE)
    base = p
    while k:
        if k & 1:
            result = _sp_mul(result, base)
        base = _sp_mul(base, base)
        k >>= 1
    return result


def _semipoly(e: SmoothExpr, atoms: dict) -> dict:
    if isinstance(e, Var):
        return {(((0, e.index), 1),): Fraction(1)}
    if isinstance(e, Const):
        return _sp_const(e.value)
    if isinstance(e, Add):
        res: dict = {}
        for a in e.args:
            res = _sp_add(res, _semipoly(a, atoms))
        return res
    if isinstance(e, Mul):
        res = dict(_ONE)
        for a in e.args:
            res = _sp_mul(res, _semipoly(a, atoms))
        return res
    if isinstance(e, Neg):
        return _sp_scale(_semipoly(e.arg, atoms), Fraction(-1))
    if isinstance(e, Pow):
        return _sp_pow(_semipoly(e.base, atoms), e.exponent)
    if isinstance(e, Compose):
        return _semipoly(substitute(e.inner, e.args, e.nvars), atoms)
    if isinstance(e, (Recip, Call)):
        arg = _rebuild(_semipoly(e.arg, atoms), atoms, e.nvars)
        folded = _fold_atom(e, arg)
        if folded is not None:
            return folded
        atom = (
            Recip(e.nvars, arg)
            if isinstance(e, Recip)
            else Call(e.nvars, e.func, e.order, arg)
        )
        key = (1, structural_key(atom))
        atoms[key] = atom
        return {((key, 1),): Fraction(1)}
    raise ExprError(f"unknown node {type(e).__name__}")


def _fold_atom(e: SmoothExpr, arg: SmoothExpr) -> dict | None:
    """Exact constant folding where the primitive has a rational value."""
    if not isinstance(arg, Const):
        return None
    c = arg.value
    if isinstance(e, Recip):
        if c == 0:
            raise EvaluationError("recip of the zero constant")
        return _sp_const(Fraction(1) / c)
    if e.func == "rho0":
        if e.order == 0:
            if c <= 1:
                return _sp_const(Fraction(1))
            if c >= 2:
                return _sp_const(Fraction(0))
            return None
        if c <= 1 or c >= 2:
            return _sp_const(Fraction(0))
        return None
    if c == 0:
        if e.func == "sin":
            return _sp_const(Fraction(0))
        if e.func in ("cos", "exp"):
            return _sp_const(Fraction(1))
    return None


def _mono_sort_key(mono: tuple) -> tuple:
    # graded-lex, descending display order: higher degree first; within a
    # degree, earlier generators with higher exponents first.
    deg = sum(e for _, e in mono)
    expanded = tuple(g for g, e in mono for _ in range(e))
    return (-deg, expanded)


def _rebuild(sp: dict, atoms: dict, nvars: int) -> SmoothExpr:
    if not sp:
        return Const(nvars, Fraction(0))
    terms = []
    for mono in sorted(sp, key=_mono_sort_key):
        coef = sp[mono]
        factors = []
        for g, e in mono:
            base = Var(nvars, g[1]) if g[0] == 0 else atoms[g]
            factors.append(base if e == 1 else Pow(nvars, base, e))
        c = abs(coef)
        if not factors:
            term: SmoothExpr = Const(nvars, c)
        elif c == 1:
            term = factors[0] if len(factors) == 1 else Mul(nvars, tuple(factors))
        else:
            term = Mul(nvars, (Const(nvars, c),) + tuple(factors))
        if coef < 0:
            term = Neg(nvars, term)
        terms.append(term)
    return terms[0] if len(terms) == 1 else Add(nvars, tuple(terms))


def normalize(e: SmoothExpr) -> SmoothExpr:
    """Canonical form: polynomial fragment expanded, atoms canonicalized.

    Idempotent; equal smooth expressions with the same transcendental atoms
    normalize to the identical tree.
    """
    atoms: dict = {}
    return _rebuild(_semipoly(e, atoms), atoms, e.nvars)


def is_zero(e: SmoothExpr) -> bool:
    nf = normalize(e)
    return isinstance(nf, Const) and nf.value == 0


def to_poly(e: SmoothExpr) -> Poly | None:
    """The expression as an exact Poly, or None if it has transcendental atoms."""
    atoms: dict = {}
    sp = _semipoly(e, atoms)
    terms = {}
    for mono, coef in sp.items():
        exps = [0] * e.nvars
        for g, k in mono:
            if g[0] != 0:
                return None
            exps[g[1] - 1] = k
        terms[tuple(exps)] = coef
    return Poly(e.nvars, terms)


def from_poly(p: Poly) -> SmoothExpr:
    sp = {}
    for mono, coef in p.terms.items():
        key = tuple(((0, i + 1), e) for i, e in enumerate(mono) if e)
        sp[key] = coef
    return _rebuild(sp, {}, p.nvars)


# ---------------------------------------------------------------------------
# Numeric evaluation

_RHO0_GUARD = 0.01


class _Jet:
    """Truncated Taylor series used for exact-order derivatives of rho0."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = list(coeffs)

    def __add__(self, other):
        return _Jet([a + b for a, b in zip(self.c, other.c)])

    def __sub__(self, other):
        return _Jet([a - b for a, b in zip(self.c, other.c)])

    def recip(self):
        k = len(self.c)
        b = [0.0] * k
        b[0] = 1.0 / self.c[0]
        for m in range(1, k):
            s = sum(self.c[j] * b[m - j] for j in range(1, m + 1))
            b[m] = -b[0] * s
        return _Jet(b)

    def exp(self):
        k = len(self.c)
        e = [0.0] * k
        e[0] = math.exp(self.c[0])
        for m in range(1, k):
            e[m] = sum(j * self.c[j] * e[m - j] for j in range(1, m + 1)) / m
        return _Jet(e)


def _rho0_value(t: float, order: int) -> float:
    """Value of rho0 (order 0) or its order-th derivative at t.

    rho0(t) = 1/(1 + exp(1/(2-t) - 1/(t-1))) on (1, 2), extended by 1 and 0.
    Outside (1 + guard, 2 - guard) the derivatives are below 1e-19 and are
    returned as exact 0; the plateaus return exact 1 and 0.
    """
    if order == 0:
        if t <= 1.0:
            return 1.0
        if t >= 2.0:
            return 0.0
        w = 1.0 / (2.0 - t) - 1.0 / (t - 1.0)
        if w >= 0:
            ew = math.exp(-w)
            return ew / (1.0 + ew)
        return 1.0 / (1.0 + math.exp(w))
    if t <= 1.0 + _RHO0_GUARD or t >= 2.0 - _RHO0_GUARD:
        return 0.0
    k = order + 1
    a = _Jet([2.0 - t, -1.0] + [0.0] * (k - 1))
    b = _Jet([t - 1.0, 1.0] + [0.0] * (k - 1))
    w = a.recip() - b.recip()
    one = _Jet([1.0] + [0.0] * k)
    sig = (one + w.exp()).recip()
    return sig.c[order] * math.factorial(order)


def evaluate(e: SmoothExpr, point) -> float:
    """IEEE-double value of e at a point of matching dimension."""
    pt = [float(x) for x in point]
    if len(pt) != e.nvars:
        raise EvaluationError(
            f"dimension mismatch: expression over {e.nvars} vars, point of length {len(pt)}"
        )
    return _ev(e, pt)


def _ev(e: SmoothExpr, pt: list[float]) -> float:
    if isinstance(e, Var):
        return pt[e.index - 1]
    if isinstance(e, Const):
        return float(e.value)
    if isinstance(e, Add):
        return math.fsum(_ev(a, pt) for a in e.args)
    if isinstance(e, Mul):
        v = 1.0
        for a in e.args:
            v *= _ev(a, pt)
        return v
    if isinstance(e, Neg):
        return -_ev(e.arg, pt)
    if isinstance(e, Pow):
        base = _ev(e.base, pt)
        try:
            return base**e.exponent
        except OverflowError as exc:
            raise EvaluationError("overflow in power") from exc
    if isinstance(e, Recip):
        v = _ev(e.arg, pt)
        if v == 0.0:
            raise EvaluationError("recip domain violation: argument vanishes at the point")
        return 1.0 / v
    if isinstance(e, Call):
        v = _ev(e.arg, pt)
        try:
            if e.func == "sin":
                return math.sin(v)
            if e.func == "cos":
                return math.cos(v)
            if e.func == "exp":
                return math.exp(v)
            return _rho0_value(v, e.order)
        except OverflowError as exc:
            raise EvaluationError("overflow in primitive") from exc
    if isinstance(e, Compose):
        inner_pt = [_ev(a, pt) for a in e.args]
        return _ev(e.inner, inner_pt)
    raise ExprError(f"unknown node {type(e).__name__}")


def evaluate_exact(e: SmoothExpr, point) -> Fraction:
    """Exact rational value; raises NonRationalEvaluation on transcendental atoms."""
    pt = [Fraction(x) for x in point]
    if len(pt) != e.nvars:
        raise EvaluationError("dimension mismatch")
    return _ev_exact(e, pt)


def _ev_exact(e: SmoothExpr, pt: list[Fraction]) -> Fraction:
    if isinstance(e, Var):
        return pt[e.index - 1]
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Add):
        total = Fraction(0)
        for a in e.args:
            total += _ev_exact(a, pt)
        return total
    if isinstance(e, Mul):
        total = Fraction(1)
        for a in e.args:
            total *= _ev_exact(a, pt)
        return total
    if isinstance(e, Neg):
        return -_ev_exact(e.arg, pt)
    if isinstance(e, Pow):
        return _ev_exact(e.base, pt) ** e.exponent
    if isinstance(e, Recip):
        v = _ev_exact(e.arg, pt)
        if v == 0:
            raise EvaluationError("recip domain violation")
        return Fraction(1) / v
    if isinstance(e, Call):
        v = _ev_exact(e.arg, pt)
        if e.func == "rho0":
            if e.order == 0:
                if v <= 1:
                    return Fraction(1)
                if v >= 2:
                    return Fraction(0)
            elif v <= 1 or v >= 2:
                return Fraction(0)
            raise NonRationalEvaluation("rho0 in the gluing region")
        if v == 0:
            return Fraction(0) if e.func == "sin" else Fraction(1)
        raise NonRationalEvaluation(f"{e.func} at a nonzero point")
    if isinstance(e, Compose):
        inner_pt = [_ev_exact(a, pt) for a in e.args]
        return _ev_exact(e.inner, inner_pt)
    raise ExprError(f"unknown node {type(e).__name__}")


# ---------------------------------------------------------------------------
# Parsing

_FUNCTION_NAMES = {"sin", "cos", "exp", "recip", "rho0"}


class _Tokenizer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self._skip_ws()
        if self.pos >= len(self.text):
            return ("end", "", self.pos)
        ch = self.text[self.pos]
        if ch.isdigit():
            j = self.pos
            while j < len(self.text) and self.text[j].isdigit():
                j += 1
            return ("int", self.text[self.pos:j], self.pos)
        if ch.isalpha() or ch == "_":
            j = self.pos
            while j < len(self.text) and (self.text[j].isalnum() or self.text[j] == "_"):
                j += 1
            return ("ident", self.text[self.pos:j], self.pos)
        if ch in "+-*^()/,":
            return (ch, ch, self.pos)
        raise ParseError(f"unexpected character {ch!r}", self.pos)

    def next(self):
        tok = self.peek()
        self.pos = tok[2] + len(tok[1])
        return tok


class _Parser:
    def __init__(self, text: str, nvars: int, names: dict[str, int] | None):
        self.toks = _Tokenizer(text)
        self.nvars = nvars
        self.names = names

    def parse(self) -> SmoothExpr:
        e = self.expr()
        kind, text, pos = self.toks.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {text!r}", pos)
        return e

    def expr(self) -> SmoothExpr:
        e = self.term()
        while True:
            kind, _, _ = self.toks.peek()
            if kind == "+":
                self.toks.next()
                e = e + self.term()
            elif kind == "-":
                self.toks.next()
                e = e - self.term()
            else:
                return e

    def term(self) -> SmoothExpr:
        e = self.factor()
        while True:
            kind, _, _ = self.toks.peek()
            if kind == "*":
                self.toks.next()
                e = e * self.factor()
            else:
                return e

    def factor(self) -> SmoothExpr:
        kind, _, _ = self.toks.peek()
        if kind == "-":
            self.toks.next()
            return Neg(self.nvars, self.factor())
        return self.power()

    def power(self) -> SmoothExpr:
        base = self.primary()
        kind, _, _ = self.toks.peek()
        if kind == "^":
            self.toks.next()
            k2, text, pos = self.toks.next()
            if k2 != "int":
                raise ParseError("expected a nonnegative integer exponent", pos)
            return Pow(self.nvars, base, int(text))
        return base

    def primary(self) -> SmoothExpr:
        kind, text, pos = self.toks.next()
        if kind == "int":
            value = Fraction(int(text))
            k2, _, _ = self.toks.peek()
            if k2 == "/":
                self.toks.next()
                k3, t3, p3 = self.toks.next()
                if k3 != "int":
                    raise ParseError("expected an integer denominator", p3)
                if int(t3) == 0:
                    raise ParseError("zero denominator", p3)
                value = Fraction(int(text), int(t3))
            return Const(self.nvars, value)
        if kind == "(":
            e = self.expr()
            k2, _, p2 = self.toks.next()
            if k2 != ")":
                raise ParseError("expected ')'", p2)
            return e
        if kind == "ident":
            k2, _, _ = self.toks.peek()
            if k2 == "(":
                return self.call(text, pos)
            return self.variable(text, pos)
        raise ParseError(f"unexpected token {text!r}", pos)

    def call(self, name: str, pos: int) -> SmoothExpr:
        order = 0
        func = name
        if name.startswith("rho0_d"):
            suffix = name[len("rho0_d"):]
            if not suffix.isdigit() or int(suffix) < 1:
                raise ParseError(f"unknown function {name!r}", pos)
            func, order = "rho0", int(suffix)
        elif name not in _FUNCTION_NAMES:
            raise ParseError(f"unknown function {name!r}", pos)
        self.toks.next()  # consume '('
        arg = self.expr()
        k2, _, p2 = self.toks.next()
        if k2 != ")":
            raise ParseError("expected ')'", p2)
        if func == "recip":
            return Recip(self.nvars, arg)
        return Call(self.nvars, func, order, arg)

    def variable(self, name: str, pos: int) -> SmoothExpr:
        if self.names is not None:
            if name in self.names:
                return Var(self.nvars, self.names[name])
            raise ParseError(f"unknown identifier {name!r}", pos)
        if name.startswith("x") and name[1:].isdigit():
            index = int(name[1:])
            if not 1 <= index <= self.nvars:
                raise ParseError(
                    f"variable x{index} out of range for {self.nvars} variables", pos
                )
            return Var(self.nvars, index)
        raise ParseError(f"unknown identifier {name!r}", pos)


def parse(text: str, nvars: int, names: dict[str, int] | None = None) -> SmoothExpr:
    """Parse the expression grammar; returns the normalized AST.

    Identifiers default to x1..x<nvars>; a names mapping substitutes a custom
    identifier set (used for simplex parameters t1..tk).
    """
    return normalize(_Parser(text, nvars, names).parse())


# ---------------------------------------------------------------------------
# Printing

def to_text(e: SmoothExpr, var_names: list[str] | None = None) -> str:
    """Deterministic canonical rendering; parse(to_text(e)) == normalize(e)."""
    return _render(normalize(e), var_names, 0)


# precedence levels: 0 sum, 1 product, 2 power operand / atom
def _render(e: SmoothExpr, names: list[str] | None, level: int) -> str:
    if isinstance(e, Var):
        text = names[e.index - 1] if names else f"x{e.index}"
        return text
    if isinstance(e, Const):
        v = e.value
        text = str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        if v < 0 and level > 0:
            return f"({text})"
        return text
    if isinstance(e, Neg):
        inner = _render(e.arg, names, 1)
        text = f"-{inner}"
        return f"({text})" if level > 0 else text
    if isinstance(e, Add):
        parts = [_render(e.args[0], names, 0)]
        for a in e.args[1:]:
            if isinstance(a, Neg):
                parts.append(f" - {_render(a.arg, names, 1)}")
            else:
                parts.append(f" + {_render(a, names, 1)}")
        text = "".join(parts)
        return f"({text})" if level > 0 else text
    if isinstance(e, Mul):
        text = "*".join(_render(a, names, 1) for a in e.args)
        return f"({text})" if level > 1 else text
    if isinstance(e, Pow):
        return f"{_render(e.base, names, 2)}^{e.exponent}"
    if isinstance(e, Recip):
        return f"recip({_render(e.arg, names, 0)})"
    if isinstance(e, Call):
        name = e.func if e.order == 0 else f"rho0_d{e.order}"
        return f"{name}({_render(e.arg, names, 0)})"
    raise ExprError(f"cannot render {type(e).__name__}")
