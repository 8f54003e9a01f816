"""Simplices, chains, boundary, and numerical integration of pulled-back forms.

The standard k-simplex is used in chart form, Delta^k = {t in R^k : t_i >= 0,
sum t_i <= 1}, which has volume 1/k!.  Face maps follow the (k+1)-face
convention (vertex v_i omitted), under which the simplicial identities and
boundary-of-boundary = 0 hold exactly at the level of symbolic affine maps.

Quadrature is Grundmann-Moller on the chart simplex (exact rational points
and weights) with uniform longest-edge bisection refinement; the reported
error estimate is the difference between the last two refinement levels.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import expr as ex
from .expr import SmoothExpr, evaluate, normalize, structural_key
from .cring import CRingError, RingPresentation, present_ring, OracleConfig
from .derham import Form, d, wedge


class IntegrationError(CRingError):
    pass


class DegreeMismatch(IntegrationError):
    pass


class QuadratureError(IntegrationError):
    pass


_chart_rings: dict[int, RingPresentation] = {}


def chart_ring(k: int) -> RingPresentation:
    """The free ring presenting the chart coordinates t1..tk of Delta^k."""
    if k not in _chart_rings:
        _chart_rings[k] = present_ring(
            k, [], OracleConfig(box=tuple((0.0, 1.0) for _ in range(k)))
        )
    return _chart_rings[k]


def simplex_samples(k: int, count: int, seed: int = 0) -> list[tuple]:
    """Uniform points of the chart k-simplex (barycentric Dirichlet draw)."""
    if k == 0:
        return [()] * count
    rng = np.random.default_rng(seed)
    bary = rng.dirichlet(np.ones(k + 1), size=count)
    return [tuple(float(v) for v in row[1:]) for row in bary]


class SimplexMap:
    """A smooth map Delta^k -> zero set of the target presentation."""

    def __init__(self, k: int, ring: RingPresentation, components, check: bool = True,
                 name_prefix: str = "t"):
        self.k = k
        self.ring = ring
        comps = []
        names = {f"{name_prefix}{i}": i for i in range(1, k + 1)}
        for c in components:
            if isinstance(c, str):
                comps.append(ex.parse(c, k, names=names))
            else:
                if c.nvars != k:
                    raise IntegrationError(
                        f"component over {c.nvars} vars, expected {k}"
                    )
                comps.append(normalize(c))
        if len(comps) != ring.n:
            raise IntegrationError(
                f"need {ring.n} components into the target ring, got {len(comps)}"
            )
        self.components = tuple(comps)
        if check and ring.gens:
            tol = max(ring.oracle.tolerance, 1e-8)
            for p in simplex_samples(k, 25, seed=7):
                image = tuple(evaluate(c, p) for c in self.components)
                res = ring.residual(image)
                if res > tol:
                    raise IntegrationError(
                        f"simplex map leaves the zero set at t={p} (residual {res:.3g})"
                    )

    def key(self) -> tuple:
        return (self.k, tuple(structural_key(c) for c in self.components))

    def apply_point(self, t) -> tuple:
        return tuple(evaluate(c, t) for c in self.components)

    def precompose(self, face: "SimplexMap") -> "SimplexMap":
        """self o face, composing component expressions symbolically."""
        if face.ring.n != self.k:
            raise IntegrationError("face target dimension mismatch")
        comps = [
            ex.compose(c, list(face.components), nvars=face.k)
            for c in self.components
        ]
        return SimplexMap(face.k, self.ring, comps, check=False)

    def __repr__(self):
        comps = ", ".join(str(c) for c in self.components)
        return f"SimplexMap(k={self.k}; {comps})"


def identity_simplex(k: int) -> SimplexMap:
    ring = chart_ring(k)
    comps = [ex.var(k, i) for i in range(1, k + 1)]
    return SimplexMap(k, ring, comps, check=False)


def face_map(k: int, i: int) -> SimplexMap:
    """The affine face d_i: Delta^{k-1} -> Delta^k omitting vertex i.

    In chart coordinates (vertices 0, e_1, .., e_k):
      d_0(t) = (1 - sum t, t_1, .., t_{k-1})
      d_i(t) = (t_1, .., t_{i-1}, 0, t_i, .., t_{k-1})   for 1 <= i <= k.
    """
    if not 0 <= i <= k:
        raise IntegrationError(f"face index {i} out of range 0..{k}")
    if k < 1:
        raise IntegrationError("faces need dimension >= 1")
    m = k - 1
    ts = [ex.var(m, j) for j in range(1, m + 1)]
    if i == 0:
        head = ex.const(m, 1)
        for t in ts:
            head = head - t
        comps = [head] + ts
    else:
        comps = ts[: i - 1] + [ex.const(m, 0)] + ts[i - 1:]
    return SimplexMap(m, chart_ring(k), comps, check=False)


class Chain:
    """Finite real combination of equal-dimension simplex maps.

    Construction collects like terms by the maps' canonical component keys
    and drops exact-zero coefficients.
    """

    def __init__(self, k: int, terms=()):
        self.k = k
        collected: dict[tuple, tuple[float, SimplexMap]] = {}
        for coeff, sigma in terms:
            if sigma.k != k:
                raise IntegrationError("mixed chain dimensions")
            key = sigma.key()
            if key in collected:
                collected[key] = (collected[key][0] + coeff, collected[key][1])
            else:
                collected[key] = (float(coeff), sigma)
        self.terms: list[tuple[float, SimplexMap]] = [
            (c, s) for c, s in collected.values() if c != 0.0
        ]

    @classmethod
    def of(cls, sigma: SimplexMap) -> "Chain":
        return cls(sigma.k, [(1.0, sigma)])

    def __add__(self, other: "Chain") -> "Chain":
        if other.k != self.k:
            raise IntegrationError("mixed chain dimensions")
        return Chain(self.k, self.terms + other.terms)

    def scale(self, c: float) -> "Chain":
        return Chain(self.k, [(c * a, s) for a, s in self.terms])

    def is_empty(self) -> bool:
        return not self.terms

    def __repr__(self):
        return f"Chain(k={self.k}, {len(self.terms)} terms)"


def boundary(obj) -> Chain:
    """Alternating sum of face precompositions: d(sigma) = sum (-1)^i sigma o d_i."""
    chain = Chain.of(obj) if isinstance(obj, SimplexMap) else obj
    if chain.k < 1:
        raise IntegrationError("boundary needs dimension >= 1")
    out = []
    for coeff, sigma in chain.terms:
        for i in range(chain.k + 1):
            out.append(((-1) ** i * coeff, sigma.precompose(face_map(chain.k, i))))
    return Chain(chain.k - 1, out)


def pullback_to_simplex(sigma: SimplexMap, alpha: Form) -> Form:
    """sigma^* alpha as an ordinary form on the chart simplex.

    The result is independent of the coefficient representatives modulo the
    ideal because the map lands in the zero set.
    """
    if alpha.ring is not sigma.ring:
        raise IntegrationError("form is not over the map's target ring")
    k = sigma.k
    chart = chart_ring(k)
    if alpha.degree > k:
        warnings.warn("form degree exceeds the simplex dimension; pullback is zero")
        return Form.zero(chart, alpha.degree)
    differentials = []
    for c in sigma.components:
        coeffs = {}
        for l in range(1, k + 1):
            dc = normalize(ex.partial(c, l))
            if not ex.is_zero(dc):
                coeffs[(l,)] = dc
        one = Form(chart, 1, coeffs)
        differentials.append(one)
    out = Form.zero(chart, alpha.degree)
    for idx, f in alpha.coeffs.items():
        pulled = ex.compose(f.rep, list(sigma.components), nvars=k)
        term = Form.scalar(chart, pulled)
        for i in idx:
            term = wedge(term, differentials[i - 1])
        out = out + term
    return out


# ---------------------------------------------------------------------------
# Grundmann-Moller quadrature on the chart simplex


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


def grundmann_moeller(k: int, s: int) -> list[tuple[tuple, Fraction]]:
    """Points (chart coordinates) and weights, exact for degree <= 2s+1.

    Combinatorial rule: barycentric points (2*beta + 1)/(d + k - 2i) over
    nonnegative integer tuples beta summing to s - i, with alternating
    factorial weights.
    """
    if k == 0:
        return [((), Fraction(1))]
    d = 2 * s + 1
    acc: dict[tuple, Fraction] = {}
    for i in range(s + 1):
        denom = d + k - 2 * i
        w = (
            Fraction((-1) ** i)
            * Fraction(denom**d, 4**s)
            / (math.factorial(i) * math.factorial(d + k - i))
        )
        for beta in _compositions(s - i, k + 1):
            bary = tuple(Fraction(2 * b + 1, denom) for b in beta)
            point = bary[1:]
            acc[point] = acc.get(point, Fraction(0)) + w
    return [(p, w) for p, w in acc.items() if w != 0]


@dataclass(frozen=True)
class QuadratureRule:
    degree: int = 7
    max_refinements: int = 6
    tol: float = 1e-9

    @property
    def strength(self) -> int:
        return max(0, (self.degree - 1) // 2)


@dataclass
class IntegralResult:
    value: float
    error_estimate: float
    refinements: int

    def __float__(self):
        return self.value


def _bisect_cells(cells: list[np.ndarray]) -> list[np.ndarray]:
    out = []
    for verts in cells:
        kk = verts.shape[0] - 1
        best = None
        for a in range(kk + 1):
            for b in range(a + 1, kk + 1):
                d2 = float(np.sum((verts[a] - verts[b]) ** 2))
                key = (-d2, a, b)
                if best is None or key < best[0]:
                    best = (key, a, b)
        _, a, b = best
        mid = (verts[a] + verts[b]) / 2.0
        for replace in (a, b):
            child = verts.copy()
            child[replace] = mid
            out.append(child)
    return out


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CINFTY_THREADS", "1")))
    except ValueError:
        return 1


def _integrate_density(density: SmoothExpr, k: int, rule: QuadratureRule) -> IntegralResult:
    if k == 0:
        return IntegralResult(evaluate(density, ()), 0.0, 0)
    pts_wts = [
        (np.array([float(c) for c in p]), float(w))
        for p, w in grundmann_moeller(k, rule.strength)
    ]

    def cell_integral(verts: np.ndarray) -> float:
        v0 = verts[0]
        basis = (verts[1:] - v0).T
        det = abs(float(np.linalg.det(basis)))
        if det == 0.0:
            return 0.0
        total = 0.0
        for p, w in pts_wts:
            y = v0 + basis @ p
            total += w * evaluate(density, y)
        return det * total

    def level_value(cells) -> float:
        nthreads = _threads()
        if nthreads > 1 and len(cells) > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=nthreads) as pool:
                return math.fsum(pool.map(cell_integral, cells))
        return math.fsum(cell_integral(c) for c in cells)

    cells = [np.vstack([np.zeros(k), np.eye(k)])]
    value = level_value(cells)
    estimate = math.inf
    level = 0
    while level < rule.max_refinements:
        cells = _bisect_cells(cells)
        level += 1
        new_value = level_value(cells)
        estimate = abs(new_value - value)
        value = new_value
        if estimate <= rule.tol * (1.0 + abs(value)):
            return IntegralResult(value, estimate, level)
    if estimate is math.inf:
        return IntegralResult(value, 0.0, 0)
    if estimate > rule.tol * (1.0 + abs(value)) * 100:
        raise QuadratureError(
            f"quadrature did not converge: estimate {estimate:.3g} after {level} refinements"
        )
    return IntegralResult(value, estimate, level)


def integrate(chain, alpha: Form, rule: QuadratureRule | None = None) -> IntegralResult:
    """Integral of a degree-k form over a k-chain: sum of coefficient-weighted
    integrals of the pulled-back densities over the chart simplex."""
    rule = rule or QuadratureRule()
    if isinstance(chain, SimplexMap):
        chain = Chain.of(chain)
    if alpha.degree != chain.k:
        raise DegreeMismatch(
            f"form degree {alpha.degree} does not match chain dimension {chain.k}"
        )
    total = 0.0
    err = 0.0
    levels = 0
    for coeff, sigma in chain.terms:
        pulled = pullback_to_simplex(sigma, alpha)
        top = tuple(range(1, chain.k + 1))
        density = pulled.coeffs.get(top)
        if density is None:
            continue
        res = _integrate_density(density.rep, chain.k, rule)
        total += coeff * res.value
        err += abs(coeff) * res.error_estimate
        levels = max(levels, res.refinements)
    return IntegralResult(total, err, levels)


@dataclass
class StokesReport:
    lhs: float
    rhs: float
    residual: float
    tol: float
    passed: bool
    lhs_error: float
    rhs_error: float

    def to_dict(self) -> dict:
        return {
            "lhs_integral_of_d_gamma": self.lhs,
            "rhs_boundary_integral": self.rhs,
            "residual": self.residual,
            "tol": self.tol,
            "pass": self.passed,
            "lhs_error_estimate": self.lhs_error,
            "rhs_error_estimate": self.rhs_error,
        }


def stokes_check(sigma: SimplexMap, gamma: Form, tol: float = 1e-6,
                 rule: QuadratureRule | None = None) -> StokesReport:
    """Compare integral of d(gamma) over sigma with integral of gamma over
    the boundary chain."""
    if gamma.degree != sigma.k - 1:
        raise DegreeMismatch(
            f"need a degree-{sigma.k - 1} form for a {sigma.k}-simplex, got {gamma.degree}"
        )
    lhs = integrate(sigma, d(gamma), rule)
    rhs = integrate(boundary(sigma), gamma, rule)
    residual = abs(lhs.value - rhs.value)
    return StokesReport(
        lhs=lhs.value,
        rhs=rhs.value,
        residual=residual,
        tol=tol,
        passed=residual <= tol,
        lhs_error=lhs.error_estimate,
        rhs_error=rhs.error_estimate,
    )
