import math
import random
from fractions import Fraction

import pytest

from cinfty import expr as ex
from cinfty.cring import OracleConfig, present_ring
from cinfty.expr import evaluate, normalize, parse
from cinfty.geometry import (
    BasicOpen,
    ClosedSet,
    DiffSpace,
    GermRep,
    GeometryError,
    IncompatibleFamily,
    NotIncluded,
    Section,
    bump,
    compose_maps,
    germ_invert,
    glue,
    positivity_ramp,
    ringed_map,
    space_from_dict,
)


@pytest.fixture(scope="module")
def circle_space():
    ring = present_ring(2, ["x1^2+x2^2-1"], OracleConfig(seed=3))
    return DiffSpace(ring, seed=3)


@pytest.fixture(scope="module")
def cross_space():
    ring = present_ring(2, ["x1*x2"], OracleConfig(seed=3))
    return DiffSpace(ring, seed=3)


def test_bump_one_dimensional():
    closed = ClosedSet([(2.5,), (-2.5,), (3.0,)])
    tau = bump(1, closed, [0], 1, 2)
    assert evaluate(tau, [0.0]) == 1.0
    assert evaluate(tau, [3.0]) == 0.0
    assert evaluate(tau, [-3.0]) == 0.0


def test_bump_range_sweep():
    closed = ClosedSet([(2.5, 2.5)])
    tau = bump(2, closed, [0, 0], Fraction(1, 2), 1)
    rng = random.Random(0)
    for _ in range(1000):
        p = (rng.uniform(-3, 3), rng.uniform(-3, 3))
        v = evaluate(tau, p)
        assert -1e-15 <= v <= 1 + 1e-15


def test_bump_general_radii_plateaus():
    closed = ClosedSet([(4.0,)])
    tau = bump(1, closed, [0], Fraction(3, 2), 2)
    assert evaluate(tau, [1.49]) == 1.0
    assert evaluate(tau, [2.01]) == 0.0
    mid = evaluate(tau, [1.75])
    assert 0.0 < mid < 1.0


def test_bump_too_close_rejected():
    closed = ClosedSet([(1.5,)])
    with pytest.raises(GeometryError):
        bump(1, closed, [0], 1, 2)


def test_bump_on_space_lands_in_structure(cross_space):
    # tau built over the ambient coordinates restricts to the carrier by
    # closure under composition: it is itself a smooth expression
    closed = ClosedSet([(2.0, 0.0)])
    tau = bump(cross_space, closed, [0, 0], Fraction(1, 2), 1)
    assert tau.nvars == cross_space.ring.n
    for p in cross_space.samples(20):
        assert 0.0 <= evaluate(tau, p) <= 1.0


def test_positivity_ramp_vanishes_exactly_off_support():
    theta = positivity_ramp(1, parse("x1", 1))
    assert evaluate(theta, [-0.5]) == 0.0
    assert evaluate(theta, [0.0]) == 0.0
    assert evaluate(theta, [0.3]) == 1.0
    assert 0 < evaluate(theta, [0.1]) < 1


def test_restrict_identity_and_transitivity(circle_space):
    whole = circle_space.whole()
    u = BasicOpen(circle_space, ["x2 + 1/2"])
    v = BasicOpen(circle_space, ["x2 + 1/2", "x1 + 1/2"])
    s = Section(whole, parse("x1", 2))
    s_u = s.restrict(u)
    assert s_u.rep == s.rep
    s_uv = s_u.restrict(v)
    s_direct = s.restrict(v)
    assert s_uv.rep == s_direct.rep


def test_restrict_non_inclusion_witness(circle_space):
    north = BasicOpen(circle_space, ["x2 - 1/2"])
    south = BasicOpen(circle_space, ["-1/2 - x2"])
    s = Section(north, parse("x1", 2))
    with pytest.raises(NotIncluded) as err:
        s.restrict(south)
    assert circle_space.contains(err.value.witness)


def test_degenerate_open_flagged(circle_space):
    empty = BasicOpen(circle_space, ["x1 - 2"])  # misses the circle entirely
    assert empty.is_degenerate()


def test_glue_consistent_family_zero_disagreement(circle_space):
    halves = [
        BasicOpen(circle_space, ["x2 + 3/4"]),
        BasicOpen(circle_space, ["-x2 + 3/4"]),
    ]
    sections = [Section(u, parse("x1", 2)) for u in halves]
    glued, cert = glue(halves, sections)
    assert cert.max_overlap_disagreement == 0.0
    assert cert.max_blend_error <= 1e-12


def test_glue_respects_representative_freedom(circle_space):
    # different ambient representatives agreeing on the carrier still glue
    arcs = [
        BasicOpen(circle_space, ["x2 + 1/2"]),
        BasicOpen(circle_space, ["-1/2 - x1"]),
        BasicOpen(circle_space, ["x1 - x2"]),
    ]
    base = parse("x1 + x2^2", 2)
    shifted = normalize(base + parse("(x1^2 + x2^2 - 1)*(x1 + 3)", 2))
    sections = [Section(arcs[0], base), Section(arcs[1], shifted), Section(arcs[2], base)]
    glued, cert = glue(arcs, sections)
    assert cert.max_overlap_disagreement <= 1e-9
    assert cert.max_blend_error <= 1e-8


def test_glue_incompatible_family_witness(circle_space):
    arcs = [
        BasicOpen(circle_space, ["x2 + 3/4"]),
        BasicOpen(circle_space, ["-x2 + 3/4"]),
    ]
    sections = [
        Section(arcs[0], parse("x1", 2)),
        Section(arcs[1], parse("x1 + 1/10", 2)),
    ]
    with pytest.raises(IncompatibleFamily) as err:
        glue(arcs, sections)
    assert err.value.deviation >= 0.09
    assert circle_space.contains(err.value.witness)


def test_sheaf_axiom_glue_restrict_round_trip(circle_space):
    arcs = [
        BasicOpen(circle_space, ["x2 + 1/2"]),
        BasicOpen(circle_space, ["-1/2 - x1"]),
        BasicOpen(circle_space, ["x1 - x2"]),
    ]
    global_section = Section(circle_space.whole(), parse("x2^3 - x1", 2))
    family = [global_section.restrict(u) for u in arcs]
    glued, cert = glue(arcs, family)
    # glue o restrict = identity on samples
    for p in circle_space.samples(50):
        assert glued(p) == pytest.approx(global_section(p), abs=1e-9)
    # restrict o glue reproduces the inputs on their opens
    for u, s in zip(arcs, family):
        back = glued.restrict(u)
        for p in u.samples(20):
            assert back(p) == pytest.approx(s(p), abs=1e-9)


def test_germ_invert_basic(circle_space):
    whole = circle_space.whole()
    germ = GermRep(Section(whole, parse("1 + x1^2", 2)), (1.0, 0.0))
    inv = germ_invert(germ)
    pts = [p for p in circle_space.samples(80) if inv.section.open_set.contains(p)]
    assert pts
    for p in pts:
        assert germ.section(p) * inv.section(p) == pytest.approx(1.0, abs=1e-10)


def test_germ_invert_constant(circle_space):
    germ = GermRep(Section(circle_space.whole(), parse("2", 2)), (0.0, 1.0))
    inv = germ_invert(germ)
    assert inv.value() == pytest.approx(0.5, abs=1e-12)


def test_germ_invert_zero_value_rejected(circle_space):
    germ = GermRep(Section(circle_space.whole(), parse("x1 - 1", 2)), (1.0, 0.0))
    with pytest.raises(GeometryError):
        germ_invert(germ)


def test_units_in_stalks(circle_space):
    # every section nonvanishing at a sampled point has an invertible germ
    rng = random.Random(5)
    pts = circle_space.samples(30)
    count = 0
    for _ in range(10):
        g = parse(f"x1^2 + {rng.randint(1, 3)} + x2", 2)
        base = pts[rng.randrange(len(pts))]
        if abs(evaluate(g, base)) < 1e-3:
            continue
        inv = germ_invert(GermRep(Section(circle_space.whole(), g), base))
        nbhd = [p for p in pts if inv.section.open_set.contains(p)]
        for p in nbhd:
            assert evaluate(g, p) * inv.section(p) == pytest.approx(1.0, abs=1e-10)
        count += 1
    assert count >= 5


def test_f_regularity_bump_separates(cross_space):
    # for a sampled point and a sampled closed complement, a bump separates
    x = (1.0, 0.0)
    closed = ClosedSet([p for p in cross_space.samples(40) if math.dist(p, x) > 0.9])
    tau = bump(cross_space, closed, [1, 0], Fraction(1, 4), Fraction(3, 4))
    assert evaluate(tau, x) == 1.0
    for p in closed.points:
        assert evaluate(tau, p) == 0.0


def test_ringed_map_axis_into_cross(cross_space):
    line = DiffSpace(present_ring(1, []), seed=1)
    incl = ringed_map(["x1", "0"], line, cross_space)
    pulled = incl.pullback_function("x2")
    assert ex.is_zero(pulled)


def test_ringed_map_identity_on_sections(cross_space):
    ident = ringed_map(["x1", "x2"], cross_space, cross_space)
    h = parse("x1^2 - x2", 2)
    assert ident.pullback_function(h) == h


def test_ringed_map_rejects_off_target(cross_space):
    line = DiffSpace(present_ring(1, []), seed=1)
    with pytest.raises(GeometryError):
        ringed_map(["x1", "1"], line, cross_space)


def test_ringed_map_stalk_formula(cross_space):
    # psi(h)(q) = h(f(q)) at 20 sampled points
    line = DiffSpace(present_ring(1, []), seed=2)
    f = ringed_map(["x1", "0"], line, cross_space)
    rng = random.Random(2)
    pts = line.samples(20)
    for _ in range(5):
        h = parse(f"x1^2*x2 + {rng.randint(-3, 3)}*x1", 2)
        pulled = f.pullback_function(h)
        for q in pts:
            assert evaluate(pulled, q) == pytest.approx(
                evaluate(h, f.apply_point(q)), abs=1e-10
            )


def test_compose_maps_associative(cross_space, circle_space):
    line = DiffSpace(present_ring(1, []), seed=2)
    f = ringed_map(["x1", "0"], line, cross_space)
    g = ringed_map(["cos(x1+x2)", "sin(x1+x2)"], cross_space, circle_space)
    plane = DiffSpace(present_ring(2, []), seed=2)
    h = ringed_map(["x1 + x2", "x1*x2"], circle_space, plane)
    lhs = compose_maps(h, compose_maps(g, f))
    rhs = compose_maps(compose_maps(h, g), f)
    assert [str(c) for c in lhs.components] == [str(c) for c in rhs.components]


def test_space_from_dict_loader(tmp_path):
    data = {
        "ring": {"n": 2, "generators": ["x1^2+x2^2-1"], "oracle": {"seed": 5}},
        "box": [[-2, 2], [-2, 2]],
        "opens": [{"positivity": ["x2 + 1/2"]}, {"positivity": ["-x2 + 1/2"]}],
        "seed": 5,
    }
    space, opens = space_from_dict(data)
    assert space.ring.n == 2 and len(opens) == 2
    assert all(isinstance(u, BasicOpen) for u in opens)
    assert space.samples(3)
