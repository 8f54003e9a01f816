import random

import pytest

from cinfty import expr as ex
from cinfty.cring import apply_op, equal, hom, identity_hom, present_ring
from cinfty.expr import normalize, parse, to_poly
from cinfty.kaehler import (
    NotTangent,
    contract,
    d0,
    derivation,
    derivation_apply,
    enumerate_tangent_derivations,
    kaehler_presentation,
    lambda1,
    oneform_equal,
    oneform_member_J,
    psi_noninjectivity_report,
)
from cinfty.linalg import solve
from cinfty.poly import monomials_up_to_degree


@pytest.fixture(scope="module")
def cross():
    return present_ring(2, ["x1*x2"])


@pytest.fixture(scope="module")
def circle():
    return present_ring(2, ["x1^2+x2^2-1"])


def test_presentation_free_rings():
    for n in (1, 3, 5):
        module = kaehler_presentation(present_ring(n, []))
        assert module.rank == n and module.relations == []


def test_presentation_cross(cross):
    module = kaehler_presentation(cross)
    assert module.rank == 2
    assert len(module.relations) == 1
    assert [c.rep for c in module.relations[0]] == [parse("x2", 2), parse("x1", 2)]


def test_presentation_circle(circle):
    module = kaehler_presentation(circle)
    assert [c.rep for c in module.relations[0]] == [parse("2*x1", 2), parse("2*x2", 2)]


def test_d0_examples(cross):
    free = present_ring(2, [])
    w = d0(free, "x1^2")
    assert [c.rep for c in w.coeffs] == [parse("2*x1", 2), parse("0", 2)]
    dz = d0(cross, "x1*x2")
    assert oneform_member_J(dz).kind == "proved_equal"  # zero in the quotient
    assert d0(cross, 7).is_zero_rep()


def test_d0_is_linear(cross):
    module = kaehler_presentation(cross)
    a, b = cross.element("x1^2"), cross.element("x2 + x1")
    lhs = d0(module, a + b)
    rhs = d0(module, a) + d0(module, b)
    assert oneform_equal(lhs, rhs).kind == "proved_equal"


def test_member_J_relation(cross):
    module = kaehler_presentation(cross)
    v = oneform_member_J(module.element(["x2", "x1"]), 6)
    assert v.kind == "proved_equal"
    assert v.cofactors == [parse("1", 2)]


def test_member_J_x1dx2_degree_stamped(cross):
    module = kaehler_presentation(cross)
    v = oneform_member_J(module.element([0, "x1"]), 6)
    assert v.label() == "NotMemberUpToDegree(6)"
    assert v.kind == "proved_unequal" and v.degree_bound == 6


def test_member_J_free_ring():
    module = kaehler_presentation(present_ring(2, []))
    v = oneform_member_J(module.element([0, "x1"]))
    assert v.kind == "proved_unequal"
    assert oneform_member_J(module.zero()).kind == "proved_equal"


def test_member_J_non_polynomial_unknown(cross):
    module = kaehler_presentation(cross)
    v = oneform_member_J(module.element(["sin(x1)", 0]))
    assert v.is_unknown


def test_lambda1_identity(cross):
    module = kaehler_presentation(cross)
    L = lambda1(identity_hom(cross))
    w = module.element(["x1^2", "x2"])
    assert oneform_equal(L(w), w).kind == "proved_equal"


def test_lambda1_axis_inclusion(cross):
    axis = present_ring(1, [])
    incl = hom(cross, axis, ["x1", 0])
    L = lambda1(incl)
    module = kaehler_presentation(cross)
    line_module = kaehler_presentation(axis)
    assert [c.rep for c in L(module.basis_form(1)).coeffs] == [parse("1", 1)]
    assert L(module.basis_form(2)).is_zero_rep()
    assert L(d0(cross, "x2")).is_zero_rep()


def test_lambda1_scaling():
    line = present_ring(1, [])
    double = hom(line, line, ["2*x1"])
    L = lambda1(double)
    module = kaehler_presentation(line)
    out = L(module.basis_form(1))
    assert [c.rep for c in out.coeffs] == [parse("2", 1)]


def test_lambda1_commutes_with_d(cross):
    # the defining square: Lambda(phi) o d = d o phi on a generator test set
    axis = present_ring(1, [])
    incl = hom(cross, axis, ["x1", 0])
    L = lambda1(incl)
    for text in ("x1", "x2", "x1^2*x2 + x1", "x1^3"):
        lhs = L(d0(cross, text))
        rhs = d0(axis, incl.apply(text))
        assert oneform_equal(lhs, rhs).kind == "proved_equal"


def test_lambda1_functoriality(cross):
    axis = present_ring(1, [])
    incl = hom(cross, axis, ["x1", 0])
    scale = hom(axis, axis, ["2*x1"])
    from cinfty.cring import hom_compose

    comp = hom_compose(scale, incl)
    module = kaehler_presentation(cross)
    for w in (module.basis_form(1), module.basis_form(2)):
        lhs = lambda1(comp)(w)
        rhs = lambda1(scale)(lambda1(incl)(w))
        assert oneform_equal(lhs, rhs).kind == "proved_equal"


def test_derivation_tangent_and_rejected(cross):
    v = derivation(cross, ["x1", "-x2"])
    assert all(c.kind == "proved_equal" for c in v.certificates)
    with pytest.raises(NotTangent) as err:
        derivation(cross, [1, 0])
    assert err.value.verdict.witness is not None


def test_derivation_free_ring_unrestricted():
    free = present_ring(2, [])
    v = derivation(free, ["sin(x1)", "x2^5"])
    assert v.certificates == []


def test_derivation_apply_examples(cross):
    v = derivation(cross, ["x1", "-x2"])
    out = derivation_apply(v, "x1 + x2")
    assert equal(cross, out, "x1 - x2").kind == "proved_equal"
    assert derivation_apply(v, 5).is_zero_rep()


def test_derivation_apply_well_defined(cross):
    rng = random.Random(9)
    v = derivation(cross, ["x1", "-x2"])
    for _ in range(10):
        h = parse(f"x1^{rng.randint(0, 2)}*x2 + {rng.randint(-3, 3)}", 2)
        a = parse("x1^2 - x2", 2)
        shifted = normalize(a + parse("x1*x2", 2) * h)
        assert equal(
            cross, derivation_apply(v, a), derivation_apply(v, shifted)
        ).kind == "proved_equal"


def test_contract_examples(cross):
    free = present_ring(2, [])
    module = kaehler_presentation(free)
    d1 = derivation(free, [1, 0])
    assert contract(d1, module.basis_form(1)).rep == parse("1", 2)
    # iota_v(d a) = v(a), exactly on polynomial data
    v = derivation(cross, ["x1", "-x2"])
    mod_cross = kaehler_presentation(cross)
    for text in ("x1^2", "x1*x2 + x2", "x1 - x2^3"):
        lhs = contract(v, d0(mod_cross, text))
        rhs = derivation_apply(v, text)
        assert equal(cross, lhs, rhs).kind == "proved_equal"


def test_contract_tangent_kills_x1dx2(cross):
    module = kaehler_presentation(cross)
    xdy = module.element([0, "x1"])
    for v in enumerate_tangent_derivations(cross, 3):
        out = contract(v, xdy)
        assert out.is_zero_rep() or equal(cross, out, 0).kind == "proved_equal"


def test_contraction_is_ring_linear(cross):
    # a degree -1 derivation against degree-0 scalars is C-linear
    module = kaehler_presentation(cross)
    v = derivation(cross, ["x1", "-x2"])
    a = cross.element("x2^2 + x1")
    w = module.element(["x1", "x2 + 1"])
    lhs = contract(v, w.scale(a))
    rhs = a * contract(v, w)
    assert equal(cross, lhs, rhs).kind == "proved_equal"


def test_contraction_naturality(cross):
    # phi o v = w o phi on generators forces phi(iota_v a) = iota_w(Lambda(phi) a)
    axis = present_ring(1, [])
    phi = hom(cross, axis, ["x1", 0])
    v = derivation(cross, ["x1", "-x2"])
    w = derivation(axis, ["x1"])
    # check the intertwining on coordinate generators first
    for i, coord in enumerate(cross.coordinates(), start=1):
        lhs = phi.apply(derivation_apply(v, coord))
        rhs = derivation_apply(w, phi.apply(coord))
        assert equal(axis, lhs, rhs).kind == "proved_equal"
    module = kaehler_presentation(cross)
    L = lambda1(phi)
    for coeffs in (["x1", "x2"], ["x2^2", "x1*x2"], [1, 0]):
        alpha = module.element(coeffs)
        lhs = phi.apply(contract(v, alpha))
        rhs = contract(w, L(alpha))
        assert equal(axis, lhs, rhs).kind == "proved_equal"


def test_enumerate_free_ring_constant_fields():
    free = present_ring(2, [])
    basis = enumerate_tangent_derivations(free, 0)
    assert len(basis) == 2
    reps = sorted(str(v.coeffs[0]) + "|" + str(v.coeffs[1]) for v in basis)
    assert reps == ["0|1", "1|0"]


def test_enumerate_cross_divisibility(cross):
    basis = enumerate_tangent_derivations(cross, 2)
    assert len(basis) == 6
    for v in basis:
        a1 = to_poly(v.coeffs[0].rep)
        a2 = to_poly(v.coeffs[1].rep)
        assert all(m[0] >= 1 for m in a1.terms)  # a1 divisible by x1
        assert all(m[1] >= 1 for m in a2.terms)  # a2 divisible by x2


def test_enumerate_circle_contains_rotation(circle):
    rotation = derivation(circle, ["-x2", "x1"])
    assert all(c.kind == "proved_equal" for c in rotation.certificates)
    basis = enumerate_tangent_derivations(circle, 1)
    monos = monomials_up_to_degree(2, 1)
    columns = []
    for v in basis:
        vec = []
        for comp in v.coeffs:
            p = to_poly(comp.rep)
            vec.extend(p.coefficient(m) for m in monos)
        columns.append(vec)
    target = []
    for text in ("-x2", "x1"):
        p = to_poly(parse(text, 2))
        target.extend(p.coefficient(m) for m in monos)
    matrix = [[col[r] for col in columns] for r in range(len(target))]
    x, cert = solve(matrix, target)
    assert x is not None  # rotation lies in the enumerated span


def test_psi_report_witness(cross):
    module = kaehler_presentation(cross)
    rep = psi_noninjectivity_report(cross, module.element([0, "x1"]), 4, 4)
    assert rep["witness_found"] is True
    assert rep["in_J"]["label"] == "NotMemberUpToDegree(4)"
    assert rep["derivations_checked"] == 20
    assert rep["all_contractions_in_I"] is True


def test_psi_report_free_ring_no_witness():
    free = present_ring(2, [])
    module = kaehler_presentation(free)
    rep = psi_noninjectivity_report(free, module.basis_form(1), 4, 0)
    assert rep["witness_found"] is False
    assert rep["all_contractions_in_I"] is False  # iota_d1 dx1 = 1


def test_psi_report_relation_not_witness(cross):
    module = kaehler_presentation(cross)
    rep = psi_noninjectivity_report(cross, module.element(["x2", "x1"]), 4, 2)
    assert rep["witness_found"] is False
    assert rep["in_J"]["label"] == "ProvedEqual"


def test_universal_derivation_law_exact(cross):
    # d(g(a_1..a_m)) = sum (d_j g)(a) . d(a_j), checked in the quotient
    rng = random.Random(4)
    module = kaehler_presentation(cross)
    for _ in range(15):
        m = rng.randint(1, 2)
        g = parse(
            " + ".join(
                f"{rng.randint(-2, 2)}*x{rng.randint(1, m)}^{rng.randint(0, 2)}"
                for _ in range(2)
            ),
            m,
        )
        elts = [cross.element(parse(f"x1^{rng.randint(0, 2)} + x2", 2)) for _ in range(m)]
        lhs = d0(module, apply_op(cross, g, elts))
        rhs = module.zero()
        for j in range(1, m + 1):
            coeff = apply_op(cross, normalize(ex.partial(g, j)), elts)
            rhs = rhs + d0(module, elts[j - 1]).scale(coeff)
        assert oneform_equal(lhs, rhs).kind == "proved_equal"
