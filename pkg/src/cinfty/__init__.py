"""cinfty: symbolic/numeric calculus on finitely presented smooth rings.

Layers, bottom to top: exact polynomials and rational linear algebra, the
smooth expression kernel (parser, partial derivatives, normal forms), ring
presentations with three-valued equality oracles, differential modules and
tangent derivations, the graded exterior calculus with pullbacks, zero-set
geometry (bumps, gluing, germs, ringed maps), and simplex integration with
the boundary-identity harness.
"""

from .expr import (
    EvaluationError,
    ExprError,
    ParseError,
    SmoothExpr,
    compose,
    evaluate,
    evaluate_exact,
    normalize,
    parse,
    partial,
    to_text,
)
from .poly import Poly
from .cring import (
    FreeModule,
    IllDefinedHom,
    OracleConfig,
    RingElement,
    RingHom,
    RingPresentation,
    SamplingFailed,
    SquareZeroRing,
    Verdict,
    apply_op,
    equal,
    hom,
    hom_compose,
    ideal_member,
    identity_hom,
    load_ring,
    present_ring,
    r_point,
    ring_from_dict,
    square_zero,
)
from .kaehler import (
    Derivation,
    KaehlerPresentation,
    NotTangent,
    OneForm,
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
from .derham import (
    Form,
    FormError,
    contract_form,
    d,
    form_equal,
    form_to_text,
    parse_form,
    pullback,
    wedge,
)
from .geometry import (
    BasicOpen,
    ClosedSet,
    DiffSpace,
    GermRep,
    GlueCertificate,
    IncompatibleFamily,
    RingedSpaceMap,
    Section,
    bump,
    compose_maps,
    germ_invert,
    glue,
    ringed_map,
    section,
    space_from_dict,
)
from .integrate import (
    Chain,
    DegreeMismatch,
    IntegralResult,
    QuadratureRule,
    SimplexMap,
    StokesReport,
    boundary,
    chart_ring,
    face_map,
    grundmann_moeller,
    identity_simplex,
    integrate,
    pullback_to_simplex,
    simplex_samples,
    stokes_check,
)

__version__ = "0.1.0"
