"""Exact Bott-Chern/Aeppli cohomology and ABC-Massey products on solvmanifold models."""

from .algebra import Element, FormMonomial, conjugate, project_bidegree, wedge
from .cohomology import (
    CohomologyBasis,
    MembershipWitness,
    NotMember,
    OpSpan,
    Span,
    cohomology,
    ddbar_lemma_check,
    solve_membership,
)
from .families import (
    NakamuraParams,
    SemidirectParams,
    admissible_characters,
    bigalke_rollenske,
    complex_torus,
    nakamura,
    semidirect_family,
)
from .hodge import (
    MetricContext,
    bc_formality_check,
    harmonic_basis,
    hodge_star,
    inner_product,
    integrate,
    is_harmonic,
)
from .massey import MasseyResult, indeterminacy_subspace, pairing_certificate, triple_abc_massey
from .model import (
    DlogNotClosed,
    ManifoldModel,
    NotClosedSquare,
    NotIntegrable,
    NotUnimodular,
    ParseError,
    check_nilpotent_J,
    differential,
    load_model,
    operator_block,
)
from .obstructions import (
    AsthenoCertificate,
    astheno_obstruction_scan,
    canonical_section_check,
    verify_astheno_certificate,
)
from .scalar import Scalar

__all__ = [
    "AsthenoCertificate", "CohomologyBasis", "DlogNotClosed", "Element", "FormMonomial",
    "ManifoldModel", "MasseyResult", "MembershipWitness", "MetricContext", "NakamuraParams",
    "NotClosedSquare", "NotIntegrable", "NotMember", "NotUnimodular", "OpSpan", "ParseError",
    "Scalar", "SemidirectParams", "Span", "admissible_characters", "astheno_obstruction_scan",
    "bc_formality_check", "bigalke_rollenske", "canonical_section_check", "check_nilpotent_J",
    "cohomology", "complex_torus", "conjugate", "ddbar_lemma_check", "differential",
    "harmonic_basis", "hodge_star", "indeterminacy_subspace", "inner_product", "integrate",
    "is_harmonic", "load_model", "nakamura", "operator_block", "pairing_certificate",
    "project_bidegree", "semidirect_family", "solve_membership", "triple_abc_massey",
    "verify_astheno_certificate", "wedge",
]
