"""Norm attainment (N) and absolute norm attainment (AN) for structured operators on l2."""

__version__ = "0.1.0"

from .attainment import (
    AttainmentCertificate,
    adjoint_witness,
    attain_intermediate_norm,
    check_adjoint_consistency,
    check_n,
    check_n_selfadjoint,
    verify_witness,
)
from .classify import (
    AN,
    NOT_AN,
    UNKNOWN,
    ANVerdict,
    Evidence,
    classify_an,
    enan_counterexample,
    enan_gap,
    sample_subspace_restrictions,
    unitary_equiv_projections,
)
from .deflation import Decomposition, LOTDRewrite, deflate, reconstruct, rewrite_lotd
from . import errors
from .numrange import extreme_point_check, numrange_boundary, sup_numrange_positive
from .operators import (
    Adjoint,
    Compose,
    Dense,
    Diagonal,
    FiniteRank,
    Identity,
    PositiveRoot,
    Projection,
    Restrict,
    Scale,
    Shift,
    Sum,
    adjoint,
    apply,
    polar,
    positive_sqrt,
    truncate,
)
from .sequences import ExplicitThenConstant, ExplicitThenZero, Geometric, Harmonic, RealSeq, UnitModulus
from .spec_io import parse_spec, serialize_spec
from .spectral import Attained, NormReport, NotAttained, Unknown, norm_upper, operator_norm
from .subspaces import BlockRepetition, CanonicalTail, ComplementFinite, SpanFinite

__all__ = [
    "AttainmentCertificate",
    "adjoint_witness",
    "attain_intermediate_norm",
    "check_adjoint_consistency",
    "check_n",
    "check_n_selfadjoint",
    "verify_witness",
    "AN",
    "NOT_AN",
    "UNKNOWN",
    "ANVerdict",
    "Evidence",
    "classify_an",
    "enan_counterexample",
    "enan_gap",
    "sample_subspace_restrictions",
    "unitary_equiv_projections",
    "Decomposition",
    "LOTDRewrite",
    "deflate",
    "reconstruct",
    "rewrite_lotd",
    "extreme_point_check",
    "numrange_boundary",
    "sup_numrange_positive",
    "Adjoint",
    "Compose",
    "Dense",
    "Diagonal",
    "FiniteRank",
    "Identity",
    "PositiveRoot",
    "Projection",
    "Restrict",
    "Scale",
    "Shift",
    "Sum",
    "adjoint",
    "apply",
    "polar",
    "positive_sqrt",
    "truncate",
    "ExplicitThenConstant",
    "ExplicitThenZero",
    "Geometric",
    "Harmonic",
    "RealSeq",
    "UnitModulus",
    "parse_spec",
    "serialize_spec",
    "Attained",
    "NormReport",
    "NotAttained",
    "Unknown",
    "norm_upper",
    "operator_norm",
    "BlockRepetition",
    "CanonicalTail",
    "ComplementFinite",
    "SpanFinite",
    "errors",
]
