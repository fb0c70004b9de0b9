import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import complex_matrix
from normattain.classify import (
    AN,
    NOT_AN,
    UNKNOWN,
    classify_an,
    enan_counterexample,
    enan_gap,
    sample_subspace_restrictions,
    unitary_equiv_projections,
)
from normattain.errors import RankMismatch
from normattain.operators import (
    Adjoint,
    Compose,
    Dense,
    Diagonal,
    FiniteRank,
    Identity,
    Projection,
    Shift,
    apply,
    truncate,
)
from normattain.sequences import ExplicitThenConstant, Geometric, Harmonic, UnitModulus
from normattain.subspaces import BlockRepetition, CanonicalTail, ComplementFinite, SpanFinite

R2 = FiniteRank(((1.0, [1.0, 2.0], [0.0, 1.0]), (2.0, [1j, 0.0, 1.0], [1.0, 1.0])))


def span(k, rng=None):
    vecs = [np.eye(k + 2)[j] + 0.5 * np.eye(k + 2)[j + 1] for j in range(k)]
    return tuple(vecs)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_finite_rank_and_corank_projections(k):
    assert classify_an(Projection(SpanFinite(span(k)))).verdict == AN
    assert classify_an(Projection(ComplementFinite(span(k)))).verdict == AN
    assert classify_an(Projection(CanonicalTail(k))).verdict == AN


def test_block_pattern_projection_not_an():
    ce = enan_counterexample()
    v = classify_an(ce.P)
    assert v.verdict == NOT_AN
    assert v.evidence.subspace == BlockRepetition((2,), (3,))
    assert v.evidence.family is not None


def test_projection_dichotomy_never_unknown():
    for pattern in [((), (1,)), ((), (2,)), ((3,), (1,)), ((), (1, 2)), ((2, 2), (1, 1, 3))]:
        assert classify_an(Projection(BlockRepetition(*pattern))).verdict in (AN, NOT_AN)


@pytest.mark.parametrize(
    "T, rule",
    [
        (Identity() + R2, "identity-plus-finite-rank"),
        (Adjoint(Shift(1)), "coisometry-finite-kernel"),
        (Shift(1) + R2, "isometry-plus-finite-rank"),
        (Adjoint(Shift(1)) + R2, "coisometry-plus-finite-rank"),
    ],
)
def test_rules(T, rule):
    v = classify_an(T)
    assert v.verdict == AN and v.rule == rule
    assert v.derivation[-1] == rule


def test_compositions_with_shift():
    for T in (Compose((Shift(1), Identity() + R2)), Compose((Identity() + R2, Shift(1)))):
        v = classify_an(T)
        assert v.verdict == AN
        assert "identity-plus-finite-rank" in v.derivation


def test_decreasing_diagonal_uses_rewrite():
    v = classify_an(Diagonal(Harmonic(1.0, -1.0, 1.0)))
    assert v.verdict == AN and v.rule == "decreasing-diagonal-rewrite"


def test_increasing_diagonal_not_an():
    v = classify_an(Diagonal(Harmonic(1.0, 1.0, 1.0)))
    assert v.verdict == NOT_AN and v.rule == "not-norm-attaining"


def test_tplusi_not_an():
    assert classify_an(Identity() + Diagonal(UnitModulus(Harmonic(1.0, 1.0, 1.0)))).verdict == NOT_AN


def test_compact_plus_identity_variants():
    K = Diagonal(Geometric(0.0, -1.0, 0.5))
    assert classify_an(K + Identity()).verdict == AN
    assert classify_an(K + Identity() + R2).verdict == AN


def test_projection_algebra():
    P1 = Projection(SpanFinite(span(2)))
    P2 = Projection(CanonicalTail(3))
    for T in (P1 + P2, P1 - P2, Compose((P1, P2)), Compose((P2, P1))):
        assert classify_an(T).verdict == AN


def test_composition_consistency():
    T = Identity() + R2
    base = classify_an(T).verdict
    assert classify_an(Compose((Shift(2), T))).verdict == base
    assert classify_an(Compose((T, Shift(2)))).verdict == base


def test_opaque_dense_with_identity_tail_is_classified():
    assert classify_an(Dense([[2.0, 1.0], [0.0, 1.0]], "identity")).verdict == AN


def test_unknown_for_unmatched_shape():
    T = Diagonal(Harmonic(1.0, 1.0, 1.0)) + Compose((Shift(1), Diagonal(Geometric(1.0, 0.5, 0.5))))
    assert classify_an(T).verdict in (UNKNOWN, NOT_AN)


def test_falsifier_identity_and_dense(rng):
    assert sample_subspace_restrictions(Identity(), d=16, trials=20, seed=1).worst_gap <= 1e-12
    a = complex_matrix(rng, 8)
    assert sample_subspace_restrictions(Dense(a), d=8, trials=40, seed=2).worst_gap <= 1e-10


def test_falsifier_is_reproducible():
    a = sample_subspace_restrictions(Identity() + R2, d=16, trials=10, seed=5)
    b = sample_subspace_restrictions(Identity() + R2, d=16, trials=10, seed=5)
    assert a.worst_gap == b.worst_gap


def test_block_pattern_exact_values():
    ce = enan_counterexample()
    assert ce.image_norm_squared_exact(1) == Fraction(3, 4)
    assert ce.image_norm_squared_exact(2) == Fraction(9, 10)
    assert ce.unit_norm_exact(7) == 1


def test_block_pattern_direct_apply_n1():
    ce = enan_counterexample()
    out = np.zeros(4, dtype=complex)
    img = apply(ce.P, ce.s(1))[:4]
    out[: img.size] = img
    r = 1 / math.sqrt(2)
    assert np.allclose(out[:4], [r, r / 2, r / 2, 0.0])


def test_block_pattern_gap_matches_formula():
    for n in (1, 2, 5, 40):
        formula = 2 / 3 + (6 * n - 5) / (6 * (3 * (n - 1) + 2))
        assert abs(enan_gap(n) - (1 - math.sqrt(formula))) < 1e-12
    gaps = [enan_gap(n) for n in (1, 10, 100, 1000)]
    assert all(a > b > 0 for a, b in zip(gaps, gaps[1:]))


def test_unitary_equivalence_examples():
    P = Dense(np.diag([1.0, 0.0]))
    Q = Dense(np.diag([0.0, 1.0]))
    assert np.allclose(unitary_equiv_projections(P, P, 2), np.eye(2))
    assert np.allclose(np.abs(unitary_equiv_projections(P, Q, 2)), [[0, 1], [1, 0]])


def test_unitary_equivalence_random(rng):
    for _ in range(5):
        qa, _ = np.linalg.qr(complex_matrix(rng, 8, 3))
        qb, _ = np.linalg.qr(complex_matrix(rng, 8, 3))
        P, Q = Dense(qa @ qa.conj().T), Dense(qb @ qb.conj().T)
        u = unitary_equiv_projections(P, Q, 8)
        assert np.allclose(u.conj().T @ u, np.eye(8), atol=1e-9)
        assert np.allclose(truncate(Q, 8) @ u, u @ truncate(P, 8), atol=1e-9)
        assert classify_an(P).verdict == classify_an(Q).verdict


def test_unitary_equivalence_rank_mismatch():
    with pytest.raises(RankMismatch):
        unitary_equiv_projections(Dense(np.diag([1.0, 0.0])), Dense(np.eye(2)), 2)


def test_lotd_constant_tail_diagonal():
    v = classify_an(Diagonal(ExplicitThenConstant((3.0, 2.0), 1.0)))
    assert v.verdict == AN
