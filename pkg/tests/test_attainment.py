import math

import numpy as np
import pytest

from conftest import complex_matrix, hermitian, psd, unit
from normattain.attainment import (
    adjoint_witness,
    attain_intermediate_norm,
    check_adjoint_consistency,
    check_n,
    check_n_selfadjoint,
    verify_witness,
)
from normattain.errors import GapNotStrict, Inconclusive, InvariantViolation, NotSelfAdjoint, WitnessInvalid
from normattain.operators import Dense, Diagonal, Identity, Restrict, Shift, apply
from normattain.sequences import ExplicitThenZero, Harmonic, UnitModulus
from normattain.spectral import Attained, NotAttained
from normattain.subspaces import SpanFinite


def positive_with_top(rng, n):
    """Random positive matrix with a simple, known top eigenpair."""
    q, _ = np.linalg.qr(complex_matrix(rng, n))
    w = np.sort(rng.uniform(0.1, 1.0, n))[::-1]
    w[0] = 1.5
    return (q * w) @ q.conj().T, w[0], q[:, 0]


def test_finite_diagonal_attains_at_e1():
    cert = check_n(Diagonal(ExplicitThenZero((3.0, 2.0, 1.0))))
    assert cert.norm == 3.0
    assert np.allclose(np.abs(cert.witness[:1]), [1.0])
    assert cert.checks == ("norm-attained", "gram-eigenvector")


def test_tplusi_not_attained():
    cert = check_n(Identity() + Diagonal(UnitModulus(Harmonic(1.0, 1.0, 1.0))))
    assert cert.status == NotAttained("strict-quadratic-gap") and cert.norm == 2.0
    assert cert.witness is None


def test_block_pattern_restriction_not_attained():
    from normattain.classify import enan_counterexample

    ce = enan_counterexample()
    cert = check_n(Restrict(ce.P, ce.M))
    assert isinstance(cert.status, NotAttained) and cert.norm == 1.0


def test_witness_attains_random(rng):
    for _ in range(20):
        a = complex_matrix(rng, int(rng.integers(2, 7)))
        cert = check_n(Dense(a))
        assert isinstance(cert.status, Attained)
        assert abs(np.linalg.norm(a @ cert.witness[: a.shape[0]]) - cert.norm) < 1e-9


def test_verify_witness_diagonal():
    tags = verify_witness(Dense(np.diag([2.0, 1.0])), np.array([1.0, 0.0]), [np.array([0.0, 1.0])])
    assert tags == ["norm-attained", "orthogonal-images", "eigenvector", "reducing"]


def test_verify_witness_nilpotent():
    tags = verify_witness(Dense([[0.0, 1.0], [0.0, 0.0]]), np.array([0.0, 1.0]), [np.array([1.0, 0.0])])
    assert "orthogonal-images" in tags and "eigenvector" not in tags


def test_verify_witness_random_positive(rng):
    for _ in range(10):
        a, lam, v = positive_with_top(rng, 6)
        probes = []
        for _ in range(5):
            y = unit(rng, 6)
            probes.append(y - np.vdot(v, y) * v)
        tags = verify_witness(Dense(a), v, probes)
        assert {"norm-attained", "orthogonal-images", "eigenvector"} <= set(tags)


def test_verify_witness_rejects_bad_witness():
    with pytest.raises(WitnessInvalid):
        verify_witness(Dense(np.diag([2.0, 1.0])), np.array([0.0, 1.0]))
    with pytest.raises(InvariantViolation):
        verify_witness(Dense(np.diag([2.0, 1.0])), np.array([2.0, 0.0]))


def test_selfadjoint_examples():
    cert = check_n_selfadjoint(Dense(np.diag([1.0, -1.0])))
    assert np.allclose(np.abs(cert.witness), [1.0, 0.0])
    assert isinstance(check_n_selfadjoint(Diagonal(Harmonic(1.0, 1.0, 1.0))).status, NotAttained)
    cert = check_n_selfadjoint(Dense([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(cert.witness, np.array([1.0, 1.0]) / math.sqrt(2))
    assert abs(np.linalg.norm(apply(Dense([[0.0, 1.0], [1.0, 0.0]]), cert.witness)) - 1.0) < 1e-12


def test_selfadjoint_rejects_non_hermitian():
    with pytest.raises(NotSelfAdjoint):
        check_n_selfadjoint(Dense([[0.0, 1.0], [0.0, 0.0]]))


def test_adjoint_consistency():
    assert check_adjoint_consistency(Shift(1))
    w = adjoint_witness(Shift(1), np.array([1.0]))
    assert np.allclose(w[:2], [0.0, 1.0])
    assert check_adjoint_consistency(Identity() + Diagonal(UnitModulus(Harmonic(1.0, 1.0, 1.0))))


def test_adjoint_consistency_random(rng):
    for _ in range(10):
        assert check_adjoint_consistency(Dense(complex_matrix(rng, 5)))


def test_adjoint_consistency_inconclusive():
    from normattain.operators import FiniteRank

    T = Diagonal(Harmonic(1.0, 1.0, 1.0)) + FiniteRank(((1e-3, [1.0], [0.0, 1.0]),))
    with pytest.raises(Inconclusive):
        check_adjoint_consistency(T, max_dim=64)


def test_intermediate_diag21():
    T = Dense(np.diag([2.0, 1.0]))
    x = attain_intermediate_norm(T, SpanFinite((np.array([0.0, 1.0]),)))
    assert abs(np.linalg.norm(apply(T, x)) - 1.0) < 1e-10


def test_intermediate_diag321():
    T = Dense(np.diag([3.0, 2.0, 1.0]))
    M = SpanFinite((np.array([0.0, 1.0, 0.0]), np.array([0.0, 0.0, 1.0])))
    x = attain_intermediate_norm(T, M)
    tx = apply(T, x)
    assert abs(np.vdot(tx, tx).real - 4.0) < 1e-10


def test_intermediate_positive_form(rng):
    for _ in range(10):
        a = psd(rng, 6)
        m = complex_matrix(rng, 6, 2)
        q, _ = np.linalg.qr(m)
        target = np.linalg.svd(a @ q, compute_uv=False)[0]
        if target >= np.linalg.eigvalsh(a)[-1] * (1 - 1e-9):
            continue
        x = attain_intermediate_norm(Dense(a), SpanFinite(tuple(m.T)), positive_form=True)
        assert abs(np.vdot(x, a @ x).real - target) < 1e-8


def test_intermediate_requires_strict_gap():
    T = Dense(np.diag([2.0, 1.0]))
    with pytest.raises(GapNotStrict):
        attain_intermediate_norm(T, SpanFinite((np.array([1.0, 0.0]),)))


def test_selfadjoint_random_agrees_with_eigs(rng):
    for _ in range(10):
        h = hermitian(rng, 5)
        cert = check_n_selfadjoint(Dense(h))
        w = np.linalg.eigvalsh(h)
        assert abs(cert.norm - np.max(np.abs(w))) < 1e-10
