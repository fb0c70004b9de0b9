import math

import numpy as np
import pytest

from conftest import complex_matrix, hermitian
from normattain.eig import hermitian_eig
from normattain.operators import (
    Adjoint,
    Compose,
    Dense,
    Diagonal,
    FiniteRank,
    Identity,
    Projection,
    Restrict,
    Shift,
    adjoint,
    positive_sqrt,
    truncate,
)
from normattain.sequences import ExplicitThenZero, Geometric, Harmonic, UnitModulus
from normattain.spectral import (
    Attained,
    NotAttained,
    Unknown,
    is_positive,
    is_self_adjoint,
    norm_upper,
    operator_norm,
)
from normattain.subspaces import CanonicalTail, SpanFinite


def test_tplusi_closed_form():
    rep = operator_norm(Identity() + Diagonal(UnitModulus(Harmonic(1.0, 1.0, 1.0))))
    assert rep.exact == 2.0
    assert rep.attained == NotAttained("strict-quadratic-gap")


def test_increasing_diagonal_not_attained():
    rep = operator_norm(Diagonal(Harmonic(1.0, 1.0, 1.0)))
    assert rep.exact == 1.0
    assert rep.attained == NotAttained("strictly-monotone-diagonal")


def test_nilpotent_attains_at_e2():
    rep = operator_norm(Dense([[0.0, 1.0], [0.0, 0.0]]))
    assert rep.exact == pytest.approx(1.0, abs=1e-12)
    w = rep.attained.witness
    assert np.allclose(np.abs(w[:2]), [0.0, 1.0])


def test_decreasing_diagonal_attains_at_first():
    rep = operator_norm(Diagonal(Geometric(1.0, -1.0, 0.5)))
    assert rep.exact == 1.5 and isinstance(rep.attained, Attained)


def test_projection_and_shift_have_norm_one():
    for T in (Projection(CanonicalTail(3)), Shift(2), Adjoint(Shift(1))):
        rep = operator_norm(T)
        assert rep.exact == 1.0 and isinstance(rep.attained, Attained)


@pytest.mark.parametrize("n", [2, 3, 5, 6])
def test_dense_matches_svd(rng, n):
    for _ in range(5):
        a = complex_matrix(rng, n)
        rep = operator_norm(Dense(a))
        assert abs(rep.value - np.linalg.svd(a, compute_uv=False)[0]) < 1e-10
        assert isinstance(rep.attained, Attained)


def test_norm_of_adjoint_equals_norm(rng):
    R = FiniteRank(((1.0, [1.0, 2j], [0.0, 1.0, 1.0]),))
    for T in (Dense(complex_matrix(rng, 4)), Identity() + R, Compose((Shift(1), Identity() + R))):
        a, b = operator_norm(T), operator_norm(adjoint(T))
        assert a.exact is not None and b.exact is not None
        assert abs(a.exact - b.exact) < 1e-10


def test_norm_equals_norm_of_positive_root(rng):
    for T in (Dense(complex_matrix(rng, 4)), Diagonal(Harmonic(0.5, -1.0, 2.0)), Adjoint(Shift(2))):
        assert abs(operator_norm(T).value - operator_norm(positive_sqrt(T)).value) < 1e-10


def test_lower_bounds_never_exceed_upper(rng):
    T = Diagonal(Harmonic(1.0, 1.0, 1.0)) + FiniteRank(((0.1, [1.0], [0.0, 1.0]),))
    rep = operator_norm(T, max_dim=256)
    assert rep.lower <= rep.upper + 1e-12
    assert list(rep.lower_bounds) == sorted(rep.lower_bounds)


def test_truncation_monotone_in_dimension():
    T = Diagonal(Harmonic(1.0, 1.0, 1.0)) + FiniteRank(((0.3, [1.0, 1.0], [0.0, 1.0]),))
    sv = [np.linalg.svd(truncate(T, d), compute_uv=False)[0] for d in (4, 8, 16, 32)]
    assert all(a <= b + 1e-14 for a, b in zip(sv, sv[1:]))


def test_unresolved_ladder_is_unknown():
    # a non-symbolic sum whose sup creeps up with the truncation dimension
    T = Diagonal(Harmonic(1.0, 1.0, 1.0)) + FiniteRank(((0.1, [1.0], [0.0, 1.0]),))
    rep = operator_norm(T, max_dim=64)
    assert isinstance(rep.attained, Unknown) and rep.exact is None
    assert rep.lower < 1.0 < rep.upper


def test_norm_upper_is_sound(rng):
    a = complex_matrix(rng, 3)
    T = Dense(a) + Identity() * 2.0
    assert norm_upper(T) >= np.linalg.svd(a + 2 * np.eye(3), compute_uv=False)[0] - 1e-12


def test_restriction_to_tail():
    T = Restrict(Diagonal(ExplicitThenZero((5.0, 3.0, 2.0))), CanonicalTail(1))
    rep = operator_norm(T)
    assert rep.value == pytest.approx(3.0)


def test_self_adjoint_and_positive_predicates(rng):
    h = hermitian(rng, 4)
    assert is_self_adjoint(Dense(h))
    assert not is_self_adjoint(Dense([[0.0, 1.0], [0.0, 0.0]]))
    assert is_positive(Projection(SpanFinite((np.array([1.0, 1.0]),))))
    assert not is_positive(Dense(np.diag([1.0, -1.0])))


def test_eigenvalues_against_characteristic_polynomial(rng):
    for n in (2, 3):
        for _ in range(10):
            a = hermitian(rng, n)
            roots = np.sort(np.roots(np.poly(a)).real)[::-1]
            assert np.allclose(hermitian_eig(a).eigenvalues, roots, atol=1e-9)


def test_eig_spec_examples():
    w, v = hermitian_eig(np.diag([3.0, 1.0, 2.0]))
    assert np.allclose(w, [3, 2, 1]) and np.allclose(np.abs(v), np.eye(3)[:, [0, 2, 1]])
    w, v = hermitian_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
    assert np.allclose(w, [1, -1])
    assert np.allclose(v[:, 0], np.array([1, 1]) / math.sqrt(2))
    assert np.allclose(np.abs(v[:, 1]), np.array([1, 1]) / math.sqrt(2))


def test_reconstruction_random_hermitian(rng):
    a = hermitian(rng, 8)
    w, v = hermitian_eig(a)
    assert np.allclose((v * w) @ v.conj().T, a, atol=1e-9)
