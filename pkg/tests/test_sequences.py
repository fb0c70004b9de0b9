import numpy as np
import pytest

from normattain.errors import InvariantViolation
from normattain.sequences import (
    ExplicitThenConstant,
    ExplicitThenZero,
    Geometric,
    Harmonic,
    RealSeq,
    UnitModulus,
)

J = np.arange(1, 200)


def test_harmonic_values():
    s = Harmonic(1.0, 1.0, 1.0)
    assert np.allclose(s.eval(J), 1 - 1 / (J + 1))
    assert s.increasing and not s.decreasing


def test_geometric_rejects_bad_ratio():
    with pytest.raises(InvariantViolation):
        Geometric(0.0, 1.0, 1.5)


def test_explicit_sup_is_attained():
    sup = ExplicitThenZero((0.5, -3.0, 2.0)).sup_modulus()
    assert sup == (3.0, True, 2)


def test_explicit_then_constant_tail_wins():
    s = ExplicitThenConstant((1.0, 2.0), 5.0)
    assert s.sup_modulus().value == 5.0
    assert s.eval(10) == 5.0


def test_increasing_sup_not_attained():
    sup = Harmonic(1.0, 1.0, 1.0).sup_modulus()
    assert sup.value == 1.0 and not sup.attained


def test_decreasing_sup_attained_at_first():
    sup = Harmonic(1.0, -1.0, 1.0).sup_modulus()
    assert sup.attained and sup.witness_index == 1 and sup.value == 1.5


@pytest.mark.parametrize(
    "s",
    [Harmonic(0.3, -2.0, 2.5), Geometric(1.0, 0.5, 0.3), ExplicitThenConstant((4.0, -1.0, 2.0), 0.5)],
)
def test_shift_matches_eval(s):
    for k in (0, 1, 5):
        assert np.allclose(s.shifted(k).eval(J), s.eval(J + k))


@pytest.mark.parametrize("s", [Harmonic(0.3, -2.0, 2.5), Geometric(1.0, 0.5, 0.3)])
def test_sup_matches_dense_sampling(s):
    vals = np.abs(s.eval(np.arange(1, 20000)))
    assert s.sup_modulus().value >= vals.max() - 1e-12
    assert s.sup_modulus().value - vals.max() < 1e-3


def test_unit_modulus_values():
    u = UnitModulus(Harmonic(0.5, 0.5, 1.0))
    assert np.allclose(np.abs(u.eval(J)), 1.0)
    assert np.allclose(u.eval(J).real, 0.5 - 0.5 / (J + 1))
    assert np.allclose(u.conj().eval(J), np.conj(u.eval(J)))


def test_unit_modulus_shifted_sup():
    u = UnitModulus(Harmonic(1.0, 1.0, 1.0))
    sup = u.sup_shifted_modulus(1.0)
    assert sup.value == 2.0 and not sup.attained


def test_unit_modulus_rejects_large_real_part():
    with pytest.raises(InvariantViolation):
        UnitModulus(ExplicitThenZero((1.5,)))


def test_real_seq_wrapper():
    r = RealSeq(Geometric(2.0, 1.0, 0.5))
    assert np.allclose(r.eval(J), 2.0 - 0.5**J)
