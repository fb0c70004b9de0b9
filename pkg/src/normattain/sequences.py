"""Closed-form coefficient sequences indexed from j = 1.

Every family is monotone or eventually constant, which keeps the supremum
of ``|lambda_j|`` (and of any convex function of ``lambda_j``) decidable,
together with whether that supremum is attained.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvariantViolation


def _real(x, name):
    try:
        x = float(x)
    except (TypeError, ValueError):
        raise InvariantViolation(f"{name} must be a real number, got {x!r}") from None
    if not math.isfinite(x):
        raise InvariantViolation(f"{name} must be finite, got {x!r}")
    return x


class Supremum(NamedTuple):
    value: float
    attained: bool
    witness_index: int | None


def _indices(j):
    j = np.asarray(j)
    if np.any(j < 1):
        raise IndexError("sequences are indexed from 1")
    return j


class SeqSpec:
    """Base class for real sequences."""

    def eval(self, j):
        raise NotImplementedError

    def __call__(self, j):
        return self.eval(j)

    def sup_of(self, g):
        """Supremum of ``g(lambda_j)`` over j.

        ``g`` must be convex or monotone on the range of the sequence, so the
        supremum over the closure of the range sits at an end of it.
        """
        raise NotImplementedError

    def sup_modulus(self):
        return self.sup_of(abs)

    def shifted(self, k):
        """Sequence j -> eval(j + k)."""
        raise NotImplementedError

    def scaled(self, alpha):
        raise NotImplementedError

    def plus(self, c):
        raise NotImplementedError

    def bounds(self):
        """(inf, sup) of the values."""
        raise NotImplementedError

    def is_nonnegative(self):
        return self.bounds()[0] >= 0.0

    def is_nonpositive(self):
        return self.bounds()[1] <= 0.0

    @property
    def limit_value(self):
        raise NotImplementedError


@dataclass(frozen=True)
class ExplicitThenZero(SeqSpec):
    values: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(_real(v, "values[]") for v in self.values))

    def eval(self, j):
        j = _indices(j)
        vals = np.array(self.values + (0.0,))
        return vals[np.minimum(j, len(self.values) + 1) - 1]

    def _candidates(self):
        return list(self.values) + [0.0]

    def sup_of(self, g):
        cands = [g(v) for v in self._candidates()]
        i = int(np.argmax(cands))
        return Supremum(float(cands[i]), True, i + 1)

    def shifted(self, k):
        return ExplicitThenZero(self.values[k:])

    def scaled(self, alpha):
        return ExplicitThenZero(tuple(alpha * v for v in self.values))

    def plus(self, c):
        return ExplicitThenConstant(tuple(v + c for v in self.values), c)

    def bounds(self):
        c = self._candidates()
        return min(c), max(c)

    @property
    def limit_value(self):
        return 0.0


@dataclass(frozen=True)
class ExplicitThenConstant(SeqSpec):
    values: tuple = ()
    tail: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(_real(v, "values[]") for v in self.values))
        object.__setattr__(self, "tail", _real(self.tail, "tail"))

    def eval(self, j):
        j = _indices(j)
        vals = np.array(self.values + (self.tail,))
        return vals[np.minimum(j, len(self.values) + 1) - 1]

    def _candidates(self):
        return list(self.values) + [self.tail]

    def sup_of(self, g):
        cands = [g(v) for v in self._candidates()]
        i = int(np.argmax(cands))
        return Supremum(float(cands[i]), True, i + 1)

    def shifted(self, k):
        return ExplicitThenConstant(self.values[k:], self.tail)

    def scaled(self, alpha):
        return ExplicitThenConstant(tuple(alpha * v for v in self.values), alpha * self.tail)

    def plus(self, c):
        return ExplicitThenConstant(tuple(v + c for v in self.values), self.tail + c)

    def bounds(self):
        c = self._candidates()
        return min(c), max(c)

    @property
    def limit_value(self):
        return self.tail


class _Monotone(SeqSpec):
    """Families of the form limit - coeff * f(j) with f strictly decreasing to 0."""

    def first(self):
        return float(self.eval(1))

    @property
    def limit_value(self):
        return self.limit

    @property
    def strictly_monotone(self):
        return self.coeff != 0.0

    @property
    def increasing(self):
        return self.coeff > 0.0

    @property
    def decreasing(self):
        return self.coeff < 0.0

    def sup_of(self, g):
        first = g(self.first())
        if not self.strictly_monotone:
            return Supremum(float(first), True, 1)
        at_limit = g(self.limit)
        if at_limit > first:
            return Supremum(float(at_limit), False, None)
        return Supremum(float(first), True, 1)

    def bounds(self):
        return tuple(sorted((self.first(), self.limit)))


@dataclass(frozen=True)
class Harmonic(_Monotone):
    """lambda_j = limit - coeff / (j + offset)."""

    limit: float = 0.0
    coeff: float = 0.0
    offset: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "limit", _real(self.limit, "limit"))
        object.__setattr__(self, "coeff", _real(self.coeff, "coeff"))
        object.__setattr__(self, "offset", _real(self.offset, "offset"))
        if self.offset <= 0.0:
            raise InvariantViolation(f"harmonic offset must be > 0, got {self.offset}")

    def eval(self, j):
        j = _indices(j)
        return self.limit - self.coeff / (j + self.offset)

    def shifted(self, k):
        return Harmonic(self.limit, self.coeff, self.offset + k)

    def scaled(self, alpha):
        return Harmonic(alpha * self.limit, alpha * self.coeff, self.offset)

    def plus(self, c):
        return Harmonic(self.limit + c, self.coeff, self.offset)


@dataclass(frozen=True)
class Geometric(_Monotone):
    """lambda_j = limit - coeff * ratio**j."""

    limit: float = 0.0
    coeff: float = 0.0
    ratio: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "limit", _real(self.limit, "limit"))
        object.__setattr__(self, "coeff", _real(self.coeff, "coeff"))
        object.__setattr__(self, "ratio", _real(self.ratio, "ratio"))
        if not 0.0 < self.ratio < 1.0:
            raise InvariantViolation(f"geometric ratio must lie in (0, 1), got {self.ratio}")

    def eval(self, j):
        j = _indices(j)
        return self.limit - self.coeff * self.ratio ** np.asarray(j, dtype=float)

    def shifted(self, k):
        return Geometric(self.limit, self.coeff * self.ratio**k, self.ratio)

    def scaled(self, alpha):
        return Geometric(alpha * self.limit, alpha * self.coeff, self.ratio)

    def plus(self, c):
        return Geometric(self.limit + c, self.coeff, self.ratio)


class ComplexSeqSpec:
    """Complex coefficient sequence for diagonal operators."""

    def eval(self, j):
        raise NotImplementedError

    def __call__(self, j):
        return self.eval(j)

    def conj(self):
        raise NotImplementedError

    def sup_modulus(self):
        raise NotImplementedError

    def sup_shifted_modulus(self, alpha):
        """Supremum of |alpha + lambda_j|, or None when not decidable here."""
        raise NotImplementedError

    def shifted(self, k):
        raise NotImplementedError


@dataclass(frozen=True)
class RealSeq(ComplexSeqSpec):
    seq: SeqSpec

    def eval(self, j):
        return np.asarray(self.seq.eval(j), dtype=complex)

    def conj(self):
        return self

    def sup_modulus(self):
        return self.seq.sup_modulus()

    def sup_shifted_modulus(self, alpha):
        alpha = complex(alpha)
        # |alpha + t| is convex in real t
        return self.seq.sup_of(lambda t: abs(alpha + t))

    def shifted(self, k):
        return RealSeq(self.seq.shifted(k))


@dataclass(frozen=True)
class UnitModulus(ComplexSeqSpec):
    """lambda_j = a_j + i*sign*sqrt(1 - a_j**2) with a_j = real_part(j).

    ``conjugate=True`` flips the sign of the imaginary part.
    """

    real_part: SeqSpec
    conjugate: bool = False

    def __post_init__(self):
        lo, hi = self.real_part.bounds()
        if lo < -1.0 or hi > 1.0:
            raise InvariantViolation(
                f"unit-modulus real part must stay in [-1, 1], range is [{lo}, {hi}]"
            )

    def eval(self, j):
        a = np.asarray(self.real_part.eval(j), dtype=float)
        b = np.sqrt(np.clip(1.0 - a * a, 0.0, None))
        return a - 1j * b if self.conjugate else a + 1j * b

    def conj(self):
        return UnitModulus(self.real_part, not self.conjugate)

    def sup_modulus(self):
        return Supremum(1.0, True, 1)

    def sup_shifted_modulus(self, alpha):
        alpha = complex(alpha)
        if alpha.imag != 0.0:
            return None
        r = alpha.real
        # |r + lambda_j|^2 = r^2 + 1 + 2 r a_j is affine in a_j
        return self.real_part.sup_of(lambda a: math.sqrt(max(r * r + 1.0 + 2.0 * r * a, 0.0)))

    def shifted(self, k):
        return UnitModulus(self.real_part.shifted(k), self.conjugate)


def as_complex_seq(seq):
    if isinstance(seq, ComplexSeqSpec):
        return seq
    if isinstance(seq, SeqSpec):
        return RealSeq(seq)
    raise TypeError(f"expected a sequence spec, got {type(seq).__name__}")
