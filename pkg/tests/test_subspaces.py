from fractions import Fraction

import numpy as np
import pytest

from conftest import complex_matrix
from normattain.errors import InvariantViolation
from normattain.subspaces import (
    BlockRepetition,
    CanonicalTail,
    ComplementFinite,
    SpanFinite,
    common_block_ends,
    complementary_pattern,
    pad_rows,
)


@pytest.mark.parametrize(
    "M",
    [
        SpanFinite((np.array([1.0, 1j]), np.array([0.0, 0.0, 2.0]))),
        ComplementFinite((np.array([1.0, 2.0, 0.0, 1.0]),)),
        CanonicalTail(3),
        BlockRepetition((2,), (3,)),
        BlockRepetition((), (1, 2)),
    ],
)
def test_projection_is_orthogonal_and_idempotent(M):
    p = pad_rows(M.project(np.eye(24, dtype=complex)), 24)[:24, :24]
    assert np.allclose(p, p.conj().T, atol=1e-12)
    # truncation can cut the last block, so check idempotence well inside
    assert np.allclose((p @ p)[:18, :18], p[:18, :18], atol=1e-12)


@pytest.mark.parametrize(
    "M",
    [
        SpanFinite((np.array([1.0, 1j, 0.5]), np.array([0.0, 1.0]))),
        ComplementFinite((np.array([1.0, -1.0]),)),
        CanonicalTail(2),
        BlockRepetition((2,), (3,)),
    ],
)
def test_embedding_is_isometric(rng, M):
    k = 4 if M.dim == np.inf else M.dim
    x = complex_matrix(rng, k, 3)
    y = M.embed(x)
    assert np.allclose(np.linalg.norm(y, axis=0), np.linalg.norm(x, axis=0), rtol=1e-14)
    back = M.coembed(y)
    assert np.allclose(pad_rows(back, k)[:k], x, atol=1e-12)


def test_block_embedding_norm_exact():
    M = BlockRepetition((2,), (3,))
    coords = [Fraction(1, 3), Fraction(-2, 7), Fraction(5)]
    assert M.embedded_norm_squared(coords) == sum(c * c for c in coords)


def test_span_rejects_dependent_vectors():
    with pytest.raises(InvariantViolation):
        SpanFinite((np.array([1.0, 2.0]), np.array([2.0, 4.0])))


def test_block_pattern_no_common_end():
    x = BlockRepetition((), (1, 2))
    m = complementary_pattern(x)
    assert m == BlockRepetition((2,), (3,))
    assert common_block_ends(x, m) == []


def test_common_ends_found():
    assert common_block_ends(BlockRepetition((), (2,)), BlockRepetition((), (3,)))[:2] == [6, 12]
