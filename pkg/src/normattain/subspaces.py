"""Closed subspaces of l2 with exact projections and isometric embeddings.

Vectors are numpy arrays holding the leading coordinates x_1, x_2, ...;
all later coordinates are zero. Operators act on 2-D arrays whose columns
are such vectors, so every method here takes and returns 2-D arrays.

Each subspace M carries a fixed orthonormal basis, which defines the
embedding V_M: the m-th coordinate of M is sent to the m-th basis vector.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvariantViolation

INDEPENDENCE_TOL = 1e-10


def pad_rows(x, n):
    """Zero-extend (or keep) a 2-D array to at least ``n`` rows."""
    if x.shape[0] >= n:
        return x
    out = np.zeros((n, x.shape[1]), dtype=complex)
    out[: x.shape[0]] = x
    return out


def _vectors(vectors, name):
    out = []
    for v in vectors:
        v = np.asarray(v, dtype=complex).ravel()
        if v.size == 0 or not np.all(np.isfinite(v)):
            raise InvariantViolation(f"{name}: vectors must be finite and non-empty")
        out.append(tuple(complex(c) for c in v))
    return tuple(out)


def _orthonormal(vectors):
    n = max(len(v) for v in vectors)
    a = np.zeros((n, len(vectors)), dtype=complex)
    for k, v in enumerate(vectors):
        a[: len(v), k] = v
    norms = np.linalg.norm(a, axis=0)
    if np.any(norms == 0.0):
        raise InvariantViolation("generating vectors must be nonzero")
    unit = a / norms
    gram_det = np.linalg.det(unit.conj().T @ unit).real
    if gram_det <= INDEPENDENCE_TOL:
        raise InvariantViolation(f"generating vectors are linearly dependent (Gram det {gram_det:.3g})")
    q = np.zeros_like(a)
    for k in range(a.shape[1]):
        w = a[:, k].copy()
        for _ in range(2):
            for i in range(k):
                w -= (q[:, i].conj() @ w) * q[:, i]
        q[:, k] = w / np.linalg.norm(w)
    return q


class SubspaceSpec:
    dim = math.inf
    codim = math.inf

    @property
    def support(self):
        """Ambient coordinates touched by the finite part of the structure."""
        return 0

    def project(self, y):
        raise NotImplementedError

    def embed(self, x):
        raise NotImplementedError

    def coembed(self, y):
        raise NotImplementedError

    def unit_vector(self):
        """V_M e_1 as a 1-D array."""
        return self.embed(np.eye(1, dtype=complex))[:, 0]

    def basis_within(self, d):
        """Columns V_M e_j (j = 1, 2, ...) supported in the first ``d`` coordinates."""
        cols = []
        j = 0
        while j < min(self.dim, d):
            e = np.zeros((j + 1, 1), dtype=complex)
            e[j, 0] = 1.0
            col = self.embed(e)[:, 0]
            nz = np.flatnonzero(np.abs(col) > 0)
            if nz.size and nz[-1] >= d:
                break
            cols.append(pad_rows(col[:, None], d)[:d, 0])
            j += 1
        if not cols:
            return np.zeros((d, 0), dtype=complex)
        return np.column_stack(cols)


@dataclass(frozen=True)
class SpanFinite(SubspaceSpec):
    vectors: tuple
    _q: np.ndarray = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        vecs = _vectors(self.vectors, "span")
        if not vecs:
            raise InvariantViolation("span needs at least one vector")
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "_q", _orthonormal(vecs))

    @property
    def dim(self):
        return self._q.shape[1]

    @property
    def support(self):
        return self._q.shape[0]

    @property
    def basis(self):
        return self._q

    def project(self, y):
        y = pad_rows(y, self.support)
        head = self._q @ (self._q.conj().T @ y[: self.support])
        return head

    def embed(self, x):
        x = pad_rows(x, self.dim)[: self.dim]
        return self._q @ x

    def coembed(self, y):
        y = pad_rows(y, self.support)
        return self._q.conj().T @ y[: self.support]


@dataclass(frozen=True)
class ComplementFinite(SubspaceSpec):
    """Orthogonal complement of a finite span."""

    vectors: tuple
    _q: np.ndarray = field(init=False, repr=False, compare=False, hash=False)
    _b: np.ndarray = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        vecs = _vectors(self.vectors, "complement")
        if not vecs:
            raise InvariantViolation("complement needs at least one vector")
        object.__setattr__(self, "vectors", vecs)
        q = _orthonormal(vecs)
        object.__setattr__(self, "_q", q)
        n, k = q.shape
        # basis of the complement inside the first n coordinates, in index order
        proj = np.eye(n, dtype=complex) - q @ q.conj().T
        cols = []
        for j in range(n):
            w = proj[:, j].copy()
            for _ in range(2):
                for b in cols:
                    w -= (b.conj() @ w) * b
            nrm = np.linalg.norm(w)
            if nrm > 1e-8:
                cols.append(w / nrm)
            if len(cols) == n - k:
                break
        b = np.column_stack(cols) if cols else np.zeros((n, 0), dtype=complex)
        object.__setattr__(self, "_b", b)

    @property
    def codim(self):
        return self._q.shape[1]

    @property
    def support(self):
        return self._q.shape[0]

    def project(self, y):
        n = self.support
        y = pad_rows(y, n).copy()
        y[:n] -= self._q @ (self._q.conj().T @ y[:n])
        return y

    def embed(self, x):
        n, k = self._q.shape
        r = n - k
        x = pad_rows(x, r)
        out = np.zeros((max(n, x.shape[0] + k), x.shape[1]), dtype=complex)
        out[:n] = self._b @ x[:r]
        out[n:] = x[r:]
        return out

    def coembed(self, y):
        n = self.support
        y = pad_rows(y, n)
        return np.vstack([self._b.conj().T @ y[:n], y[n:]])


@dataclass(frozen=True)
class CanonicalTail(SubspaceSpec):
    """Closed span of e_{k+1}, e_{k+2}, ..."""

    k: int = 0

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 0:
            raise InvariantViolation(f"canonical tail needs a nonnegative integer k, got {self.k!r}")
        object.__setattr__(self, "k", int(self.k))

    @property
    def codim(self):
        return self.k

    @property
    def support(self):
        return self.k

    def project(self, y):
        y = y.copy()
        y[: self.k] = 0.0
        return y

    def embed(self, x):
        return np.vstack([np.zeros((self.k, x.shape[1]), dtype=complex), x])

    def coembed(self, y):
        return y[self.k :]


@dataclass(frozen=True)
class BlockRepetition(SubspaceSpec):
    """Vectors constant on consecutive blocks of sizes prefix + period + period + ...

    (prefix=(), period=(1, 2)) gives x = (x1, x2, x2, x3, x4, x4, ...).
    """

    prefix: tuple = ()
    period: tuple = (1,)

    def __post_init__(self):
        for name in ("prefix", "period"):
            vals = tuple(getattr(self, name))
            if any(int(v) != v or v < 1 for v in vals):
                raise InvariantViolation(f"block sizes must be positive integers, got {name}={vals}")
            object.__setattr__(self, name, tuple(int(v) for v in vals))
        if not self.period:
            raise InvariantViolation("block repetition needs a non-empty period")

    def block_size(self, m):
        """Size of block m (0-based)."""
        p = len(self.prefix)
        if m < p:
            return self.prefix[m]
        return self.period[(m - p) % len(self.period)]

    def sizes(self, count):
        return np.array([self.block_size(m) for m in range(count)], dtype=np.intp)

    def sizes_covering(self, length):
        """Block sizes of the blocks that meet coordinates 1..length."""
        out = []
        total = 0
        m = 0
        while total < length:
            s = self.block_size(m)
            out.append(s)
            total += s
            m += 1
        return np.array(out, dtype=np.intp)

    def block_ends(self, limit):
        """1-based indices <= limit that end a block."""
        ends = np.cumsum(self.sizes_covering(limit))
        return ends[ends <= limit]

    @property
    def codim(self):
        if any(s > 1 for s in self.period):
            return math.inf
        return sum(s - 1 for s in self.prefix)

    @property
    def support(self):
        return sum(self.prefix)

    @property
    def prefix_length(self):
        return sum(self.prefix)

    @property
    def period_length(self):
        return sum(self.period)

    def project(self, y):
        sizes = self.sizes_covering(max(y.shape[0], 1))
        total = int(sizes.sum())
        y = pad_rows(y, total)
        starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
        means = np.add.reduceat(y, starts, axis=0) / sizes[:, None]
        return np.repeat(means, sizes, axis=0)

    def embed(self, x):
        sizes = self.sizes(x.shape[0])
        return np.repeat(x / np.sqrt(sizes)[:, None], sizes, axis=0)

    def coembed(self, y):
        sizes = self.sizes_covering(max(y.shape[0], 1))
        total = int(sizes.sum())
        y = pad_rows(y, total)
        starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
        return np.add.reduceat(y, starts, axis=0) / np.sqrt(sizes)[:, None]

    def embedded_norm_squared(self, coords):
        """Exact ||V_M x||^2 for rational coordinates ``coords``."""
        sizes = self.sizes(len(coords))
        return sum(int(s) * (Fraction(c) ** 2 / int(s)) for c, s in zip(coords, sizes))


def common_block_ends(x, m):
    """Block ends shared by two block patterns, searched over one full joint period.

    After both prefixes the pattern of ends repeats with period
    lcm(period lengths), so a finite search decides whether any common end exists.
    """
    horizon = max(x.prefix_length, m.prefix_length) + 2 * math.lcm(x.period_length, m.period_length)
    return sorted(set(x.block_ends(horizon).tolist()) & set(m.block_ends(horizon).tolist()))


def complementary_pattern(x):
    """Block pattern M whose block ends are exactly the non-ends of ``x``.

    M and X then share no block end, so M ∩ X = {0}. Requires X to have
    infinitely many blocks of size >= 2. For (prefix=(), period=(1, 2)) this
    returns (prefix=(2,), period=(3,)).
    """
    if not any(s > 1 for s in x.period):
        raise InvariantViolation("pattern has finite co-rank; no complementary pattern exists")
    horizon = x.prefix_length + 4 * x.period_length + 1
    ends = set(x.block_ends(horizon).tolist())
    non_ends = [i for i in range(1, horizon + 1) if i not in ends]
    # non-ends of x are eventually periodic with period x.period_length
    sizes = np.diff([0] + non_ends).tolist()
    per_period = sum(s - 1 for s in x.period)
    start_after = x.prefix_length
    # sizes repeat once the previous non-end already lies past the prefix
    idx = next(i for i, e in enumerate(non_ends) if e > start_after) + 1
    prefix = sizes[:idx]
    period = sizes[idx : idx + per_period]
    cand = BlockRepetition(tuple(prefix), tuple(period))
    lim = horizon - x.period_length
    want = [e for e in non_ends if e <= lim]
    got = cand.block_ends(lim).tolist()
    if got != want:
        raise AssertionError("complementary pattern construction failed")
    return cand
