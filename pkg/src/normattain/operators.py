"""Symbolic bounded operators on l2 and their exact structured evaluation.

An operator is a small expression tree. Leaves are diagonal, dense-block,
finite-rank, projection, shift and identity operators; inner nodes are
scaling, sums, compositions, adjoints, restrictions to a subspace and the
positive square root of T*T. Evaluation is exact on finitely supported
vectors: no leaf ever produces an infinitely supported image from a
finitely supported input.

Coordinates are 1-based in the mathematics and 0-based in arrays.
"""

import math
from dataclasses import dataclass

import numpy as np

from .eig import canonical_basis, hermitian_eig
from .errors import InvariantViolation, NotPositive, UnboundedSupport
from .sequences import ExplicitThenConstant, ExplicitThenZero, RealSeq, UnitModulus, as_complex_seq
from .subspaces import (
    BlockRepetition,
    CanonicalTail,
    ComplementFinite,
    SpanFinite,
    SubspaceSpec,
    pad_rows,
)

MATRIX_ATOL = 1e-10


def _scalar(alpha, name="alpha"):
    try:
        alpha = complex(alpha)
    except (TypeError, ValueError):
        raise InvariantViolation(f"{name} must be a complex scalar, got {alpha!r}") from None
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise InvariantViolation(f"{name} must be finite, got {alpha!r}")
    return alpha


def _max_opt(values):
    if any(v is None for v in values):
        return None
    return max(values, default=0)


class Operator:
    """Base class of operator expressions.

    ``domain`` and ``codomain`` are ``None`` for l2 in canonical coordinates
    and a :class:`SubspaceSpec` for the coordinates of a subspace (the
    domain of a restriction).
    """

    domain = None
    codomain = None

    def _matvec(self, x):
        raise NotImplementedError

    def _rmatvec(self, y):
        raise NotImplementedError

    def norm_bound(self):
        raise NotImplementedError

    def tail_scalar(self):
        """(n, mu) when T = A ⊕ mu*I with A acting on the first n coordinates."""
        return None

    def domain_support(self):
        """n with T e_j = 0 for every j > n, when such n is known."""
        return None

    def range_support(self):
        """n with range(T) inside span(e_1..e_n), when such n is known."""
        return None

    children = ()

    def __add__(self, other):
        return Sum((self, other))

    def __sub__(self, other):
        return Sum((self, Scale(-1.0, other)))

    def __neg__(self):
        return Scale(-1.0, self)

    def __matmul__(self, other):
        return Compose((self, other))

    def __mul__(self, alpha):
        return Scale(alpha, self)

    __rmul__ = __mul__

    @property
    def H(self):
        return adjoint(self)


@dataclass(frozen=True, eq=False)
class Identity(Operator):
    def _matvec(self, x):
        return x

    _rmatvec = _matvec

    def norm_bound(self):
        return 1.0

    def tail_scalar(self):
        return 0, 1.0 + 0j


@dataclass(frozen=True, eq=False)
class Diagonal(Operator):
    """e_j -> lambda_j e_j."""

    sequence: object

    def __post_init__(self):
        object.__setattr__(self, "sequence", as_complex_seq(self.sequence))

    def coefficients(self, n):
        if n == 0:
            return np.zeros(0, dtype=complex)
        return np.asarray(self.sequence.eval(np.arange(1, n + 1)), dtype=complex)

    def _matvec(self, x):
        return x * self.coefficients(x.shape[0])[:, None]

    def _rmatvec(self, y):
        return y * np.conj(self.coefficients(y.shape[0]))[:, None]

    def norm_bound(self):
        return self.sequence.sup_modulus().value

    def _explicit(self):
        seq = self.sequence
        inner = seq.seq if isinstance(seq, RealSeq) else seq.real_part
        if isinstance(inner, (ExplicitThenZero, ExplicitThenConstant)):
            return len(inner.values)
        return None

    def tail_scalar(self):
        n = self._explicit()
        if n is None:
            return None
        return n, complex(self.sequence.eval(n + 1))

    def domain_support(self):
        seq = self.sequence
        if isinstance(seq, RealSeq) and isinstance(seq.seq, ExplicitThenZero):
            return len(seq.seq.values)
        return None

    range_support = domain_support


@dataclass(frozen=True, eq=False)
class Dense(Operator):
    """A d x d block on the first d coordinates followed by a zero or identity tail."""

    matrix: np.ndarray
    tail: str = "zero"

    def __post_init__(self):
        a = np.atleast_2d(np.array(self.matrix, dtype=complex))
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise InvariantViolation(f"dense block must be square and non-empty, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvariantViolation("dense block has non-finite entries")
        if self.tail not in ("zero", "identity"):
            raise InvariantViolation(f"dense tail must be 'zero' or 'identity', got {self.tail!r}")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def d(self):
        return self.matrix.shape[0]

    def _apply(self, a, x):
        x = pad_rows(x, self.d)
        head = a @ x[: self.d]
        if self.tail == "zero":
            return head
        return np.vstack([head, x[self.d :]])

    def _matvec(self, x):
        return self._apply(self.matrix, x)

    def _rmatvec(self, y):
        return self._apply(self.matrix.conj().T, y)

    def norm_bound(self):
        s = float(np.linalg.norm(self.matrix, 2))
        return max(s, 1.0) if self.tail == "identity" else s

    def tail_scalar(self):
        return self.d, (1.0 + 0j) if self.tail == "identity" else 0j

    def domain_support(self):
        return self.d if self.tail == "zero" else None

    range_support = domain_support


@dataclass(frozen=True, eq=False)
class FiniteRank(Operator):
    """x -> sum_k sigma_k <x, right_k> left_k."""

    terms: tuple

    def __post_init__(self):
        terms = []
        for t in self.terms:
            sigma, left, right = t
            sigma = float(sigma)
            if not (math.isfinite(sigma) and sigma > 0):
                raise InvariantViolation(f"finite-rank weights must be > 0, got {sigma}")
            left = np.array(left, dtype=complex).ravel()
            right = np.array(right, dtype=complex).ravel()
            for v in (left, right):
                if v.size == 0 or not np.all(np.isfinite(v)):
                    raise InvariantViolation("finite-rank vectors must be finite and non-empty")
                v.setflags(write=False)
            terms.append((sigma, left, right))
        if not terms:
            raise InvariantViolation("finite-rank operator needs at least one term")
        object.__setattr__(self, "terms", tuple(terms))

    def _go(self, x, pairs):
        rows = max(len(u) for _, u, _ in pairs)
        out = np.zeros((rows, x.shape[1]), dtype=complex)
        for sigma, u, v in pairs:
            coeff = v.conj() @ pad_rows(x, len(v))[: len(v)]
            out[: len(u)] += sigma * np.outer(u, coeff)
        return out

    def _matvec(self, x):
        return self._go(x, self.terms)

    def _rmatvec(self, y):
        return self._go(y, [(s, v, u) for s, u, v in self.terms])

    def norm_bound(self):
        return float(sum(s * np.linalg.norm(u) * np.linalg.norm(v) for s, u, v in self.terms))

    def domain_support(self):
        return max(len(v) for _, _, v in self.terms)

    def range_support(self):
        return max(len(u) for _, u, _ in self.terms)

    def tail_scalar(self):
        return max(self.domain_support(), self.range_support()), 0j


@dataclass(frozen=True, eq=False)
class Projection(Operator):
    """Orthogonal projection onto a subspace."""

    subspace: SubspaceSpec

    def _matvec(self, x):
        return self.subspace.project(x)

    _rmatvec = _matvec

    def norm_bound(self):
        return 1.0

    def tail_scalar(self):
        s = self.subspace
        if isinstance(s, SpanFinite):
            return s.support, 0j
        if isinstance(s, (ComplementFinite, CanonicalTail)):
            return s.support, 1.0 + 0j
        if isinstance(s, BlockRepetition) and all(b == 1 for b in s.period):
            return s.prefix_length, 1.0 + 0j
        return None

    def domain_support(self):
        if isinstance(self.subspace, SpanFinite):
            return self.subspace.support
        return None

    range_support = domain_support


@dataclass(frozen=True, eq=False)
class Shift(Operator):
    """e_j -> e_{j + offset}."""

    offset: int = 1

    def __post_init__(self):
        if int(self.offset) != self.offset or self.offset < 1:
            raise InvariantViolation(f"shift offset must be a positive integer, got {self.offset!r}")
        object.__setattr__(self, "offset", int(self.offset))

    def _matvec(self, x):
        return np.vstack([np.zeros((self.offset, x.shape[1]), dtype=complex), x])

    def _rmatvec(self, y):
        return y[self.offset :]

    def norm_bound(self):
        return 1.0


@dataclass(frozen=True, eq=False)
class Scale(Operator):
    alpha: complex
    child: Operator

    def __post_init__(self):
        object.__setattr__(self, "alpha", _scalar(self.alpha))

    @property
    def children(self):
        return (self.child,)

    @property
    def domain(self):
        return self.child.domain

    @property
    def codomain(self):
        return self.child.codomain

    def _matvec(self, x):
        return self.alpha * self.child._matvec(x)

    def _rmatvec(self, y):
        return np.conj(self.alpha) * self.child._rmatvec(y)

    def norm_bound(self):
        return abs(self.alpha) * self.child.norm_bound()

    def tail_scalar(self):
        t = self.child.tail_scalar()
        return None if t is None else (t[0], self.alpha * t[1])

    def domain_support(self):
        return self.child.domain_support()

    def range_support(self):
        return self.child.range_support()


def _combine(parts):
    rows = max(p.shape[0] for p in parts)
    out = np.zeros((rows, parts[0].shape[1]), dtype=complex)
    for p in parts:
        out[: p.shape[0]] += p
    return out


@dataclass(frozen=True, eq=False)
class Sum(Operator):
    children: tuple

    def __post_init__(self):
        kids = tuple(self.children)
        if not kids:
            raise InvariantViolation("sum needs at least one term")
        if any(k.domain != kids[0].domain or k.codomain != kids[0].codomain for k in kids):
            raise InvariantViolation("sum terms act between different spaces")
        object.__setattr__(self, "children", kids)

    @property
    def domain(self):
        return self.children[0].domain

    @property
    def codomain(self):
        return self.children[0].codomain

    def _matvec(self, x):
        return _combine([c._matvec(x) for c in self.children])

    def _rmatvec(self, y):
        return _combine([c._rmatvec(y) for c in self.children])

    def norm_bound(self):
        return float(sum(c.norm_bound() for c in self.children))

    def tail_scalar(self):
        tails = [c.tail_scalar() for c in self.children]
        if any(t is None for t in tails):
            return None
        return max(t[0] for t in tails), sum(t[1] for t in tails)

    def domain_support(self):
        return _max_opt([c.domain_support() for c in self.children])

    def range_support(self):
        return _max_opt([c.range_support() for c in self.children])


@dataclass(frozen=True, eq=False)
class Compose(Operator):
    """children[0] ∘ children[1] ∘ ... (rightmost acts first)."""

    children: tuple

    def __post_init__(self):
        kids = tuple(self.children)
        if not kids:
            raise InvariantViolation("composition needs at least one factor")
        for left, right in zip(kids, kids[1:]):
            if left.domain != right.codomain:
                raise InvariantViolation("composition factors act between incompatible spaces")
        object.__setattr__(self, "children", kids)

    @property
    def domain(self):
        return self.children[-1].domain

    @property
    def codomain(self):
        return self.children[0].codomain

    def _matvec(self, x):
        for c in reversed(self.children):
            x = c._matvec(x)
        return x

    def _rmatvec(self, y):
        for c in self.children:
            y = c._rmatvec(y)
        return y

    def norm_bound(self):
        return float(np.prod([c.norm_bound() for c in self.children]))

    def tail_scalar(self):
        tails = [c.tail_scalar() for c in self.children]
        if any(t is None for t in tails):
            return None
        return max(t[0] for t in tails), complex(np.prod([t[1] for t in tails]))

    def domain_support(self):
        last = self.children[-1]
        ds = last.domain_support()
        if ds is not None or len(self.children) == 1:
            return ds
        rest = Compose(self.children[:-1]).domain_support()
        if rest is None:
            return None
        if isinstance(last, Shift):
            return max(rest - last.offset, 0)
        t = last.tail_scalar()
        if t is not None:
            return max(t[0], rest)
        return None

    def range_support(self):
        first = self.children[0]
        rs = first.range_support()
        if rs is not None or len(self.children) == 1:
            return rs
        rest = Compose(self.children[1:]).range_support()
        t = first.tail_scalar()
        if rest is not None and t is not None:
            return max(t[0], rest)
        return None


@dataclass(frozen=True, eq=False)
class Adjoint(Operator):
    child: Operator

    @property
    def children(self):
        return (self.child,)

    @property
    def domain(self):
        return self.child.codomain

    @property
    def codomain(self):
        return self.child.domain

    def _matvec(self, x):
        return self.child._rmatvec(x)

    def _rmatvec(self, y):
        return self.child._matvec(y)

    def norm_bound(self):
        return self.child.norm_bound()

    def tail_scalar(self):
        t = self.child.tail_scalar()
        return None if t is None else (t[0], np.conj(t[1]))

    def domain_support(self):
        return self.child.range_support()

    def range_support(self):
        return self.child.domain_support()


@dataclass(frozen=True, eq=False)
class Restrict(Operator):
    """T ∘ V_M: the restriction of ``child`` to ``subspace`` in M coordinates."""

    child: Operator
    subspace: SubspaceSpec

    def __post_init__(self):
        if self.child.domain is not None:
            raise InvariantViolation("can only restrict operators defined on l2")

    @property
    def children(self):
        return (self.child,)

    @property
    def domain(self):
        return self.subspace

    @property
    def codomain(self):
        return self.child.codomain

    def _matvec(self, x):
        return self.child._matvec(self.subspace.embed(x))

    def _rmatvec(self, y):
        return self.subspace.coembed(self.child._rmatvec(y))

    def norm_bound(self):
        return self.child.norm_bound()

    def domain_support(self):
        if isinstance(self.subspace, SpanFinite):
            return self.subspace.dim
        return None

    def range_support(self):
        return self.child.range_support()


@dataclass(frozen=True, eq=False)
class PositiveRoot(Operator):
    """P_T, the positive square root of T*T, resolved numerically on a finite block."""

    child: Operator

    @property
    def children(self):
        return (self.child,)

    @property
    def domain(self):
        return self.child.domain

    @property
    def codomain(self):
        return self.child.domain

    def _block(self):
        ds = self.child.domain_support()
        if ds is not None:
            return ds, 0.0
        t = self.child.tail_scalar()
        if t is not None:
            return t[0], abs(t[1])
        return None

    def _matvec(self, x):
        block = self._block()
        if block is None:
            raise UnboundedSupport("positive root of an operator without finite block structure")
        n, mu = block
        root = sqrt_psd(gram_matrix(self.child, n)) if n else np.zeros((0, 0), dtype=complex)
        x = pad_rows(x, n)
        head = root @ x[:n]
        if mu == 0.0:
            return head
        return np.vstack([head, mu * x[n:]])

    _rmatvec = _matvec

    def norm_bound(self):
        return self.child.norm_bound()

    def tail_scalar(self):
        t = self.child.tail_scalar()
        return None if t is None else (t[0], complex(abs(t[1])))

    def domain_support(self):
        return self.child.domain_support()

    range_support = domain_support


# ---------------------------------------------------------------------------
# vectors


def basis(j, n=None):
    """Canonical unit vector e_j (1-based), length ``max(j, n)``."""
    e = np.zeros(max(j, n or 0), dtype=complex)
    e[j - 1] = 1.0
    return e


def as_vector(x):
    x = np.asarray(x, dtype=complex)
    if x.ndim != 1:
        raise ValueError(f"vectors must be 1-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector has non-finite entries")
    return x


def coords(x, d):
    """First ``d`` coordinates of ``x`` (zero-extended)."""
    x = as_vector(x)
    out = np.zeros(d, dtype=complex)
    n = min(d, x.size)
    out[:n] = x[:n]
    return out


def inner(x, y):
    """<x, y>, linear in the first slot."""
    n = max(len(x), len(y))
    return complex(np.vdot(coords(y, n), coords(x, n)))


# ---------------------------------------------------------------------------
# operations


def apply(T, x):
    """T x for a finitely supported vector x."""
    x = as_vector(x)
    return T._matvec(x[:, None])[:, 0]


def apply_many(T, x):
    """T applied to each column of a 2-D array."""
    return T._matvec(np.asarray(x, dtype=complex))


def norm_bound(T):
    """Sound upper bound on ||T|| by the triangle inequality over the tree."""
    return T.norm_bound()


def adjoint(T):
    """T* with structural simplification where the adjoint has a closed form."""
    if isinstance(T, Adjoint):
        return T.child
    if isinstance(T, (Identity, Projection)):
        return T
    if isinstance(T, Diagonal):
        return Diagonal(T.sequence.conj())
    if isinstance(T, Dense):
        return Dense(T.matrix.conj().T, T.tail)
    if isinstance(T, FiniteRank):
        return FiniteRank(tuple((s, v, u) for s, u, v in T.terms))
    if isinstance(T, Scale):
        return Scale(np.conj(T.alpha), adjoint(T.child))
    if isinstance(T, Sum):
        return Sum(tuple(adjoint(c) for c in T.children))
    if isinstance(T, Compose):
        return Compose(tuple(adjoint(c) for c in reversed(T.children)))
    if isinstance(T, PositiveRoot):
        return T
    return Adjoint(T)


def gram(T):
    """T*T as an expression."""
    return Compose((adjoint(T), T))


def column_block(T, d):
    """Matrix whose j-th column is T e_j (j = 1..d), with every nonzero row kept."""
    return T._matvec(np.eye(d, dtype=complex))


def gram_matrix(T, d):
    """Exact <T e_j, T e_i> for i, j <= d."""
    b = column_block(T, d)
    g = b.conj().T @ b
    return 0.5 * (g + g.conj().T)


def truncate(T, d):
    """d x d compression of T.

    Entry (i, j) is <T e_j, e_i> when T maps a space to itself. When the
    domain is a subspace and the codomain l2 (a restriction), the columns
    T V_M e_j live in a different space; the result is then the triangular
    factor R of T V_M e_1..d = Q R, which keeps ||R c|| = ||T V_M c||.
    """
    if d < 1:
        raise ValueError("truncation dimension must be >= 1")
    if isinstance(T, PositiveRoot):
        return sqrt_psd(gram_matrix(T.child, d))
    cols = column_block(T, d)
    if T.domain == T.codomain:
        return pad_rows(cols, d)[:d].copy()
    r = np.linalg.qr(cols, mode="r")
    r = pad_rows(r, d)[:d]
    diag = np.diag(r)
    phase = np.where(np.abs(diag) > 0, np.conj(diag) / np.where(np.abs(diag) > 0, np.abs(diag), 1.0), 1.0)
    return phase[:, None] * r


def sqrt_psd(a, tol=MATRIX_ATOL):
    """Positive square root of a Hermitian positive semidefinite matrix."""
    res = hermitian_eig(a)
    w, v = res
    scale = max(1.0, float(np.max(np.abs(w)))) if w.size else 1.0
    if w.size and w[-1] < -tol * scale:
        raise NotPositive(f"matrix has eigenvalue {w[-1]:.3g} < 0")
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return 0.5 * (root + root.conj().T)


def is_isometry(T):
    """Structural check: T*T = I."""
    if isinstance(T, (Identity, Shift)):
        return True
    if isinstance(T, Diagonal):
        seq = T.sequence
        if isinstance(seq, UnitModulus):
            return True
        lo, hi = seq.seq.bounds()
        return isinstance(seq.seq, (ExplicitThenZero, ExplicitThenConstant)) and all(
            abs(v) == 1.0 for v in list(seq.seq.values) + [seq.seq.limit_value]
        )
    if isinstance(T, Dense):
        a = T.matrix
        return T.tail == "identity" and np.allclose(a.conj().T @ a, np.eye(T.d), atol=MATRIX_ATOL)
    if isinstance(T, Scale):
        return abs(abs(T.alpha) - 1.0) <= 1e-15 and is_isometry(T.child)
    if isinstance(T, Compose):
        return all(is_isometry(c) for c in T.children)
    return False


def positive_sqrt(T):
    """P_T, the positive square root of T*T, structured where possible."""
    if isinstance(T, Projection):
        return T
    if is_isometry(T):
        return Identity()
    if isinstance(T, Diagonal):
        seq = T.sequence
        if isinstance(seq, UnitModulus):
            return Identity()
        inner_seq = seq.seq
        if inner_seq.is_nonnegative():
            return Diagonal(inner_seq)
        if inner_seq.is_nonpositive():
            return Diagonal(inner_seq.scaled(-1.0))
        if isinstance(inner_seq, ExplicitThenZero):
            return Diagonal(ExplicitThenZero(tuple(abs(v) for v in inner_seq.values)))
        if isinstance(inner_seq, ExplicitThenConstant):
            return Diagonal(
                ExplicitThenConstant(tuple(abs(v) for v in inner_seq.values), abs(inner_seq.tail))
            )
        return PositiveRoot(T)
    if isinstance(T, Adjoint) and isinstance(T.child, Shift):
        return Projection(CanonicalTail(T.child.offset))
    if isinstance(T, Scale):
        inner_root = positive_sqrt(T.child)
        return inner_root if abs(T.alpha) == 1.0 else Scale(abs(T.alpha), inner_root)
    if isinstance(T, Compose) and len(T.children) > 1 and is_isometry(T.children[0]):
        rest = T.children[1:]
        return positive_sqrt(rest[0] if len(rest) == 1 else Compose(rest))
    if T.domain is None and T.codomain is None:
        ds = T.domain_support()
        if ds is not None and ds > 0:
            return Dense(sqrt_psd(gram_matrix(T, ds)), "zero")
        t = T.tail_scalar()
        if t is not None and t[0] > 0:
            n, mu = t
            root = sqrt_psd(gram_matrix(T, n))
            if abs(mu) == 0.0:
                return Dense(root, "zero")
            if abs(mu) == 1.0:
                return Dense(root, "identity")
            return Scale(abs(mu), Dense(root / abs(mu), "identity"))
        if t is not None:
            return Scale(abs(t[1]), Identity())
    return PositiveRoot(T)


def polar(a, tol=MATRIX_ATOL):
    """Polar decomposition a = U P with P = sqrt(a* a) and U unitary.

    For singular ``a`` the unitary factor maps the kernel of P onto the
    orthogonal complement of range(a), pairing the canonical (basis-index
    ordered) bases of the two spaces.
    """
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"polar needs a square matrix, got {a.shape}")
    # SVD keeps small singular values to full precision; sqrt of the Gram
    # spectrum would lose half the digits on rank-deficient input
    w_left, sig, vh = np.linalg.svd(a)
    v = vh.conj().T
    p = (v * sig) @ vh
    p = 0.5 * (p + p.conj().T)
    smax = sig[0] if sig.size else 0.0
    r = int(np.sum(sig > tol * max(smax, 1.0)))
    left = w_left[:, :r]
    if r < n:
        comp = np.eye(n, dtype=complex) - left @ left.conj().T
        left_rest = canonical_basis(comp, atol=1e-6)[:, : n - r]
        right_rest = canonical_basis(v[:, r:])
        u = left @ v[:, :r].conj().T + left_rest @ right_rest.conj().T
    else:
        u = left @ v.conj().T
    return u, p
