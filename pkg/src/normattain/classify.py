"""Absolutely norm-attaining (AN) classification.

T is AN when every restriction T|_M to a nonzero closed subspace attains
its norm. There is no general decision procedure, so ``classify_an``
matches the expression tree against a fixed set of sufficient rules and
sound refutations and answers Unknown everywhere else.

Rules (tags used in verdicts):

- ``compact``: compact operators, e.g. finite blocks and diagonals tending to 0.
- ``projection-finite-rank`` / ``projection-finite-corank``: a projection is
  AN exactly when its rank or co-rank is finite; otherwise it is refuted by
  a block pattern M with M ∩ X = {0}.
- ``identity-plus-finite-rank``: c(I + R) with R of finite rank.
- ``isometry`` and ``isometric-composition``: composing an AN operator with
  an isometry on either side keeps AN.
- ``unitary-equivalence``: U* T U is AN iff T is.
- ``coisometry-finite-kernel``: a co-isometry is AN iff its kernel is finite.
- ``partial-isometry``: AN iff the initial domain or its complement is finite.
- ``isometry-plus-finite-rank``, ``coisometry-plus-finite-rank``,
  ``projection-plus-finite-rank``, ``partial-isometry-plus-finite-rank``.
- ``positive-compact-plus-identity`` and ``compact-identity-finite-rank``:
  I + K and I + K + R with K positive compact.
- ``decreasing-diagonal-rewrite``: lambda_j decreasing to lambda > 0 gives
  T = lambda (K/lambda + I - R).
- ``projection-algebra``: sums, differences and products of AN projections.
- ``positive-root``: T is AN iff P_T is.
- ``not-norm-attaining``: T itself fails to attain its norm, so the
  restriction to the whole space refutes AN.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .eig import canonical_basis, hermitian_eig
from .errors import InvariantViolation, NotLOTDShape, RankMismatch
from .operators import (
    Adjoint,
    Compose,
    Dense,
    Diagonal,
    Identity,
    PositiveRoot,
    Projection,
    Restrict,
    Scale,
    Shift,
    Sum,
    apply,
    apply_many,
    is_isometry,
    truncate,
)
from .sequences import RealSeq, UnitModulus
from .spectral import NotAttained, _structured, operator_norm
from .subspaces import BlockRepetition, CanonicalTail, SpanFinite, complementary_pattern

AN = "AN"
NOT_AN = "NotAN"
UNKNOWN = "Unknown"


@dataclass(frozen=True, eq=False)
class Evidence:
    """Refutation of AN: a subspace whose restriction does not attain its norm.

    ``family`` (when present) maps n to unit vectors of the subspace whose
    images approach the restriction norm without reaching it.
    """

    subspace: object
    gap: float | None
    certificate: str
    family: object = None


@dataclass(frozen=True, eq=False)
class ANVerdict:
    verdict: str
    rule: str
    evidence: Evidence | None = None
    derivation: tuple = field(default=())


def _an(rule, *steps):
    return ANVerdict(AN, rule, None, tuple(steps) + (rule,))


def _unknown(reason):
    return ANVerdict(UNKNOWN, "no-rule", None, (reason,))


# ---------------------------------------------------------------------------
# structural facts


def _finite_rank(T):
    if T.domain is not None or T.codomain is not None:
        return T.domain_support() is not None
    if T.domain_support() is not None:
        return True
    t = T.tail_scalar()
    return t is not None and t[1] == 0


def _compact_diagonal(T):
    if not isinstance(T, Diagonal) or not isinstance(T.sequence, RealSeq):
        return False
    return T.sequence.seq.limit_value == 0.0


def _compact(T):
    """Structural compactness: finite rank, null diagonals, and ideals built from them."""
    if _finite_rank(T) or _compact_diagonal(T):
        return True
    if isinstance(T, Scale):
        return T.alpha == 0 or _compact(T.child)
    if isinstance(T, (Adjoint, PositiveRoot, Restrict)):
        return _compact(T.child)
    if isinstance(T, Sum):
        return all(_compact(c) for c in T.children)
    if isinstance(T, Compose):
        return any(_compact(c) for c in T.children)
    return False


def _positive_compact(T):
    if isinstance(T, Diagonal):
        return _compact_diagonal(T) and T.sequence.seq.is_nonnegative()
    if isinstance(T, Scale):
        return T.alpha.imag == 0.0 and T.alpha.real >= 0.0 and _positive_compact(T.child)
    if isinstance(T, Dense):
        a = T.matrix
        if T.tail != "zero" or np.max(np.abs(a - a.conj().T)) > 1e-10:
            return False
        return hermitian_eig(0.5 * (a + a.conj().T)).eigenvalues[-1] >= -1e-10
    if isinstance(T, Projection):
        return isinstance(T.subspace, SpanFinite)
    return False


def isometry_corank(V):
    """dim range(V)-perp for a structural isometry V, else None."""
    if isinstance(V, Shift):
        return V.offset
    if isinstance(V, Scale):
        return isometry_corank(V.child)
    if isinstance(V, Compose):
        parts = [isometry_corank(c) for c in V.children]
        return None if any(p is None for p in parts) else sum(parts)
    if is_isometry(V):
        return 0
    return None


def partial_isometry_domain(W):
    """(dim, codim) of the initial domain of a structural partial isometry, else None."""
    if isinstance(W, Projection):
        return W.subspace.dim, W.subspace.codim
    if is_isometry(W):
        return math.inf, 0
    if isinstance(W, Adjoint):
        k = isometry_corank(W.child)
        return None if k is None else (math.inf, k)
    if isinstance(W, Scale) and abs(abs(W.alpha) - 1.0) <= 1e-15:
        return partial_isometry_domain(W.child)
    if isinstance(W, Compose) and len(W.children) > 1 and is_isometry(W.children[0]):
        rest = W.children[1:]
        return partial_isometry_domain(rest[0] if len(rest) == 1 else Compose(rest))
    return None


def _an_projection(T):
    if isinstance(T, Scale) and T.alpha in (1.0, -1.0):
        T = T.child
    return isinstance(T, Projection) and (T.subspace.dim < math.inf or T.subspace.codim < math.inf)


# ---------------------------------------------------------------------------
# the rule engine


def _projection(T):
    s = T.subspace
    if s.dim < math.inf:
        return _an("projection-finite-rank")
    if s.codim < math.inf:
        return _an("projection-finite-corank")
    if isinstance(s, BlockRepetition):
        m = complementary_pattern(s)
        ev = Evidence(m, 0.0, "projection-trivial-intersection", lambda n, m=m: uniform_on_blocks(m, n))
        return ANVerdict(
            NOT_AN,
            "projection-infinite-rank-corank",
            ev,
            ("projection-infinite-rank-corank", "restriction-not-attained"),
        )
    return _unknown("projection with undecided rank")


def uniform_on_blocks(m, n):
    """M-coordinates of the unit vector constant on the first n blocks of m."""
    sizes = m.sizes(n).astype(float)
    return np.sqrt(sizes / sizes.sum()).astype(complex)


def _diagonal(T):
    seq = T.sequence
    if isinstance(seq, UnitModulus):
        return _an("isometry", "unimodular-diagonal")
    inner = seq.seq
    lo, hi = inner.bounds()
    if hi <= 0.0:
        inner = inner.scaled(-1.0)
        steps = ("positive-root",)
    elif lo >= 0.0:
        steps = ()
    else:
        return _unknown("diagonal with coefficients of both signs")
    if inner.limit_value == 0.0:
        return _an("compact", *steps)
    if getattr(inner, "coeff", None) == 0.0:
        return _an("identity-plus-finite-rank", *steps)
    if getattr(inner, "decreasing", False):
        from .deflation import rewrite_lotd

        try:
            rewrite_lotd(Diagonal(inner))
        except NotLOTDShape as exc:
            return _unknown(str(exc))
        chain = steps + ("decreasing-diagonal-rewrite", "compact-identity-finite-rank")
        return ANVerdict(AN, "decreasing-diagonal-rewrite", None, chain)
    return _unknown("diagonal outside the decidable families")


def _terms(T, alpha=1.0 + 0j):
    """Flatten nested sums, pushing scalars down to the terms."""
    if isinstance(T, Sum):
        out = []
        for c in T.children:
            out.extend(_terms(c, alpha))
        return out
    if isinstance(T, Scale) and isinstance(T.child, (Sum, Scale)):
        return _terms(T.child, alpha * T.alpha)
    return [T if alpha == 1.0 else Scale(alpha, T)]


def _sum_parts(T):
    """Split a sum into (scalar c, positive compact parts, finite-rank parts, others)."""
    c = 0j
    pos, fin, other = [], [], []
    for child in _terms(T):
        if _finite_rank(child):
            fin.append(child)
            continue
        if child.domain is None and child.codomain is None:
            t = child.tail_scalar()
            if t is not None:
                c += t[1]
                if t[0] > 0:
                    fin.append(child)
                continue
        if _positive_compact(child):
            pos.append(child)
            continue
        if isinstance(child, Diagonal) and isinstance(child.sequence, RealSeq):
            s = child.sequence.seq
            lam = s.limit_value
            shifted = s.plus(-lam)
            if shifted.is_nonnegative():
                c += lam
                pos.append(Diagonal(shifted))
                continue
        other.append(child)
    return c, pos, fin, other


def _sum(T, d):
    kids = _terms(T)
    if all(_an_projection(k) for k in kids):
        return _an("projection-algebra")
    c, pos, fin, other = _sum_parts(T)
    if len(other) == 1 and not pos:
        w = other[0]
        dom = partial_isometry_domain(w)
        if dom is not None and (dom[0] < math.inf or dom[1] < math.inf):
            if is_isometry(w):
                rule = "isometry-plus-finite-rank"
            elif isinstance(w, Adjoint):
                rule = "coisometry-plus-finite-rank"
            elif isinstance(w, Projection):
                rule = "projection-plus-finite-rank"
            else:
                rule = "partial-isometry-plus-finite-rank"
            if c != 0:
                return _unknown("partial isometry plus a nonzero multiple of the identity")
            return _an(rule)
        return _unknown("sum with a term outside the rule set")
    if other:
        return _unknown("sum with terms outside the rule set")
    if c == 0:
        return _an("compact")
    if not pos:
        return _an("identity-plus-finite-rank")
    if c.imag == 0.0 and c.real > 0.0:
        if fin:
            return _an("compact-identity-finite-rank")
        return _an("positive-compact-plus-identity")
    return _unknown("identity multiple is not a positive real")


def _compose(T, d):
    kids = []
    for k in T.children:
        kids.extend(k.children if isinstance(k, Compose) else (k,))
    steps = []
    alpha = 1.0 + 0j
    plain = []
    for k in kids:
        if isinstance(k, Scale):
            alpha *= k.alpha
            k = k.child
        plain.append(k)
    if alpha == 0:
        return _an("compact")
    if any(_compact(k) for k in plain):
        return _an("compact")
    if all(_an_projection(k) for k in plain):
        return _an("projection-algebra")
    transfers = True
    if len(plain) >= 3 and _adjoint_pair(plain[0], plain[-1]):
        steps.append("unitary-equivalence")
        plain = plain[1:-1]
        transfers = False
    while len(plain) > 1 and is_isometry(plain[0]):
        plain = plain[1:]
        steps.append("isometric-composition")
    while len(plain) > 1 and is_isometry(plain[-1]):
        plain = plain[:-1]
        steps.append("isometric-composition")
        transfers = False
    core = plain[0] if len(plain) == 1 else Compose(tuple(plain))
    if len(plain) > 1 and (core.domain is not None or core.tail_scalar() is None):
        return _unknown("composition outside the rule set")
    inner = _classify(core, d)
    if not steps:
        return inner
    if inner.verdict == AN:
        return ANVerdict(AN, steps[-1], None, inner.derivation + tuple(steps))
    if inner.verdict == NOT_AN and transfers:
        # a left isometry leaves every restriction norm unchanged
        return ANVerdict(NOT_AN, inner.rule, inner.evidence, inner.derivation + tuple(steps))
    return _unknown("refutation does not transfer through the composition")


def _adjoint_pair(u, w):
    """u = w* with w unitary (structurally)."""
    if not (_unitary(u) and _unitary(w)):
        return False
    if isinstance(u, Dense) and isinstance(w, Dense):
        return u.d == w.d and np.allclose(u.matrix, w.matrix.conj().T, atol=1e-12)
    if isinstance(u, Diagonal) and isinstance(w, Diagonal):
        return u.sequence == w.sequence.conj()
    return False


def _unitary(U):
    if isinstance(U, Scale):
        return abs(abs(U.alpha) - 1.0) <= 1e-15 and _unitary(U.child)
    if isinstance(U, Identity):
        return True
    if isinstance(U, Diagonal):
        return isinstance(U.sequence, UnitModulus) or (is_isometry(U))
    if isinstance(U, Dense):
        return is_isometry(U)
    return False


def _classify(T, d):
    rep = _structured(T)
    if rep is not None and isinstance(rep.attained, NotAttained):
        # the restriction to the whole domain already fails
        whole = T.subspace if isinstance(T, Restrict) else CanonicalTail(0)
        ev = Evidence(whole, 0.0, rep.attained.rule)
        return ANVerdict(NOT_AN, "not-norm-attaining", ev, (rep.attained.rule, "not-norm-attaining"))
    if isinstance(T, Projection):
        return _projection(T)
    if isinstance(T, Identity):
        return _an("isometry")
    if _finite_rank(T):
        return _an("compact")
    if T.domain is None and T.codomain is None:
        t = T.tail_scalar()
        if t is not None:
            if isinstance(T, Sum) and all(_an_projection(k) for k in T.children):
                return _an("projection-algebra")
            return _an("identity-plus-finite-rank")
    if isinstance(T, Diagonal):
        return _diagonal(T)
    if is_isometry(T):
        return _an("isometry")
    if isinstance(T, Scale):
        if T.alpha == 0:
            return _an("compact")
        inner = _classify(T.child, d)
        return ANVerdict(inner.verdict, inner.rule, inner.evidence, inner.derivation)
    if isinstance(T, Adjoint):
        k = isometry_corank(T.child)
        if k is not None:
            if k < math.inf:
                return _an("coisometry-finite-kernel")
            return _unknown("co-isometry with infinite kernel")
        if _compact(T.child):
            return _an("compact")
        return _unknown("adjoint outside the rule set")
    if not isinstance(T, Compose) or not any(_compact(k) for k in T.children):
        dom = partial_isometry_domain(T)
        if dom is not None and (dom[0] < math.inf or dom[1] < math.inf):
            return _an("partial-isometry")
    if isinstance(T, Compose):
        return _compose(T, d)
    if isinstance(T, Sum):
        return _sum(T, d)
    if isinstance(T, PositiveRoot):
        inner = _classify(T.child, d)
        return ANVerdict(inner.verdict, inner.rule, inner.evidence, inner.derivation + ("positive-root",))
    if isinstance(T, Restrict):
        inner = _classify(T.child, d)
        if inner.verdict == AN:
            return ANVerdict(AN, "restriction-of-AN", None, inner.derivation + ("restriction-of-AN",))
        return _unknown("restriction of an operator not known to be AN")
    if _compact(T):
        return _an("compact")
    return _unknown(f"no rule for {type(T).__name__}")


def classify_an(T, d=64):
    """Rule-based AN verdict with the chain of rules that produced it."""
    return _classify(T, d)


# ---------------------------------------------------------------------------
# stochastic falsifier


class FalsifierResult(NamedTuple):
    worst_gap: float
    worst_subspace: object


def _orthonormalize(g):
    """Modified Gram-Schmidt on the columns of ``g``."""
    q = g.astype(complex).copy()
    for k in range(q.shape[1]):
        q[:, k] /= np.linalg.norm(q[:, k])
        rest = q[:, k + 1 :]
        rest -= np.outer(q[:, k], q[:, k].conj() @ rest)
    return q


def sample_subspace_restrictions(T, d=64, trials=200, seed=0):
    """Largest gap ||T|_M|| - ||T x|| over random subspaces M of dimension 1..d/2.

    Each trial draws complex Gaussian vectors in the first ``d`` coordinates
    with its own generator (seed + trial index), compresses T to their span
    and checks that the top right singular vector attains the compressed
    norm under the full operator.
    """
    if trials < 1:
        raise InvariantViolation("need at least one trial")
    worst_gap, worst = -math.inf, None
    top = max(1, d // 2)
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        k = int(rng.integers(1, top + 1))
        g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
        q = _orthonormalize(g)
        images = apply_many(T, q)
        # LAPACK here keeps the falsifier independent of the Jacobi solver
        _, sv, vh = np.linalg.svd(images, full_matrices=False)
        sigma = float(sv[0])
        x = q @ vh[0].conj()
        gap = max(sigma - float(np.linalg.norm(apply(T, x))), 0.0)
        if gap > worst_gap:
            worst_gap, worst = gap, q
    return FalsifierResult(float(worst_gap), SpanFinite(tuple(worst.T)))


# ---------------------------------------------------------------------------
# the block-pattern counterexample


@dataclass(frozen=True, eq=False)
class BlockCounterexample:
    """Projection P onto X, a subspace M with M ∩ X = {0}, and unit s(n) in M.

    ``s(n)`` is constant on the first n blocks of M and zero afterwards;
    ``||P s(n)||`` increases to ``||P|_M|| = 1`` without reaching it.
    """

    P: object
    M: object

    def coords(self, n):
        """s(n) in M coordinates."""
        return uniform_on_blocks(self.M, n)

    def s(self, n):
        """s(n) in l2 coordinates."""
        return self.M.embed(self.coords(n)[:, None])[:, 0]

    def support(self, n):
        return int(self.M.sizes(n).sum())

    def unit_norm_exact(self, n):
        """<s(n), s(n)> as a Fraction."""
        length = self.support(n)
        return sum(Fraction(1, length) for _ in range(length))

    def image_norm_squared_exact(self, n):
        """||P s(n)||^2 as a Fraction.

        s(n) = a / sqrt(L) with a the 0/1 indicator of 1..L, and P averages
        over the blocks B of X, so ||P s(n)||^2 = sum_B (sum_B a)^2 / (|B| L).
        """
        length = self.support(n)
        x = self.P.subspace
        sizes = x.sizes_covering(length)
        total = Fraction(0)
        start = 0
        for b in sizes.tolist():
            ones = max(0, min(start + b, length) - start)
            total += Fraction(ones * ones, b * length)
            start += b
        return total

    def image_norm_squared(self, n):
        """||P s(n)||^2 by direct floating-point evaluation."""
        return float(np.linalg.norm(apply(self.P, self.s(n))) ** 2)

    def gap(self, n):
        """||P|_M|| - ||P s(n)||."""
        bound = operator_norm(Restrict(self.P, self.M)).value
        return bound - math.sqrt(self.image_norm_squared(n))


def enan_counterexample():
    """X = (x1, x2, x2, x3, x4, x4, ...), M = (y1, y1, y2, y2, y2, y3, y3, y3, ...)."""
    x = BlockRepetition((), (1, 2))
    return BlockCounterexample(Projection(x), complementary_pattern(x))


def enan_gap(n):
    return enan_counterexample().gap(n)


# ---------------------------------------------------------------------------
# unitary equivalence of projections


def _projection_matrix(a, name):
    tol = 1e-9
    if np.max(np.abs(a - a.conj().T), initial=0.0) > tol or np.max(np.abs(a @ a - a), initial=0.0) > tol:
        raise InvariantViolation(f"{name} is not an orthogonal projection at this truncation")
    return 0.5 * (a + a.conj().T)


def unitary_equiv_projections(P, Q, d):
    """Unitary U with Q U = U P at truncation ``d``.

    U sends the canonical basis of range(P) to that of range(Q), and the
    canonical basis of ker(P) to that of ker(Q).
    """
    a = _projection_matrix(truncate(P, d), "P")
    b = _projection_matrix(truncate(Q, d), "Q")
    ra, rb = int(round(np.trace(a).real)), int(round(np.trace(b).real))
    if ra != rb:
        raise RankMismatch(f"rank {ra} differs from rank {rb}")
    eye = np.eye(d, dtype=complex)
    parts_a = [canonical_basis(m) for m in (a, eye - a) if round(np.trace(m).real) > 0]
    parts_b = [canonical_basis(m) for m in (b, eye - b) if round(np.trace(m).real) > 0]
    src = np.hstack(parts_a)
    dst = np.hstack(parts_b)
    return dst @ src.conj().T
