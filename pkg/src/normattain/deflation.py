"""Deflation of positive AN operators.

A positive AN operator attains its norm at an eigenvector, and the
orthogonal complement of that eigenvector is invariant, so peeling off top
eigenpairs one at a time gives

    T = sum_{n <= N} beta_n v_n v_n* + R_N,    ||R_N|| <= beta_N,

at every finite stage N, with R_N supported on the complement of the v_n.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np

from .eig import CLUSTER_RTOL, canonical_basis, hermitian_eig, top_singular
from .errors import NotANError, NotLOTDShape, NotPositive
from .operators import (
    Adjoint,
    Compose,
    Dense,
    Diagonal,
    Identity,
    Projection,
    Shift,
    truncate,
)
from .sequences import ExplicitThenConstant, ExplicitThenZero, Geometric, Harmonic, RealSeq
from .spectral import is_positive, operator_norm, working_dim
from .subspaces import SpanFinite, pad_rows

AITKEN_WINDOW = 5


@dataclass(frozen=True, eq=False)
class Decomposition:
    betas: np.ndarray
    vecs: np.ndarray
    residual: object
    beta_limit: float | None = None
    method: str = "dense-compression"
    notes: tuple = field(default=())

    def __len__(self):
        return self.betas.size

    def residual_norm(self):
        if isinstance(self.residual, np.ndarray):
            return top_singular(self.residual)[0] if self.residual.size else 0.0
        return operator_norm(self.residual).value

    def orthonormality_error(self):
        v = self.vecs
        if v.shape[1] == 0:
            return 0.0
        return float(np.max(np.abs(v.conj().T @ v - np.eye(v.shape[1]))))


@dataclass(frozen=True, eq=False)
class LOTDRewrite:
    """T = lam * (K / lam + I - R) with K positive compact and R a finite-rank projection."""

    lam: float
    K: object
    R: object

    def operator(self):
        return self.lam * (self.K * (1.0 / self.lam) + Identity() - self.R)


def aitken_limit(betas):
    """Aitken delta-squared estimate of lim beta_n from the last five terms."""
    b = np.asarray(betas, dtype=float)[-AITKEN_WINDOW:]
    if b.size < AITKEN_WINDOW:
        return None
    d = np.diff(b)
    if not (np.all(d <= 0) or np.all(d >= 0)):
        return None
    est = None
    for i in range(b.size - 2):
        x0, x1, x2 = b[i], b[i + 1], b[i + 2]
        denom = (x2 - x1) - (x1 - x0)
        est = x2 if denom == 0.0 else x2 - (x2 - x1) ** 2 / denom
    return float(est)


# ---------------------------------------------------------------------------
# rewriting decreasing diagonals


def _zero_operator():
    return Dense([[0.0]], "zero")


def rewrite_lotd(T):
    """Split a diagonal with coefficients decreasing to lam > 0.

    Zero coefficients in an explicit prefix mark basis vectors outside the
    orthonormal set; they form the (finite) kernel, and R is the projection
    onto it. K carries the coefficients lambda_j - lam on the remaining
    indices and 0 on the kernel.
    """
    if not isinstance(T, Diagonal) or not isinstance(T.sequence, RealSeq):
        raise NotLOTDShape("expected a diagonal operator with real coefficients")
    s = T.sequence.seq
    lam = s.limit_value
    if not lam > 0.0:
        raise NotLOTDShape(f"limit {lam} is not positive")
    if isinstance(s, (Harmonic, Geometric)):
        if s.coeff > 0.0:
            raise NotLOTDShape("coefficients increase to their limit")
        return LOTDRewrite(lam, Diagonal(s.plus(-lam)), _zero_operator())
    if isinstance(s, ExplicitThenConstant):
        vals = list(s.values)
        kernel = [j for j, v in enumerate(vals) if v == 0.0]
        rest = [v for v in vals if v != 0.0] + [s.tail]
        if any(a < b for a, b in zip(rest, rest[1:])):
            raise NotLOTDShape("nonzero coefficients are not non-increasing")
        k_vals = tuple(0.0 if v == 0.0 else v - lam for v in vals)
        K = Diagonal(ExplicitThenZero(k_vals))
        if kernel:
            basis = []
            for j in kernel:
                e = np.zeros(j + 1)
                e[j] = 1.0
                basis.append(e)
            R = Projection(SpanFinite(tuple(basis)))
        else:
            R = _zero_operator()
        return LOTDRewrite(lam, K, R)
    raise NotLOTDShape(f"{type(s).__name__} does not decrease to a positive limit")


# ---------------------------------------------------------------------------
# exact path for diagonals


def _diagonal_order(s, n_max):
    """Indices (1-based) of the n_max largest coefficients, ties in index order."""
    if isinstance(s, (ExplicitThenZero, ExplicitThenConstant)):
        vals = list(s.values)
        tail = s.limit_value
        explicit = sorted(range(len(vals)), key=lambda j: (-vals[j], j))
        out = []
        nxt = len(vals) + 1
        i = 0
        while len(out) < n_max:
            if i < len(explicit) and vals[explicit[i]] >= tail:
                out.append(explicit[i] + 1)
                i += 1
            elif tail > 0.0:
                # the tail value has infinite multiplicity
                out.append(nxt)
                nxt += 1
            else:
                break
        return out
    # monotone families: decreasing coefficients are already in order
    return list(range(1, n_max + 1))


def _deflate_diagonal(T, n_max, d):
    s = T.sequence.seq
    if isinstance(s, (Harmonic, Geometric)) and s.coeff > 0.0:
        return None
    order = _diagonal_order(s, n_max)
    betas = np.asarray(s.eval(np.array(order, dtype=int)), dtype=float) if order else np.zeros(0)
    keep = betas > 0.0
    order = [j for j, k in zip(order, keep) if k]
    betas = betas[keep]
    size = max([d] + order)
    vecs = np.zeros((size, len(order)), dtype=complex)
    for col, j in enumerate(order):
        vecs[j - 1, col] = 1.0
    if isinstance(s, (ExplicitThenZero, ExplicitThenConstant)):
        vals = list(s.values)
        top = max(order, default=0)
        vals += [s.limit_value] * max(0, top - len(vals))
        for j in order:
            vals[j - 1] = 0.0
        if s.limit_value == 0.0:
            residual = Diagonal(ExplicitThenZero(tuple(vals)))
        else:
            residual = Diagonal(ExplicitThenConstant(tuple(vals), s.limit_value))
    else:
        n = len(order)
        if n == 0:
            residual = T
        else:
            residual = Compose((Shift(n), Diagonal(s.shifted(n)), Adjoint(Shift(n))))
    return Decomposition(betas, vecs, residual, aitken_limit(betas), "diagonal-exact")


# ---------------------------------------------------------------------------
# dense compression chain


def _deflate_matrix(a, n_max, tol):
    d = a.shape[0]
    q = np.eye(d, dtype=complex)
    betas, vecs = [], []
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    while len(betas) < n_max and q.shape[1] > 0:
        c = q.conj().T @ a @ q
        c = 0.5 * (c + c.conj().T)
        w, v = hermitian_eig(c)
        if w[-1] < -tol * scale:
            raise NotPositive(f"compression has eigenvalue {w[-1]:.3g} < 0")
        top = w[0]
        m = 1
        while m < w.size and top - w[m] <= CLUSTER_RTOL * max(1.0, abs(top)):
            m += 1
        m = min(m, n_max - len(betas))
        # a degenerate cluster is extracted at once, in basis-index order
        block = q @ v[:, :m]
        if m > 1:
            block = canonical_basis(block)
        for k in range(m):
            betas.append(max(float(w[k]), 0.0))
            vecs.append(block[:, k])
        q = q @ v[:, m:]
        if top <= tol * scale:
            break
    if q.shape[1]:
        c = q.conj().T @ a @ q
        residual = q @ (0.5 * (c + c.conj().T)) @ q.conj().T
    else:
        residual = np.zeros_like(a)
    vec_arr = np.column_stack(vecs) if vecs else np.zeros((d, 0), dtype=complex)
    return np.asarray(betas), vec_arr, residual


def deflate(T, n_max=None, d=256, tol=1e-10):
    """Peel off up to ``n_max`` top eigenpairs of a positive operator.

    Diagonal operators use the exact sorted-coefficient path; everything
    else is deflated on the dense truncation, recompressing to the
    orthogonal complement of the extracted vectors at every step.
    """
    from .classify import NOT_AN, UNKNOWN, classify_an

    verdict = classify_an(T)
    if verdict.verdict == NOT_AN:
        raise NotANError(f"operator is not AN ({verdict.rule})")
    notes = ()
    if verdict.verdict == UNKNOWN:
        warnings.warn("AN property of the operator is undecided; deflation is still exact per stage", stacklevel=2)
        notes = ("an-unknown",)
    if not is_positive(T, min(d, 64), tol):
        raise NotPositive("operator is not positive")
    if isinstance(T, Diagonal) and isinstance(T.sequence, RealSeq):
        dec = _deflate_diagonal(T, d if n_max is None else n_max, d)
        if dec is not None:
            return Decomposition(dec.betas, dec.vecs, dec.residual, dec.beta_limit, dec.method, notes)
    n = working_dim(T, d)
    a = truncate(T, n)
    if np.max(np.abs(a - a.conj().T), initial=0.0) > 1e-10 * max(1.0, float(np.max(np.abs(a), initial=0.0))):
        raise NotPositive("truncation is not Hermitian")
    betas, vecs, residual = _deflate_matrix(0.5 * (a + a.conj().T), n if n_max is None else n_max, tol)
    return Decomposition(betas, vecs, residual, aitken_limit(betas), "dense-compression", notes)


def reconstruct(D, d):
    """sum beta_n v_n v_n* + residual, as a d x d matrix."""
    v = pad_rows(D.vecs, d)[:d]
    out = (v * D.betas) @ v.conj().T
    if isinstance(D.residual, np.ndarray):
        r = D.residual
        m = min(d, r.shape[0])
        out[:m, :m] += r[:m, :m]
    else:
        out += truncate(D.residual, d)
    return out
