"""Operator norms: exact structured paths first, a truncation ladder otherwise.

Structured paths decide ``||T||`` and whether it is attained from the
expression tree alone (closed-form sequences, finite blocks, isometries,
block-pattern restrictions). Everything else gets lower bounds from the
top singular value of growing truncations and an upper bound from the
triangle inequality over the tree.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .eig import EigResult, hermitian_eig, top_singular
from .operators import (
    Adjoint,
    Compose,
    Dense,
    Diagonal,
    Identity,
    Projection,
    Restrict,
    Scale,
    Shift,
    Sum,
    apply,
    apply_many,
    column_block,
    is_isometry,
    truncate,
)
from .sequences import RealSeq, UnitModulus
from .subspaces import BlockRepetition, CanonicalTail, common_block_ends, pad_rows

__all__ = [
    "EigResult",
    "hermitian_eig",
    "Attained",
    "NotAttained",
    "Unknown",
    "NormReport",
    "operator_norm",
    "norm_upper",
    "diagonal_form",
    "LADDER",
]

LADDER = (16, 64, 256, 1024)
RESIDUAL_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class Attained:
    witness: np.ndarray

    tag = "Attained"


@dataclass(frozen=True)
class NotAttained:
    rule: str

    tag = "NotAttained"


@dataclass(frozen=True)
class Unknown:
    tag = "Unknown"


@dataclass(frozen=True, eq=False)
class NormReport:
    lower: float
    upper: float
    exact: float | None
    attained: object
    method: str
    lower_bounds: tuple = field(default=())

    @property
    def value(self):
        """``exact`` when known, else the lower bound."""
        return self.lower if self.exact is None else self.exact


def _exact(value, status, method):
    value = float(value)
    return NormReport(value, value, value, status, method)


def _unit(v):
    v = np.asarray(v, dtype=complex)
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


def norm_upper(T):
    """Structural upper bound on ||T||."""
    return float(T.norm_bound())


# ---------------------------------------------------------------------------
# rewriting


def _flatten(children):
    out = []
    for c in children:
        if isinstance(c, Compose):
            out.extend(_flatten(c.children))
        else:
            out.append(c)
    return out


def _normalize(T):
    """(factor, core) with T = factor * L ∘ core for an isometry L.

    ||T|| = |factor| ||core||, and T attains at x iff core attains at x.
    """
    factor = 1.0 + 0j
    while True:
        if isinstance(T, Scale):
            factor *= T.alpha
            T = T.child
            continue
        if isinstance(T, Restrict) and isinstance(T.subspace, CanonicalTail) and T.child.domain is None:
            k = T.subspace.k
            T = T.child if k == 0 else Compose((T.child, Shift(k)))
            continue
        if isinstance(T, Compose):
            kids = _flatten(T.children)
            changed = len(kids) != len(T.children)
            # D ∘ S_k = S_k ∘ D' with D' the shifted coefficient sequence
            for i in range(len(kids) - 1):
                if isinstance(kids[i], Diagonal) and isinstance(kids[i + 1], Shift):
                    s = kids[i + 1]
                    kids[i : i + 2] = [s, Diagonal(kids[i].sequence.shifted(s.offset))]
                    changed = True
                    break
            scales = [k for k in kids if isinstance(k, Scale)]
            if scales:
                for k in scales:
                    factor *= k.alpha
                kids = [k.child if isinstance(k, Scale) else k for k in kids]
                changed = True
            while len(kids) > 1 and is_isometry(kids[0]):
                kids = kids[1:]
                changed = True
            if len(kids) == 1:
                T = kids[0]
                continue
            if changed:
                T = Compose(tuple(kids))
                continue
        return factor, T


def diagonal_form(T):
    """(alpha, seq) with T = alpha*I + Diagonal(seq), seq possibly None; else None."""
    if isinstance(T, Identity):
        return 1.0 + 0j, None
    if isinstance(T, Diagonal):
        return 0j, T.sequence
    if isinstance(T, Scale):
        inner = diagonal_form(T.child)
        if inner is None:
            return None
        alpha, seq = inner
        a = T.alpha
        if seq is None:
            return a * alpha, None
        if a.imag == 0.0 and isinstance(seq, RealSeq):
            return a * alpha, RealSeq(seq.seq.scaled(a.real))
        if a == -1.0 and isinstance(seq, UnitModulus):
            return -alpha, UnitModulus(seq.real_part.scaled(-1.0), not seq.conjugate)
        if a == 1.0:
            return alpha, seq
        return None
    if isinstance(T, Sum):
        alpha = 0j
        seq = None
        for c in T.children:
            part = diagonal_form(c)
            if part is None:
                return None
            alpha += part[0]
            if part[1] is not None:
                if seq is None:
                    seq = part[1]
                elif isinstance(seq, RealSeq) and isinstance(part[1], RealSeq):
                    merged = _merge_real(seq.seq, part[1].seq)
                    if merged is None:
                        return None
                    seq = RealSeq(merged)
                else:
                    return None
        return alpha, seq
    return None


def _merge_real(a, b):
    from .sequences import ExplicitThenConstant, ExplicitThenZero

    explicit = (ExplicitThenZero, ExplicitThenConstant)
    if isinstance(a, explicit) and isinstance(b, explicit):
        n = max(len(a.values), len(b.values))
        idx = np.arange(1, n + 2)
        vals = a.eval(idx) + b.eval(idx)
        return ExplicitThenConstant(tuple(vals[:n]), vals[n])
    return None


# ---------------------------------------------------------------------------
# structured paths


def _block_restriction(core):
    """Projection onto a block pattern X restricted to a block pattern M."""
    if not (
        isinstance(core, Restrict)
        and isinstance(core.subspace, BlockRepetition)
        and isinstance(core.child, Projection)
        and isinstance(core.child.subspace, BlockRepetition)
    ):
        return None
    x, m = core.child.subspace, core.subspace
    common = common_block_ends(x, m)
    if not common:
        # M ∩ X = {0}, yet uniform vectors over the first n blocks of M
        # come arbitrarily close to X, so the norm is 1 and never reached
        return _exact(1.0, NotAttained("projection-trivial-intersection"), "block-pattern")
    # the indicator of 1..c lies in M ∩ X and is fixed by the projection
    c = common[0]
    sizes = m.sizes_covering(c)
    w = np.sqrt(sizes.astype(float)) / math.sqrt(c)
    return _exact(1.0, Attained(w.astype(complex)), "block-pattern")


def _diagonal_path(core):
    form = diagonal_form(core)
    if form is None:
        return None
    alpha, seq = form
    if seq is None:
        return _exact(abs(alpha), Attained(np.array([1.0 + 0j])), "scalar-identity")
    sup = seq.sup_shifted_modulus(alpha)
    if sup is None:
        return None
    if sup.attained:
        w = np.zeros(sup.witness_index, dtype=complex)
        w[-1] = 1.0
        status = Attained(w)
    else:
        rule = "strictly-monotone-diagonal" if alpha == 0 else "strict-quadratic-gap"
        status = NotAttained(rule)
    return _exact(sup.value, status, "diagonal-closed-form")


def _block_path(core):
    if core.domain is None and core.codomain is None:
        t = core.tail_scalar()
        if t is not None:
            n, mu = t
            sigma, v = top_singular(column_block(core, n)) if n else (0.0, None)
            if n and sigma >= abs(mu):
                return _exact(sigma, Attained(_unit(v)), "finite-block")
            w = np.zeros(n + 1, dtype=complex)
            w[n] = 1.0
            return _exact(abs(mu), Attained(w), "finite-block")
    ds = core.domain_support()
    if ds is not None:
        if ds == 0:
            return _exact(0.0, Attained(np.array([1.0 + 0j])), "finite-block")
        sigma, v = top_singular(column_block(core, ds))
        return _exact(sigma, Attained(_unit(v)), "finite-block")
    return None


def _isometry_path(core):
    if is_isometry(core):
        return _exact(1.0, Attained(np.array([1.0 + 0j])), "isometry")
    if isinstance(core, Adjoint) and isinstance(core.child, Shift):
        k = core.child.offset
        w = np.zeros(k + 1, dtype=complex)
        w[k] = 1.0
        return _exact(1.0, Attained(w), "co-isometry")
    if isinstance(core, Projection):
        s = core.subspace
        if s.dim == 0:
            return _exact(0.0, Attained(np.array([1.0 + 0j])), "projection")
        return _exact(1.0, Attained(s.unit_vector()), "projection")
    return None


def _structured(T):
    factor, core = _normalize(T)
    if factor == 0:
        return _exact(0.0, Attained(np.array([1.0 + 0j])), "zero")
    for path in (_block_restriction, _diagonal_path, _isometry_path, _block_path):
        rep = path(core)
        if rep is not None:
            break
    else:
        return None
    scale = abs(factor)
    if scale == 1.0:
        return rep
    return NormReport(rep.lower * scale, rep.upper * scale, rep.exact * scale, rep.attained, rep.method)


# ---------------------------------------------------------------------------
# truncation ladder


def _residual(T, v, sigma):
    """||T*T v - sigma^2 v|| with the full (untruncated) operator."""
    tv = apply_many(T, v[:, None])
    back = T._rmatvec(tv)[:, 0]
    n = max(back.size, v.size)
    back = pad_rows(back[:, None], n)[:, 0]
    vv = pad_rows(v[:, None], n)[:, 0]
    return float(np.linalg.norm(back - sigma**2 * vv))


def _ladder(T, max_dim, tolerance):
    dims = [d for d in LADDER if d <= max_dim] or [max_dim]
    if dims[-1] < max_dim and max_dim not in LADDER:
        dims.append(max_dim)
    lowers, witnesses, residuals = [], [], []
    for d in dims:
        sigma, v = top_singular(truncate(T, d))
        lowers.append(sigma)
        witnesses.append(v)
        residuals.append(_residual(T, v, sigma))
    upper = max(norm_upper(T), max(lowers))
    lower = max(lowers)
    stable = len(lowers) < 2 or lowers[-1] - lowers[-2] <= tolerance
    scale = max(1.0, lower**2)
    certified = stable and all(r <= RESIDUAL_RTOL * scale for r in residuals[-2:])
    if certified:
        v = witnesses[-1]
        value = float(np.linalg.norm(apply(T, v)))
        if abs(value - lower) <= RESIDUAL_RTOL * max(1.0, lower):
            return NormReport(value, value, value, Attained(v), "truncation-ladder", tuple(lowers))
    return NormReport(lower, upper, None, Unknown(), "truncation-ladder", tuple(lowers))


def operator_norm(T, max_dim=256, tolerance=1e-10):
    """NormReport for ``T``: exact when a structured rule applies, else ladder bounds."""
    rep = _structured(T)
    if rep is not None:
        return rep
    return _ladder(T, max_dim, tolerance)


# ---------------------------------------------------------------------------
# self-adjointness and positivity


def working_dim(T, d):
    """Smallest truncation that captures a finite block of T exactly, else ``d``."""
    n = T.domain_support()
    if n is not None:
        return max(n, 1)
    if T.domain is None and T.codomain is None:
        t = T.tail_scalar()
        if t is not None:
            return t[0] + 1
    return d


def _hermitian_matrix(a, tol):
    return np.max(np.abs(a - a.conj().T), initial=0.0) <= tol * max(1.0, float(np.max(np.abs(a), initial=0.0)))


def is_self_adjoint(T, d=64, tol=1e-10):
    """Structural test, falling back to a Hermitian check of the truncation."""
    from .operators import PositiveRoot

    if isinstance(T, (Identity, Projection, PositiveRoot)):
        return True
    if isinstance(T, Diagonal) and isinstance(T.sequence, RealSeq):
        return True
    if isinstance(T, Dense):
        return _hermitian_matrix(T.matrix, tol)
    if isinstance(T, Scale) and T.alpha.imag == 0.0:
        return is_self_adjoint(T.child, d, tol)
    if isinstance(T, Sum) and all(is_self_adjoint(c, d, tol) for c in T.children):
        return True
    if T.domain != T.codomain:
        return False
    return _hermitian_matrix(truncate(T, working_dim(T, d)), tol)


def is_positive(T, d=64, tol=1e-10):
    """Structural test, falling back to the spectrum of the truncation."""
    from .operators import PositiveRoot

    if isinstance(T, (Identity, Projection, PositiveRoot)):
        return True
    if isinstance(T, Diagonal) and isinstance(T.sequence, RealSeq):
        return T.sequence.seq.is_nonnegative()
    if isinstance(T, Scale) and T.alpha.imag == 0.0 and T.alpha.real >= 0.0:
        return is_positive(T.child, d, tol)
    if isinstance(T, Sum) and all(is_positive(c, d, tol) for c in T.children):
        return True
    if not is_self_adjoint(T, d, tol):
        return False
    a = truncate(T, working_dim(T, d))
    w = hermitian_eig(0.5 * (a + a.conj().T)).eigenvalues
    return bool(w[-1] >= -tol * max(1.0, abs(float(w[0]))))
