"""Certificates for norm attainment (property N).

An operator T attains its norm when ||T x0|| = ||T|| for some unit x0,
which happens exactly when ||T|| is an eigenvalue of P_T (equivalently,
||T||^2 is an eigenvalue of T*T). Attainment is certified by a witness
whose Gram residual is checked with the full operator. Non-attainment is
only ever reported from a structured rule, never from numerics.
"""

from dataclasses import dataclass, field

import numpy as np

from .eig import hermitian_eig
from .errors import GapNotStrict, Inconclusive, InvariantViolation, NotSelfAdjoint, WitnessInvalid
from .operators import Projection, Restrict, adjoint, apply, gram_matrix, inner, truncate
from .sequences import RealSeq
from .spectral import (
    Attained,
    NotAttained,
    NormReport,
    Unknown,
    diagonal_form,
    is_positive,
    is_self_adjoint,
    operator_norm,
    working_dim,
)
from .subspaces import pad_rows

WITNESS_RTOL = 1e-9
BISECTION_STEPS = 200
BISECTION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class AttainmentCertificate:
    status: object
    checks: tuple = ()
    norm_report: NormReport | None = None
    ambient_witness: np.ndarray | None = field(default=None)

    @property
    def witness(self):
        return self.status.witness if isinstance(self.status, Attained) else None

    @property
    def norm(self):
        return None if self.norm_report is None else self.norm_report.value


def _gram_residual(T, x, value):
    """||T*T x - value^2 x|| evaluated with the full operator."""
    back = T._rmatvec(T._matvec(np.asarray(x, dtype=complex)[:, None]))[:, 0]
    n = max(back.size, x.size)
    back = pad_rows(back[:, None], n)[:, 0]
    x = pad_rows(np.asarray(x, dtype=complex)[:, None], n)[:, 0]
    return float(np.linalg.norm(back - value**2 * x))


def _ambient(T, x):
    if T.domain is None:
        return x
    return T.domain.embed(np.asarray(x, dtype=complex)[:, None])[:, 0]


def _certificate(T, report):
    status = report.attained
    if not isinstance(status, Attained):
        return AttainmentCertificate(status, (), report, None)
    x = status.witness
    value = report.value
    scale = max(1.0, value)
    checks = []
    if abs(np.linalg.norm(apply(T, x)) - value) <= WITNESS_RTOL * scale:
        checks.append("norm-attained")
    if _gram_residual(T, x, value) <= WITNESS_RTOL * scale**2:
        checks.append("gram-eigenvector")
    return AttainmentCertificate(status, tuple(checks), report, _ambient(T, x))


def check_n(T, max_dim=256, tolerance=1e-10):
    """Decide whether T attains its norm.

    Witnesses are given in the coordinates of T's domain; for restrictions
    ``ambient_witness`` holds the same vector embedded in l2.
    """
    return _certificate(T, operator_norm(T, max_dim=max_dim, tolerance=tolerance))


def verify_witness(T, x0, probes=(), tol=1e-8):
    """Check the consequences of ||T x0|| = ||T|| and return the tags that hold.

    Tags: ``norm-attained`` (always, otherwise WitnessInvalid),
    ``orthogonal-images`` (T maps x0-perp into (T x0)-perp on the probes),
    and for positive T ``eigenvector`` (T x0 = ||T|| x0) and ``reducing``
    (both C x0 and its complement are T-invariant on the probes).
    """
    x0 = np.asarray(x0, dtype=complex)
    if abs(np.linalg.norm(x0) - 1.0) > tol:
        raise InvariantViolation("witness must be a unit vector")
    for y in probes:
        if abs(inner(y, x0)) > tol * max(1.0, np.linalg.norm(y)):
            raise InvariantViolation("probes must be orthogonal to the witness")
    norm = operator_norm(T).value
    scale = max(1.0, norm)
    tx0 = apply(T, x0)
    if abs(np.linalg.norm(tx0) - norm) > tol * scale:
        raise WitnessInvalid(f"||T x0|| = {np.linalg.norm(tx0):.12g} differs from ||T|| = {norm:.12g}")
    tags = ["norm-attained"]
    images = [apply(T, y) for y in probes]
    if all(abs(inner(ty, tx0)) <= tol * scale**2 * max(1.0, np.linalg.norm(y)) for ty, y in zip(images, probes)):
        tags.append("orthogonal-images")
    if T.domain is None and is_positive(T):
        n = max(tx0.size, x0.size)
        if np.linalg.norm(pad_rows(tx0[:, None], n) - norm * pad_rows(x0[:, None], n)) <= tol * scale:
            tags.append("eigenvector")
            if all(
                abs(inner(tx0, y)) <= tol * scale and abs(inner(ty, x0)) <= tol * scale
                for ty, y in zip(images, probes)
            ):
                tags.append("reducing")
    return tags


def _sa_diagonal(T):
    """Self-adjoint alpha*I + Diagonal(real seq): eigenvalues +-||T|| by closed form."""
    form = diagonal_form(T)
    if form is None:
        return None
    alpha, seq = form
    if alpha.imag != 0.0 or (seq is not None and not isinstance(seq, RealSeq)):
        return None
    a = alpha.real
    if seq is None:
        return NormReport(abs(a), abs(a), abs(a), Attained(np.array([1.0 + 0j])), "diagonal-closed-form")
    top = seq.seq.sup_of(lambda t: a + t)
    bottom = seq.seq.sup_of(lambda t: -(a + t))
    norm = max(top.value, bottom.value)
    for sup in (top, bottom):
        if sup.attained and sup.value == norm:
            w = np.zeros(sup.witness_index, dtype=complex)
            w[-1] = 1.0
            return NormReport(norm, norm, norm, Attained(w), "diagonal-closed-form")
    rule = "strictly-monotone-diagonal" if a == 0.0 else "strict-quadratic-gap"
    return NormReport(norm, norm, norm, NotAttained(rule), "diagonal-closed-form")


def _sa_eigen(T, d, tolerance):
    """Eigenvalue +-||T|| of T itself, from finite blocks or a truncation ladder."""
    if isinstance(T, Projection):
        s = T.subspace
        if s.dim == 0:
            return NormReport(0.0, 0.0, 0.0, Attained(np.array([1.0 + 0j])), "projection")
        return NormReport(1.0, 1.0, 1.0, Attained(s.unit_vector()), "projection")
    n = working_dim(T, None)
    if n is not None:
        a = truncate(T, n)
        res = hermitian_eig(0.5 * (a + a.conj().T))
        w, v = res
        idx = 0 if abs(w[0]) >= abs(w[-1]) else -1
        norm = float(abs(w[idx]))
        return NormReport(norm, norm, norm, Attained(v[:, idx]), "finite-block")
    dims = [k for k in (16, 64, 256) if k <= d] or [d]
    values, vecs, residuals = [], [], []
    for k in dims:
        a = truncate(T, k)
        w, v = hermitian_eig(0.5 * (a + a.conj().T))
        idx = 0 if abs(w[0]) >= abs(w[-1]) else -1
        x = v[:, idx]
        tx = apply(T, x)
        m = max(tx.size, x.size)
        r = np.linalg.norm(pad_rows(tx[:, None], m) - w[idx] * pad_rows(x[:, None], m))
        values.append(float(abs(w[idx])))
        vecs.append(x)
        residuals.append(float(r))
    lower = max(values)
    stable = len(values) < 2 or values[-1] - values[-2] <= tolerance
    if stable and all(r <= WITNESS_RTOL * max(1.0, lower) for r in residuals[-2:]):
        return NormReport(values[-1], values[-1], values[-1], Attained(vecs[-1]), "truncation-ladder")
    upper = max(float(T.norm_bound()), lower)
    return NormReport(lower, upper, None, Unknown(), "truncation-ladder", tuple(values))


def check_n_selfadjoint(T, d=256, tolerance=1e-10):
    """Attainment for self-adjoint T via the eigenvalues +-||T|| of T itself.

    The witness is an eigenvector for +||T|| when that is an eigenvalue,
    otherwise for -||T||.
    """
    if not is_self_adjoint(T, min(d, 64)):
        raise NotSelfAdjoint("operator is not self-adjoint")
    rep = _sa_diagonal(T)
    if rep is None:
        rep = _sa_eigen(T, d, tolerance)
    return _certificate(T, rep)


def check_adjoint_consistency(T, max_dim=256):
    """True iff T and T* agree on attainment.

    When T attains at x0, the vector T x0 / ||T|| must attain ||T*||.
    """
    a = check_n(T, max_dim=max_dim)
    b = check_n(adjoint(T), max_dim=max_dim)
    if isinstance(a.status, Unknown) or isinstance(b.status, Unknown):
        raise Inconclusive("attainment of T or T* is undecided")
    if type(a.status) is not type(b.status):
        return False
    if isinstance(a.status, Attained):
        norm = a.norm
        if norm == 0.0:
            return True
        y = apply(T, a.witness) / norm
        back = apply(adjoint(T), y)
        scale = max(1.0, norm)
        return bool(
            abs(np.linalg.norm(y) - 1.0) <= WITNESS_RTOL * scale
            and abs(np.linalg.norm(back) - norm) <= WITNESS_RTOL * scale
        )
    return True


def adjoint_witness(T, x0):
    """T x0 / ||T||, the attaining vector for T* built from one for T."""
    tx = apply(T, x0)
    return tx / np.linalg.norm(tx)


def _segment(y, w, s):
    x = (1.0 - s) * y + s * w
    return x / np.linalg.norm(x)


def attain_intermediate_norm(T, M, d=64, positive_form=False, tol=BISECTION_TOL):
    """Unit x with ||T x|| = ||T|_M|| when ||T|_M|| < ||T||.

    The quadratic form <T*T x, x> takes every value between its extremes
    along the great-circle segment between a bottom and a top eigenvector,
    so bisection on the segment parameter hits ||T|_M||^2 exactly.
    With ``positive_form`` (T positive) the form is <T x, x> and the
    target ||T|_M|| itself.
    """
    target = operator_norm(Restrict(T, M), max_dim=d).value
    full = operator_norm(T, max_dim=d).value
    if not target < full * (1.0 - 1e-12):
        raise GapNotStrict(f"||T|_M|| = {target:.12g} is not below ||T|| = {full:.12g}")
    n = max(working_dim(T, d), getattr(M, "support", 0) or 0, 1)
    if positive_form:
        if not is_positive(T, n):
            raise InvariantViolation("positive_form needs a positive operator")
        form = truncate(T, n)
        goal = target
    else:
        form = gram_matrix(T, n)
        goal = target**2
    form = 0.5 * (form + form.conj().T)
    res = hermitian_eig(form)
    lo_val, y = res.bottom
    hi_val, w = res.top
    scale = max(1.0, abs(goal))
    if not (lo_val <= goal + tol * scale and goal <= hi_val + tol * scale):
        raise GapNotStrict("target lies outside the numerical range of the truncated form")

    def q(s):
        x = _segment(y, w, s)
        return float(np.real(np.vdot(x, form @ x)))

    lo, hi = 0.0, 1.0
    s = 0.5
    for _ in range(BISECTION_STEPS):
        s = 0.5 * (lo + hi)
        val = q(s)
        if abs(val - goal) <= tol * scale:
            break
        if val < goal:
            lo = s
        else:
            hi = s
    return _segment(y, w, s)
