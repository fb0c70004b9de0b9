"""Complex Hermitian eigensolver.

Two-sided cyclic Jacobi with complex rotations. Pairs are visited in
round-robin (tournament) order so that each round applies ``n // 2``
disjoint rotations at once; a sweep is ``n - 1`` rounds and touches every
off-diagonal pair exactly once.

Above ``JACOBI_MAX_DIM`` the default method hands the matrix to LAPACK
(``numpy.linalg.eigh``); ordering and eigenvector normalization are the
same for both paths.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NoConvergence, NotHermitian

JACOBI_MAX_DIM = 64
SWEEP_LIMIT = 100
OFF_DIAGONAL_RTOL = 1e-12
HERMITIAN_ATOL = 1e-10
CLUSTER_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class EigResult:
    """Eigenvalues sorted descending, eigenvectors as matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __iter__(self):
        yield self.eigenvalues
        yield self.eigenvectors

    @property
    def top(self):
        return self.eigenvalues[0], self.eigenvectors[:, 0]

    @property
    def bottom(self):
        return self.eigenvalues[-1], self.eigenvectors[:, -1]


@lru_cache(maxsize=64)
def _round_robin(n):
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(a):
    off = a.copy()
    idx = np.arange(a.shape[-1])
    off[..., idx, idx] = 0.0
    return np.linalg.norm(off, axis=(-2, -1))


def jacobi_eig(a):
    """Diagonalize a Hermitian matrix, or a stack of them, by Jacobi sweeps.

    Returns (eigenvalues, vectors) unsorted; a stack of shape (B, n, n)
    gives eigenvalues (B, n) and vectors (B, n, n).
    """
    a = np.array(a, dtype=complex)
    single = a.ndim == 2
    if single:
        a = a[None]
    b, n, _ = a.shape
    eye = np.broadcast_to(np.eye(n, dtype=complex), a.shape)
    v = eye.copy()
    idx = np.arange(n)
    if n >= 2:
        threshold = OFF_DIAGONAL_RTOL * np.linalg.norm(a, axis=(-2, -1))
        tiny = np.finfo(float).tiny / np.finfo(float).eps
        rounds = _round_robin(n)
        for _ in range(SWEEP_LIMIT):
            if np.all(_off_norm(a) <= threshold):
                break
            for p, q in rounds:
                apq = a[:, p, q]
                mag = np.abs(apq)
                active = mag > tiny
                if not active.any():
                    continue
                app = a[:, p, p].real
                aqq = a[:, q, q].real
                safe = np.where(active, mag, 1.0)
                phase = np.where(active, apq / safe, 1.0)
                zeta = (aqq - app) / (2.0 * safe)
                t = np.where(zeta >= 0, 1.0, -1.0) / (np.abs(zeta) + np.hypot(zeta, 1.0))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cph = np.conj(phase)
                # disjoint plane rotations of one round as a single unitary G;
                # on the (p, q) plane G is [[c, s], [-s*conj(ph), c*conj(ph)]]
                g = eye.copy()
                g[:, p, p] = c
                g[:, p, q] = s
                g[:, q, p] = -s * cph
                g[:, q, q] = c * cph
                a = np.swapaxes(g.conj(), 1, 2) @ a @ g
                v = v @ g
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
        else:
            if np.any(_off_norm(a) > threshold):
                raise NoConvergence(f"Jacobi sweeps exceeded limit {SWEEP_LIMIT}")
    w = np.real(a[:, idx, idx]).copy()
    if single:
        return w[0], v[0]
    return w, v


def canonical_basis(vectors, atol=1e-8):
    """Orthonormal basis of span(vectors) in basis-index order.

    Gram-Schmidt on the projections of e_1, e_2, ... onto the span. The
    j-th accepted vector has a real positive coordinate at its leading
    index, which makes the result independent of how the span was given.
    """
    vectors = np.asarray(vectors, dtype=complex)
    if vectors.ndim == 1:
        vectors = vectors[:, None]
    n, m = vectors.shape
    if m == 0:
        return vectors
    u, s, _ = np.linalg.svd(vectors, full_matrices=False)
    m = int(np.sum(s > atol * max(float(s[0]), 1e-300)))
    if m == 0:
        return np.zeros((n, 0), dtype=complex)
    u = u[:, :m]
    proj = u @ u.conj().T
    out = []
    for j in range(n):
        w = proj[:, j].copy()
        for b in out:
            w -= (b.conj() @ w) * b
        nrm = np.linalg.norm(w)
        if nrm > atol:
            w = w / nrm
            for b in out:
                w -= (b.conj() @ w) * b
            w /= np.linalg.norm(w)
            lead = w[j]
            if abs(lead) > 0:
                w *= abs(lead) / lead
            out.append(w)
            if len(out) == m:
                break
    return np.column_stack(out)


def _check_hermitian(a, atol):
    if a.shape[-1] != a.shape[-2]:
        raise NotHermitian(f"matrix is not square: {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise NotHermitian("matrix has non-finite entries")
    if a.size and np.max(np.abs(a - np.swapaxes(a.conj(), -1, -2))) > atol:
        raise NotHermitian("matrix differs from its conjugate transpose")
    return 0.5 * (a + np.swapaxes(a.conj(), -1, -2))


def _finish(w, v):
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    # fix the phase: first non-negligible coordinate real and positive
    mags = np.abs(v)
    lead = np.argmax(mags > 1e-6 * mags.max(axis=0, initial=0.0), axis=0)
    pick = v[lead, np.arange(v.shape[1])]
    v = v * np.where(np.abs(pick) > 0, np.abs(pick) / np.where(pick == 0, 1.0, pick), 1.0)
    n = w.size
    scale = max(1.0, float(np.max(np.abs(w))))
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and w[start] - w[stop] <= CLUSTER_RTOL * scale:
            stop += 1
        if stop - start > 1:
            v[:, start:stop] = canonical_basis(v[:, start:stop])
        start = stop
    return EigResult(w, v)


def hermitian_eig(a, method="auto", atol=HERMITIAN_ATOL):
    """Eigen-decomposition of a complex Hermitian matrix.

    Eigenvalues come back sorted descending. Within a cluster of equal
    eigenvalues (relative spread below 1e-10) the eigenvectors are replaced
    by the :func:`canonical_basis` of the cluster, so the output does not
    depend on rotation order.
    """
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    a = _check_hermitian(a, atol)
    n = a.shape[0]
    if n == 0:
        return EigResult(np.zeros(0), np.zeros((0, 0), dtype=complex))
    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        w, v = jacobi_eig(a)
    elif method == "lapack":
        w, v = np.linalg.eigh(a)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _finish(w, v)


def hermitian_eig_batch(stack, atol=HERMITIAN_ATOL):
    """:func:`hermitian_eig` applied to each matrix of a (B, n, n) stack."""
    stack = np.asarray(stack, dtype=complex)
    stack = _check_hermitian(stack, atol)
    if stack.shape[-1] <= JACOBI_MAX_DIM:
        w, v = jacobi_eig(stack)
    else:
        w, v = np.linalg.eigh(stack)
    return [_finish(w[i], v[i]) for i in range(stack.shape[0])]


def top_singular(b):
    """Largest singular value of ``b`` and its right singular vector."""
    b = np.atleast_2d(np.asarray(b, dtype=complex))
    if b.shape[1] == 0:
        return 0.0, np.zeros(0, dtype=complex)
    gram = b.conj().T @ b
    res = hermitian_eig(0.5 * (gram + gram.conj().T))
    lam, vec = res.top
    return float(np.sqrt(max(lam, 0.0))), vec
