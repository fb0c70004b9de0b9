"""Numerical range W(T) = {<Tx, x> : ||x|| = 1} of a truncation.

W is convex, so its boundary is traced by its support function: for each
direction e^{i theta} the top eigenvector of the Hermitian part of
e^{-i theta} A maximizes Re(e^{-i theta} <Ax, x>), and <Av, v> is the
boundary point in that direction.
"""

from dataclasses import dataclass

import numpy as np

from .eig import hermitian_eig, hermitian_eig_batch
from .errors import InvariantViolation, NotPositive, NotSelfAdjoint
from .operators import truncate

EXTREME_RTOL = 1e-9
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class NumRangeBoundary:
    thetas: np.ndarray
    points: np.ndarray
    maximizers: np.ndarray

    def __len__(self):
        return self.thetas.size

    def __iter__(self):
        for k in range(self.thetas.size):
            yield float(self.thetas[k]), complex(self.points[k]), self.maximizers[k]


@dataclass(frozen=True, eq=False)
class ExtremePoints:
    plus: bool
    minus: bool
    norm: float
    plus_vector: np.ndarray | None = None
    minus_vector: np.ndarray | None = None


def boundary_of_matrix(a, n_angles=360):
    """Support points of W(a) on the grid theta_k = 2 pi k / n_angles."""
    if n_angles < 3:
        raise InvariantViolation(f"need at least 3 angles, got {n_angles}")
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    thetas = 2.0 * np.pi * np.arange(n_angles) / n_angles
    rot = np.exp(-1j * thetas)[:, None, None] * a[None]
    herm = 0.5 * (rot + np.swapaxes(rot.conj(), 1, 2))
    results = hermitian_eig_batch(herm)
    vecs = np.array([r.eigenvectors[:, 0] for r in results])
    points = np.einsum("ki,ij,kj->k", vecs.conj(), a, vecs)
    return NumRangeBoundary(thetas, points, vecs)


def numrange_boundary(T, d, n_angles=360):
    """Boundary points of W(truncate(T, d)), one per angle."""
    return boundary_of_matrix(truncate(T, d), n_angles)


def _hermitian(a):
    return np.max(np.abs(a - a.conj().T), initial=0.0) <= HERMITIAN_TOL * max(1.0, float(np.max(np.abs(a), initial=0.0)))


def sup_numrange_positive(P, d):
    """sup W(P) = ||P|| for positive P, at truncation ``d``."""
    a = truncate(P, d)
    if not _hermitian(a):
        raise NotPositive("truncation is not Hermitian")
    w = hermitian_eig(a).eigenvalues
    if w[-1] < -HERMITIAN_TOL:
        raise NotPositive(f"truncation has eigenvalue {w[-1]:.3g} < 0")
    return float(w[0])


def extreme_point_check(T, d):
    """Whether +||T|| and -||T|| are reached as <T x0, x0> at truncation ``d``."""
    a = truncate(T, d)
    if not _hermitian(a):
        raise NotSelfAdjoint("truncation is not Hermitian")
    w, v = hermitian_eig(a)
    norm = float(max(abs(w[0]), abs(w[-1])))
    tol = EXTREME_RTOL * max(1.0, norm)
    plus = bool(abs(w[0] - norm) <= tol)
    minus = bool(abs(w[-1] + norm) <= tol)
    return ExtremePoints(
        plus,
        minus,
        norm,
        v[:, 0] if plus else None,
        v[:, -1] if minus else None,
    )
