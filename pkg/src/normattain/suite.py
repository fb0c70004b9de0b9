"""Built-in worked examples, replayed as pass/fail checks.

The examples live here as code so that ``normattain paper-suite`` needs no
data files. Every check is deterministic for a given seed.
"""

import math
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .attainment import check_n
from .classify import AN, NOT_AN, classify_an, enan_counterexample
from .deflation import deflate, reconstruct, rewrite_lotd
from .errors import NotLOTDShape
from .operators import Adjoint, Compose, Dense, Diagonal, FiniteRank, Identity, Projection, Restrict, Shift
from .sequences import ExplicitThenZero, Geometric, Harmonic, UnitModulus
from .spectral import NotAttained, operator_norm
from .subspaces import ComplementFinite, SpanFinite

CLOSED_FORM_TOL = 1e-12


class SuiteResult(NamedTuple):
    name: str
    passed: bool
    detail: str


def block_pattern_closed_form(n):
    """||P s^n||^2 = 2/3 + (6n - 5) / (6 (3 (n - 1) + 2)) as an exact fraction."""
    return Fraction(2, 3) + Fraction(6 * n - 5, 6 * (3 * (n - 1) + 2))


def tplusi(a):
    """Identity + diag(lambda_j), |lambda_j| = 1, Re lambda_j = a - a/(j+1) increasing to a."""
    return Identity() + Diagonal(UnitModulus(Harmonic(a, a, 1.0)))


def small_finite_rank():
    return FiniteRank(((0.5, [1.0, 1.0], [1.0, 0.0, 1.0]), (0.25, [0.0, 1j], [1.0])))


def _check_block_pattern():
    ce = enan_counterexample()
    worst = max(abs(float(ce.image_norm_squared_exact(n)) - float(block_pattern_closed_form(n))) for n in range(1, 101))
    numeric = max(abs(ce.image_norm_squared(n) - float(block_pattern_closed_form(n))) for n in range(1, 101))
    ok = worst <= CLOSED_FORM_TOL and numeric <= CLOSED_FORM_TOL
    return SuiteResult("block-pattern-formula", ok, f"exact err {worst:.2e}, float err {numeric:.2e}")


def _check_block_pattern_limit():
    ce = enan_counterexample()
    lower = math.sqrt(ce.image_norm_squared(1000))
    cert = check_n(Restrict(ce.P, ce.M))
    ok = lower >= 0.9998 and cert.norm == 1.0 and isinstance(cert.status, NotAttained)
    return SuiteResult("block-pattern-restriction", ok, f"lower {lower:.6f}, norm {cert.norm}, {cert.status.tag}")


def _check_tplusi():
    out = []
    for a in (0.5, 1.0):
        rep = operator_norm(tplusi(a))
        expect = math.sqrt(2.0 * (1.0 + a))
        ok = (
            rep.exact is not None
            and abs(rep.exact - expect) <= CLOSED_FORM_TOL
            and isinstance(rep.attained, NotAttained)
            and rep.attained.rule == "strict-quadratic-gap"
        )
        out.append(SuiteResult(f"tplusi-a={a:g}", ok, f"exact {rep.exact!r}, {rep.attained.tag}"))
    return out


def _check_increasing_diagonal():
    rep = operator_norm(Diagonal(Harmonic(1.0, 1.0, 1.0)))
    ok = rep.exact == 1.0 and isinstance(rep.attained, NotAttained)
    return SuiteResult("increasing-diagonal", ok, f"exact {rep.exact!r}, {rep.attained.tag}")


def _check_nilpotent():
    cert = check_n(Dense([[0.0, 1.0], [0.0, 0.0]]))
    ok = cert.witness is not None and abs(cert.norm - 1.0) <= CLOSED_FORM_TOL and "gram-eigenvector" in cert.checks
    return SuiteResult("nilpotent-attains", ok, f"norm {cert.norm}, checks {list(cert.checks)}")


def classification_cases():
    """(name, operator, expected verdict) for the classification rules."""
    vecs = (np.array([1.0, 1.0]), np.array([0.0, 0.0, 1.0]), np.array([1.0, 0.0, 0.0, 1j]))
    R = small_finite_rank()
    return [
        ("finite-rank-projection", Projection(SpanFinite(vecs)), AN),
        ("finite-corank-projection", Projection(ComplementFinite(vecs)), AN),
        ("block-pattern-projection", enan_counterexample().P, NOT_AN),
        ("coisometry", Adjoint(Shift(1)), AN),
        ("identity-plus-finite-rank", Identity() + R, AN),
        ("shift-after-identity-plus-rank", Compose((Shift(1), Identity() + R)), AN),
        ("shift-before-identity-plus-rank", Compose((Identity() + R, Shift(1))), AN),
        ("decreasing-diagonal", Diagonal(Harmonic(1.0, -1.0, 1.0)), AN),
        ("increasing-diagonal", Diagonal(Harmonic(1.0, 1.0, 1.0)), NOT_AN),
    ]


def _check_classification():
    out = []
    for name, T, expect in classification_cases():
        v = classify_an(T)
        ok = v.verdict == expect
        if name == "block-pattern-projection":
            ok = ok and v.evidence is not None and v.evidence.subspace == enan_counterexample().M
        out.append(SuiteResult(f"an-{name}", ok, f"{v.verdict} ({v.rule})"))
    return out


def _check_rewrite():
    r = rewrite_lotd(Diagonal(Geometric(1.0, -1.0, 0.5)))
    ok = r.lam == 1.0
    try:
        rewrite_lotd(Diagonal(Harmonic(1.0, 1.0, 1.0)))
        ok = False
    except NotLOTDShape:
        pass
    return SuiteResult("decreasing-diagonal-rewrite", ok, f"lam {r.lam}")


def _check_deflation(seed):
    rng = np.random.default_rng(seed)
    worst = 0.0
    ok = True
    for _ in range(3):
        g = rng.standard_normal((20, 20)) + 1j * rng.standard_normal((20, 20))
        a = g @ g.conj().T
        dec = deflate(Dense(a))
        err = float(np.linalg.norm(reconstruct(dec, 20) - a))
        worst = max(worst, err)
        ok = ok and bool(np.all(np.diff(dec.betas) <= 1e-12)) and dec.orthonormality_error() <= 1e-10 and err <= 1e-9
    diag = deflate(Diagonal(ExplicitThenZero((3.0, 2.0, 1.0))))
    ok = ok and list(diag.betas) == [3.0, 2.0, 1.0]
    return SuiteResult("deflation-round-trip", ok, f"worst reconstruction error {worst:.2e}")


def run_suite(seed=0):
    results = [_check_block_pattern(), _check_block_pattern_limit()]
    results += _check_tplusi()
    results += [_check_increasing_diagonal(), _check_nilpotent()]
    results += _check_classification()
    results += [_check_rewrite(), _check_deflation(seed)]
    return results
