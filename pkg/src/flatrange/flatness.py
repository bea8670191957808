"""General flat-portion detection for companion matrices.

The detector enumerates candidate supporting directions ``omega`` on the
unit circle from a polynomial necessary condition, screens them with a
second scalar condition on the coupling coefficients, and confirms each
survivor by checking that the compression of ``Im(omega A)`` onto the
two-dimensional top eigenspace of ``Re(omega A)`` is not a scalar.  A
confirmed direction contributes one boundary segment whose supporting
line touches the point ``conj(omega) * cos(pi/n)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .companion import CompanionSpec, GammaVector, build_matrix, char_coeffs, chebyshev_basis, gamma_vector
from .numcore import Polynomial, herm_eig, maxnorm, poly_roots, unimodular_filter

__all__ = [
    "AnalysisReport",
    "ConstantPolynomial",
    "DetectionTolerances",
    "FlatCandidate",
    "FlatPortion",
    "NotAnEigenpair",
    "analyze",
    "candidate_at",
    "cond1_polynomial",
    "confirm_flat",
    "flat_endpoints",
    "necessary_candidates",
    "scal",
    "witness_vectors",
]


class ConstantPolynomial(ValueError):
    """The candidate polynomial degenerated to a nonzero constant.

    This happens exactly when a_0 = ... = a_{n-2} = 0 and means "no
    candidate directions at all", not a numerical failure.
    """


class NotAnEigenpair(RuntimeError):
    """A witness vector failed its eigenvector residual check."""


def scal(u, v) -> complex:
    """Inner product with conjugation on the second argument."""
    return complex(np.vdot(v, u))


@dataclass(frozen=True)
class DetectionTolerances:
    """Decision thresholds for the floating-point form of the criteria.

    ``unimodular`` admits roots to the unit circle, ``cond1``/``cond2``
    bound the residuals of the two necessary conditions (``cond2`` scales
    with ``1 + max|a_j|``), ``confirm`` is the nonzero-compression
    threshold relative to the matrix maxnorm, and ``dedup`` merges
    near-identical candidate directions (double roots must not count
    twice).
    """

    unimodular: float = 1e-8
    cond1: float = 1e-8
    cond2_base: float = 1e-7
    confirm: float = 1e-8
    dedup: float = 1e-6

    def cond2_tol(self, spec: CompanionSpec) -> float:
        return self.cond2_base * (1.0 + spec.max_coeff)


@dataclass(frozen=True)
class FlatCandidate:
    """One unimodular candidate direction with its screening diagnostics."""

    omega: complex
    cond1_residual: float
    cond2_residual: float
    gamma: GammaVector
    passed_necessary: bool
    marginal: bool = False


@dataclass(frozen=True)
class FlatPortion:
    """A confirmed boundary segment.

    ``anchor = conj(omega) * cos(pi/n)`` lies on the segment, whose
    direction angle is ``slope = (pi/2 - arg omega) mod pi``.  ``s12``
    and ``s22`` are the compression scalar products that witnessed the
    non-scalar compression.
    """

    omega: complex
    anchor: complex
    slope: float
    endpoints: tuple[complex, complex]
    s12: complex
    s22: complex

    @property
    def length(self) -> float:
        return abs(self.endpoints[1] - self.endpoints[0])


@dataclass(frozen=True)
class AnalysisReport:
    """Full verdict for one companion spec."""

    spec: CompanionSpec
    candidates: tuple[FlatCandidate, ...]
    portions: tuple[FlatPortion, ...]
    flat_count: int
    reducible: "ReducibilityVerdict"  # noqa: F821  (special imports lazily)
    oracle_agreement: bool | None = None


def cond1_polynomial(spec: CompanionSpec) -> Polynomial:
    """First necessary condition as a polynomial in ``omega``.

    ``sum_{j=0}^{n-2} a_j sin(pi (j+1)/n) omega^{n-j} - sin(pi/n)``; the
    constant term is always ``-sin(pi/n) != 0`` so zero is never a root.
    Raises :class:`ConstantPolynomial` when every coefficient a_0..a_{n-2}
    vanishes.
    """
    n = spec.n
    c = np.zeros(n + 1, dtype=complex)
    c[0] = -math.sin(math.pi / n)
    for j in range(n - 1):
        c[n - j] += spec.a[j] * math.sin(math.pi * (j + 1) / n)
    p = Polynomial(tuple(c))
    if p.degree == 0:
        raise ConstantPolynomial("all of a_0..a_{n-2} vanish; no candidate directions")
    return p


def _cond2_residual(spec: CompanionSpec, gam: GammaVector) -> float:
    n = spec.n
    cosn = math.cos(math.pi / n)
    lhs = (spec.a[n - 1] * gam.omega).real
    rhs = -cosn
    for j in range(2, n):
        rhs += abs(gam.gamma[j - 1]) ** 2 / (cosn - math.cos(math.pi * j / n))
    return float(abs(lhs - rhs))


def candidate_at(spec: CompanionSpec, omega: complex, tol: DetectionTolerances | None = None,
                 cond1_res: float | None = None) -> FlatCandidate:
    """Evaluate the screening diagnostics at a given unit direction."""
    tol = tol or DetectionTolerances()
    if cond1_res is None:
        try:
            cond1_res = float(abs(cond1_polynomial(spec)(omega)))
        except ConstantPolynomial:
            cond1_res = math.inf
    gam = gamma_vector(spec, omega)
    c2 = _cond2_residual(spec, gam)
    c2tol = tol.cond2_tol(spec)
    passed = bool(cond1_res <= tol.cond1 and c2 <= c2tol)
    marginal = bool(c2tol / 10.0 <= c2 <= c2tol * 10.0)
    return FlatCandidate(complex(gam.omega), float(cond1_res), c2, gam, passed, marginal)


def necessary_candidates(spec: CompanionSpec, tol: DetectionTolerances | None = None) -> list[FlatCandidate]:
    """All unimodular roots of the candidate polynomial, screened.

    Failed candidates are kept (flagged) for diagnostics.  Directions
    closer than the dedup tolerance are merged, so a double root yields a
    single candidate.
    """
    if spec.n < 3:
        raise ValueError("necessary_candidates needs n >= 3")
    tol = tol or DetectionTolerances()
    try:
        p = cond1_polynomial(spec)
    except ConstantPolynomial:
        return []
    roots = poly_roots(p)
    omegas = unimodular_filter(roots, tol.unimodular)
    kept: list[complex] = []
    for w in omegas:
        if all(abs(w - v) > tol.dedup for v in kept):
            kept.append(w)
    cands = [candidate_at(spec, w, tol, cond1_res=float(abs(p(w)))) for w in kept]
    cands.sort(key=lambda c: cmath.phase(c.omega) % (2.0 * math.pi))
    return cands


def witness_vectors(spec: CompanionSpec, omega: complex, gam: GammaVector | None = None):
    """Basis ``(x1, x2)`` of the top eigenspace of ``Re(omega A)``.

    ``x1`` embeds the first sine basis vector, ``x2`` lifts the arrowhead
    kernel vector ``xi = (0, xi_2, ..., xi_{n-1}, 1)`` with
    ``xi_j = conj(gamma_j) / (cos(pi/n) - cos(pi j/n))``; both are pulled
    back through the rotation similarity.  Each must satisfy
    ``Re(omega A) x = cos(pi/n) x``; a residual above ``1e-8 * maxnorm(A)``
    raises :class:`NotAnEigenpair` (it signals misconfigured screening
    tolerances upstream).
    """
    if gam is None:
        gam = gamma_vector(spec, omega)
    w = gam.omega
    n = spec.n
    cosn = math.cos(math.pi / n)
    vectors, V = chebyshev_basis(n)
    om_inv = np.array([np.conj(w) ** k for k in range(n)])
    x1 = om_inv * np.concatenate([vectors[:, 0], [0.0]])
    xi = np.zeros(n, dtype=complex)
    for j in range(2, n):
        xi[j - 1] = np.conj(gam.gamma[j - 1]) / (cosn - math.cos(math.pi * j / n))
    xi[n - 1] = 1.0
    lifted = np.concatenate([V @ xi[: n - 1], [xi[n - 1]]])
    x2 = om_inv * lifted
    A = build_matrix(spec)
    R = (w * A + np.conj(w) * A.conj().T) / 2.0
    bound = 1e-8 * maxnorm(A)
    for x in (x1, x2):
        resid = maxnorm(R @ x - cosn * x) / max(1.0, maxnorm(x))
        if resid > bound:
            raise NotAnEigenpair(f"witness residual {resid:.3e} exceeds {bound:.3e}")
    return x1, x2


def flat_endpoints(spec: CompanionSpec, omega: complex, x1, x2) -> tuple[complex, complex]:
    """Endpoints of the (possibly degenerate) segment at direction ``omega``.

    Orthonormalizes the witnesses, compresses ``Im(omega A)`` to a 2x2
    Hermitian matrix, and maps its extreme eigenvalues back to the plane:
    ``conj(omega) * (cos(pi/n) + i mu)``.  Equal endpoints mean the
    compression was scalar.
    """
    w = omega / abs(omega)
    n = spec.n
    A = build_matrix(spec)
    M = (w * A - np.conj(w) * A.conj().T) / 2j
    q1 = np.asarray(x1, dtype=complex)
    q1 = q1 / np.linalg.norm(q1)
    q2 = np.asarray(x2, dtype=complex) - scal(x2, q1) * q1
    q2 = q2 / np.linalg.norm(q2)
    C = np.array(
        [
            [scal(M @ q1, q1), scal(M @ q2, q1)],
            [scal(M @ q1, q2), scal(M @ q2, q2)],
        ]
    )
    mu = herm_eig(C).values
    cosn = math.cos(math.pi / n)
    return (complex(np.conj(w) * (cosn + 1j * mu[0])), complex(np.conj(w) * (cosn + 1j * mu[1])))


def confirm_flat(spec: CompanionSpec, candidate: FlatCandidate,
                 tol: DetectionTolerances | None = None) -> FlatPortion | None:
    """Confirm or reject a screened candidate.

    The candidate direction carries a flat portion iff at least one of
    the scalar products ``s12 = <Im(omega A) x1, x2>`` and
    ``s22 = <Im(omega A) x2, x2>`` is nonzero (the remaining product
    ``<Im(omega A) x1, x1>`` vanishes identically).  Returns the located
    portion, or ``None`` when the compression is scalar.
    """
    tol = tol or DetectionTolerances()
    if not candidate.passed_necessary:
        raise ValueError("confirm_flat expects a candidate that passed the necessary conditions")
    w = candidate.omega
    x1, x2 = witness_vectors(spec, w, candidate.gamma)
    A = build_matrix(spec)
    M = (w * A - np.conj(w) * A.conj().T) / 2j
    s12 = scal(M @ x1, x2)
    s22 = scal(M @ x2, x2)
    if max(abs(s12), abs(s22)) <= tol.confirm * maxnorm(A):
        return None
    n = spec.n
    endpoints = flat_endpoints(spec, w, x1, x2)
    anchor = np.conj(w) * math.cos(math.pi / n)
    slope = (math.pi / 2.0 - cmath.phase(w)) % math.pi
    return FlatPortion(w, complex(anchor), slope, endpoints, s12, s22)


def _analyze_2x2(spec: CompanionSpec, verdict) -> AnalysisReport:
    # Normal non-scalar 2x2: the range is the segment between the two
    # eigenvalues; otherwise an elliptical disk with no flat portion.
    from .special import normality_2x2

    if not normality_2x2(spec):
        return AnalysisReport(spec, (), (), 0, verdict)
    lam = poly_roots(char_coeffs(spec))
    direction = (lam[1] - lam[0]) / abs(lam[1] - lam[0])
    w = complex(1j * np.conj(direction))
    support = (w * lam[0]).real
    A = build_matrix(spec)
    M = (w * A - np.conj(w) * A.conj().T) / 2j
    e1 = np.array([1.0, 0.0], dtype=complex)
    e2 = np.array([0.0, 1.0], dtype=complex)
    s12 = scal(M @ e1, e2)
    s22 = scal(M @ e2, e2)
    mu = herm_eig(np.array([[scal(M @ e1, e1), scal(M @ e2, e1)], [s12, s22]])).values
    endpoints = (complex(np.conj(w) * (support + 1j * mu[0])), complex(np.conj(w) * (support + 1j * mu[1])))
    # anchor: foot of the perpendicular from the origin onto the segment line
    portion = FlatPortion(w, complex(np.conj(w) * support), (math.pi / 2.0 - cmath.phase(w)) % math.pi,
                          endpoints, s12, s22)
    return AnalysisReport(spec, (), (portion,), 1, verdict)


def analyze(spec: CompanionSpec, tol: DetectionTolerances | None = None,
            reducibility_tol: float = 1e-8) -> AnalysisReport:
    """Count and locate every flat portion on the boundary of the range.

    Runs the full pipeline: candidate directions, screening, compression
    confirmation, dedup, and a unitary-reducibility verdict.  The n = 2
    case is decided by the normality criterion instead (flat count 1 for
    a normal companion matrix, else 0).  Deterministic; portions are
    sorted by ``arg omega``.
    """
    from .special import reducibility

    tol = tol or DetectionTolerances()
    verdict = reducibility(spec, reducibility_tol)
    if spec.n == 2:
        return _analyze_2x2(spec, verdict)
    candidates = necessary_candidates(spec, tol)
    portions = []
    for cand in candidates:
        if not cand.passed_necessary:
            continue
        portion = confirm_flat(spec, cand, tol)
        if portion is not None:
            portions.append(portion)
    portions.sort(key=lambda p: cmath.phase(p.omega) % (2.0 * math.pi))
    return AnalysisReport(spec, tuple(candidates), tuple(portions), len(portions), verdict)
