"""Self-contained dense complex kernels.

Two workhorses live here: a cyclic Jacobi eigensolver for Hermitian
matrices and a simultaneous (Aberth-Ehrlich) polynomial root finder.
All matrices in this package are tiny (n <= ~12), so both algorithms
favour robustness and bitwise determinism over asymptotic speed.
Nothing in this module mutates its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegreeZero",
    "EigenSystem",
    "NoConvergence",
    "NotHermitian",
    "Polynomial",
    "herm_eig",
    "is_hermitian",
    "maxnorm",
    "poly_roots",
    "unimodular_filter",
]

# Quasi-uniform angle increment used for starting guesses; never aligns
# with the symmetry axes of real-coefficient polynomials.
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

HERMITIAN_RTOL = 1e-12
JACOBI_SWEEP_LIMIT = 30
JACOBI_OFF_RTOL = 1e-13


class NotHermitian(ValueError):
    """The input matrix fails the Hermitian symmetry check."""


class NoConvergence(RuntimeError):
    """The iteration budget ran out before the target accuracy was met."""


class DegreeZero(ValueError):
    """Root finding was requested for a constant polynomial."""


def maxnorm(M) -> float:
    """Largest entry magnitude of a matrix (or vector)."""
    M = np.asarray(M)
    return float(np.max(np.abs(M))) if M.size else 0.0


def is_hermitian(M, rtol: float = HERMITIAN_RTOL) -> bool:
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        return False
    scale = maxnorm(M)
    if scale == 0.0:
        return True
    return maxnorm(M - M.conj().T) <= rtol * scale


@dataclass(frozen=True)
class EigenSystem:
    """Spectral decomposition of a Hermitian matrix.

    ``values`` is ascending and ``vectors[:, k]`` is a unit eigenvector
    for ``values[k]``; the columns are orthonormal.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def n(self) -> int:
        return len(self.values)


def _offdiag_max(A) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.max(np.abs(off)))


def _jacobi_rotate(A, V, p: int, q: int) -> None:
    """Annihilate A[p, q] with a complex Givens rotation; accumulate V."""
    b = A[p, q]
    ab = abs(b)
    if ab == 0.0:
        return
    phase_conj = np.conj(b) / ab
    alpha = A[p, p].real
    gamma = A[q, q].real
    theta = (gamma - alpha) / (2.0 * ab)
    t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    # U restricted to (p, q): [[c, s], [-s*conj(phase), c*conj(phase)]]
    upp, upq = c, s
    uqp, uqq = -s * phase_conj, c * phase_conj

    cp = A[:, p] * upp + A[:, q] * uqp
    cq = A[:, p] * upq + A[:, q] * uqq
    A[:, p] = cp
    A[:, q] = cq
    rp = np.conj(upp) * A[p, :] + np.conj(uqp) * A[q, :]
    rq = np.conj(upq) * A[p, :] + np.conj(uqq) * A[q, :]
    A[p, :] = rp
    A[q, :] = rq
    A[p, q] = 0.0
    A[q, p] = 0.0
    A[p, p] = A[p, p].real
    A[q, q] = A[q, q].real

    vp = V[:, p] * upp + V[:, q] * uqp
    vq = V[:, p] * upq + V[:, q] * uqq
    V[:, p] = vp
    V[:, q] = vq


def _vector_sort_key(v) -> tuple:
    return tuple(x for comp in v for x in (comp.real, comp.imag))


def herm_eig(H, sweep_limit: int = JACOBI_SWEEP_LIMIT) -> EigenSystem:
    """Eigendecompose a Hermitian matrix by cyclic complex Jacobi rotations.

    Sweeps run until every off-diagonal magnitude drops below
    ``1e-13 * maxnorm(H)``.  Eigenvalues are returned in ascending order;
    exact ties are broken lexicographically on the eigenvector components
    (real then imaginary part) so that the output is deterministic.

    Raises :class:`NotHermitian` when the symmetry check fails and
    :class:`NoConvergence` when ``sweep_limit`` sweeps do not suffice.
    """
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NotHermitian(f"expected a square matrix, got shape {H.shape}")
    if not is_hermitian(H):
        raise NotHermitian("matrix is not Hermitian within 1e-12 of its maxnorm")
    n = H.shape[0]
    scale = maxnorm(H)
    A = (H + H.conj().T) / 2.0
    V = np.eye(n, dtype=complex)
    if n > 1 and scale > 0.0:
        off_tol = JACOBI_OFF_RTOL * scale
        converged = False
        for _ in range(sweep_limit):
            if _offdiag_max(A) <= off_tol:
                converged = True
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    _jacobi_rotate(A, V, p, q)
        if not converged and _offdiag_max(A) > off_tol:
            raise NoConvergence(f"Jacobi sweep limit {sweep_limit} exceeded")
    values = np.diag(A).real.copy()
    order = sorted(range(n), key=lambda k: (values[k], _vector_sort_key(V[:, k])))
    return EigenSystem(values[order], V[:, order])


@dataclass(frozen=True)
class Polynomial:
    """Dense univariate polynomial with the constant term first.

    Trailing (highest-order) zero coefficients are stripped on
    construction, so the leading effective coefficient is nonzero unless
    the polynomial is identically zero.
    """

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        c = tuple(complex(x) for x in self.coeffs)
        if not c:
            c = (0j,)
        k = len(c)
        while k > 1 and c[k - 1] == 0:
            k -= 1
        object.__setattr__(self, "coeffs", c[:k])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, np.asarray(self.coeffs))

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial((0j,))
        d = np.polynomial.polynomial.polyder(np.asarray(self.coeffs, dtype=complex))
        return Polynomial(tuple(d))

    @classmethod
    def from_roots(cls, roots) -> "Polynomial":
        """Monic polynomial with the given roots."""
        return cls(tuple(np.polynomial.polynomial.polyfromroots(roots)))


def _quadratic_roots(c0: complex, c1: complex, c2: complex):
    # Stable form: pick the sign that avoids cancellation in -c1 -/+ sqrt.
    disc = c1 * c1 - 4.0 * c2 * c0
    sq = np.sqrt(complex(disc))
    if (np.conj(c1) * sq).real >= 0.0:
        qq = -(c1 + sq) / 2.0
    else:
        qq = -(c1 - sq) / 2.0
    if qq == 0:
        r = np.sqrt(-c0 / c2)
        return np.array([r, -r])
    return np.array([qq / c2, c0 / qq])


def _cluster_average(z, coeffs):
    """Collapse root clusters onto their centroid when that lowers residuals.

    Simultaneous iterations resolve an m-fold root as m points straddling
    it at noise-limited distance; their mean is far more accurate.  The
    replacement is applied only when it does not increase the worst
    residual of the cluster, so genuinely distinct close roots are kept.
    """
    tol = 1e-6
    d = len(z)
    parent = list(range(d))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(d):
        for j in range(i + 1, d):
            if abs(z[i] - z[j]) <= tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(d):
        groups.setdefault(find(i), []).append(i)
    pv = np.abs(np.polynomial.polynomial.polyval(z, coeffs))
    out = z.copy()
    powers = np.arange(len(coeffs))
    for members in groups.values():
        if len(members) < 2:
            continue
        centroid = np.mean(z[members])
        # allowance for rounding noise in the evaluation itself
        mag = np.sum(np.abs(coeffs) * np.maximum(1.0, abs(centroid)) ** powers)
        noise = 16.0 * len(coeffs) * np.finfo(float).eps * mag
        if abs(np.polynomial.polynomial.polyval(centroid, coeffs)) <= np.max(pv[members]) + noise:
            out[members] = centroid
    return out


def poly_roots(p: Polynomial, max_iter: int = 200, newton_steps: int = 3):
    """All complex roots of ``p`` (with multiplicity), as a numpy array.

    Zero roots are deflated exactly, degrees one and two are solved in
    closed form, and higher degrees run the Aberth-Ehrlich simultaneous
    iteration from golden-angle starting points on the root-magnitude
    circle, followed by Newton polishing.

    Raises :class:`DegreeZero` for constant polynomials; a nonzero
    constant has no roots while the zero polynomial is ill-formed, and it
    is up to the caller to distinguish the two via ``p.coeffs[0]``.
    """
    if p.degree == 0:
        raise DegreeZero("constant polynomial; no root set is defined")
    c = np.asarray(p.coeffs, dtype=complex)
    nzero = 0
    while nzero < len(c) - 1 and c[nzero] == 0:
        nzero += 1
    zeros = np.zeros(nzero, dtype=complex)
    c = c[nzero:]
    d = len(c) - 1
    if d == 0:
        roots = zeros
    elif d == 1:
        roots = np.concatenate([zeros, [-c[0] / c[1]]])
    elif d == 2:
        roots = np.concatenate([zeros, _quadratic_roots(c[0], c[1], c[2])])
    else:
        roots = np.concatenate([zeros, _aberth(c, max_iter, newton_steps)])
    return np.array(sorted(roots, key=lambda r: (r.real, r.imag)))


def _aberth(c, max_iter: int, newton_steps: int):
    d = len(c) - 1
    dc = np.polynomial.polynomial.polyder(c)
    radius = (abs(c[0]) / abs(c[-1])) ** (1.0 / d)
    ks = np.arange(d)
    z = radius * np.exp(1j * (0.4 + GOLDEN_ANGLE * ks))
    kick = 0.25 * np.exp(1j * GOLDEN_ANGLE * ks)
    for _ in range(max_iter):
        pv = np.polynomial.polynomial.polyval(z, c)
        dv = np.polynomial.polynomial.polyval(z, dc)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        diff = np.where(diff == 0, 1e-30, diff)
        with np.errstate(divide="ignore", invalid="ignore"):
            S = (1.0 / diff).sum(axis=1)
            N = pv / dv
            w = N / (1.0 - N * S)
        bad = ~np.isfinite(w)
        if bad.any():
            w = np.where(bad, (1.0 + np.abs(z)) * kick, w)
        z = z - w
        if np.all(np.abs(w) <= 1e-14 * (1.0 + np.abs(z))):
            break
    for _ in range(newton_steps):
        pv = np.polynomial.polynomial.polyval(z, c)
        dv = np.polynomial.polynomial.polyval(z, dc)
        step = np.where(dv != 0, pv / np.where(dv == 0, 1.0, dv), 0.0)
        z = z - step
    return _cluster_average(z, c)


def unimodular_filter(roots, tol: float = 1e-8):
    """Keep roots within ``tol`` of the unit circle, snapped onto it.

    Survivors are renormalized to exactly unit modulus and deduplicated:
    a root closer than ``tol`` to an earlier survivor is dropped.  The
    operation is idempotent.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    out: list[complex] = []
    for r in np.asarray(roots, dtype=complex).ravel():
        m = abs(r)
        if m == 0.0 or abs(m - 1.0) > tol:
            continue
        u = r / m
        if all(abs(u - v) > tol for v in out):
            out.append(u)
    return np.array(out, dtype=complex)
