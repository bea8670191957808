"""Companion-matrix domain model.

A companion matrix is determined by the coefficients of its (monic)
characteristic polynomial; the constant term comes first everywhere in
this package.  Besides the matrix itself this module builds the
structural objects used by the flat-portion criteria: the tridiagonal
sine-eigenbasis of the leading principal block, the rotation similarity
that reduces an arbitrary supporting direction to the vertical one, the
coupling coefficients of the last row in that basis, and the Hermitian
arrowhead form of the real part.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numcore import Polynomial

__all__ = [
    "CompanionSpec",
    "GammaVector",
    "arrowhead_H",
    "build_matrix",
    "char_coeffs",
    "chebyshev_basis",
    "gamma_vector",
    "rotate",
    "tridiagonal_T",
]


@dataclass(frozen=True)
class CompanionSpec:
    """Degree ``n`` and coefficients ``a_0..a_{n-1}``, constant term first.

    The companion matrix has ones on the superdiagonal and
    ``(-a_0, ..., -a_{n-1})`` as its last row; its characteristic
    polynomial is ``z^n + a_{n-1} z^{n-1} + ... + a_0``.
    """

    n: int
    a: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(complex(x) for x in self.a))
        if self.n < 2:
            raise ValueError(f"need n >= 2, got {self.n}")
        if len(self.a) != self.n:
            raise ValueError(f"expected {self.n} coefficients, got {len(self.a)}")

    @classmethod
    def from_coeffs(cls, coeffs) -> "CompanionSpec":
        coeffs = tuple(complex(x) for x in coeffs)
        return cls(len(coeffs), coeffs)

    @property
    def max_coeff(self) -> float:
        return max(abs(x) for x in self.a)


@dataclass(frozen=True)
class GammaVector:
    """Coupling coefficients gamma_1..gamma_{n-1} at a supporting direction.

    ``gamma[j-1]`` couples the j-th sine basis vector to the last row of
    the rotated companion matrix; gamma_1 = 0 is exactly the first
    necessary condition for a flat portion with rotation ``omega``.
    """

    omega: complex
    gamma: tuple[complex, ...]


def _unit(omega: complex) -> complex:
    omega = complex(omega)
    m = abs(omega)
    if m == 0.0:
        raise ValueError("omega must be nonzero")
    return omega / m


def build_matrix(spec: CompanionSpec) -> np.ndarray:
    """The n-by-n companion matrix of ``spec``."""
    n = spec.n
    A = np.zeros((n, n), dtype=complex)
    for k in range(n - 1):
        A[k, k + 1] = 1.0
    A[n - 1, :] = [-x for x in spec.a]
    return A


def char_coeffs(spec: CompanionSpec) -> Polynomial:
    """Monic characteristic polynomial, constant term first."""
    return Polynomial(spec.a + (1.0 + 0j,))


def rotate(spec: CompanionSpec, omega: complex) -> CompanionSpec:
    """Coefficients of the companion matrix similar to ``omega * A``.

    With ``b_j = a_j * omega^(n-j)`` the matrix ``omega * A`` equals
    ``Omega^{-1} B Omega`` for the unitary ``Omega = diag(1, omega, ...,
    omega^{n-1})``; ``omega`` is snapped to unit modulus first.
    """
    w = _unit(omega)
    n = spec.n
    return CompanionSpec(n, tuple(spec.a[j] * w ** (n - j) for j in range(n)))


def tridiagonal_T(n: int) -> np.ndarray:
    """(n-1)-by-(n-1) tridiagonal matrix with zero diagonal and unit off-diagonals."""
    T = np.zeros((n - 1, n - 1))
    for k in range(n - 2):
        T[k, k + 1] = 1.0
        T[k + 1, k] = 1.0
    return T


def chebyshev_basis(n: int):
    """Sine eigenbasis of :func:`tridiagonal_T` and its involution matrix.

    Returns ``(vectors, V)`` where column ``j-1`` of ``vectors`` is
    ``v_j = (sin(pi j k / n))_{k=1..n-1}`` with ``T v_j = 2 cos(pi j / n)
    v_j`` and ``|v_j|^2 = n/2``, and ``V = sqrt(2/n) [sin(pi j k / n)]``
    is the real symmetric involution (``V @ V = I``) that diagonalizes T.
    """
    if n < 2:
        raise ValueError("need n >= 2")
    j = np.arange(1, n)
    vectors = np.sin(np.pi * np.outer(j, j) / n)
    return vectors, np.sqrt(2.0 / n) * vectors


def gamma_vector(spec: CompanionSpec, omega: complex) -> GammaVector:
    """Coupling vector for the direction ``omega`` (snapped to |omega|=1).

    gamma_j = (sin(pi j (n-1)/n) - sum_k a_k omega^(n-k) sin(pi j (k+1)/n))
              / sqrt(2 n),   j = 1..n-1, k = 0..n-2.
    """
    w = _unit(omega)
    n = spec.n
    j = np.arange(1, n)
    k = np.arange(0, n - 1)
    b = np.array([spec.a[kk] * w ** (n - kk) for kk in k])
    S = np.sin(np.pi * np.outer(j, k + 1) / n)
    g = (np.sin(np.pi * j * (n - 1) / n) - S @ b) / np.sqrt(2.0 * n)
    return GammaVector(w, tuple(complex(x) for x in g))


def arrowhead_H(spec: CompanionSpec, omega: complex) -> np.ndarray:
    """Hermitian arrowhead matrix unitarily similar to ``Re(omega * A)``.

    Diagonal ``(cos(pi/n), ..., cos(pi (n-1)/n), -Re(a_{n-1} omega))``
    with the coupling vector (conjugated) in the last column and the
    vector itself in the last row.  Its spectrum equals the spectrum of
    the Hermitian part of ``omega * build_matrix(spec)``.
    """
    w = _unit(omega)
    n = spec.n
    g = gamma_vector(spec, w).gamma
    H = np.zeros((n, n), dtype=complex)
    for j in range(1, n):
        H[j - 1, j - 1] = np.cos(np.pi * j / n)
        H[n - 1, j - 1] = g[j - 1]
        H[j - 1, n - 1] = np.conj(g[j - 1])
    H[n - 1, n - 1] = -(spec.a[n - 1] * w).real
    return H
