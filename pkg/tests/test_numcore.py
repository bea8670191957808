import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flatrange.numcore import (
    DegreeZero,
    NoConvergence,
    NotHermitian,
    Polynomial,
    herm_eig,
    maxnorm,
    poly_roots,
    unimodular_filter,
)

SQ2 = math.sqrt(2.0)


def random_hermitian(rng, n):
    M = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (M + M.conj().T) / 2.0


def test_herm_eig_diagonal():
    eig = herm_eig(np.diag([1.0, 2.0, 3.0]))
    assert np.allclose(eig.values, [1.0, 2.0, 3.0])
    assert np.allclose(np.abs(eig.vectors), np.eye(3))


def test_herm_eig_tridiagonal_sine_spectrum():
    # 3x3 zero/one tridiagonal: eigenvalues 2 cos(pi j / 4), descending j
    T = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    eig = herm_eig(T)
    assert np.allclose(eig.values, [-SQ2, 0.0, SQ2], atol=1e-12)


def test_herm_eig_double_top_eigenvalue():
    # companion coefficients (0, 1, 1-sqrt2, 0): Hermitian part has a
    # double maximal eigenvalue sqrt(2)/2
    A = np.zeros((4, 4), dtype=complex)
    A[0, 1] = A[1, 2] = A[2, 3] = 1.0
    A[3, 1] = -1.0
    A[3, 2] = -1.0 + SQ2
    H = (A + A.conj().T) / 2.0
    eig = herm_eig(H)
    assert abs(eig.values[-1] - SQ2 / 2) < 1e-12
    assert abs(eig.values[-2] - SQ2 / 2) < 1e-12
    assert eig.values[-3] < SQ2 / 2 - 0.1


def test_herm_eig_rejects_nonhermitian():
    with pytest.raises(NotHermitian):
        herm_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))
    with pytest.raises(NotHermitian):
        herm_eig(np.zeros((2, 3)))


def test_herm_eig_sweep_limit():
    M = random_hermitian(np.random.default_rng(0), 5)
    with pytest.raises(NoConvergence):
        herm_eig(M, sweep_limit=0)


@pytest.mark.parametrize("n", [2, 3, 5, 8, 12])
def test_herm_eig_invariants(n):
    rng = np.random.default_rng(n)
    H = random_hermitian(rng, n)
    scale = maxnorm(H)
    eig = herm_eig(H)
    assert np.all(np.diff(eig.values) >= 0)
    for k in range(n):
        v = eig.vectors[:, k]
        assert abs(np.linalg.norm(v) - 1.0) <= 1e-12
        assert maxnorm(H @ v - eig.values[k] * v) <= 1e-10 * scale
    G = eig.vectors.conj().T @ eig.vectors
    assert maxnorm(G - np.eye(n)) <= 1e-10
    # reconstruction
    R = eig.vectors @ np.diag(eig.values) @ eig.vectors.conj().T
    assert maxnorm(R - H) <= 1e-9 * scale
    # independent oracle: LAPACK eigenvalues
    assert np.allclose(eig.values, np.linalg.eigvalsh(H), atol=1e-10 * scale)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=2, max_value=7), st.integers(min_value=0, max_value=10**6))
def test_herm_eig_reconstruction_property(n, seed):
    H = random_hermitian(np.random.default_rng(seed), n)
    eig = herm_eig(H)
    R = eig.vectors @ np.diag(eig.values) @ eig.vectors.conj().T
    assert maxnorm(R - H) <= 1e-9 * max(maxnorm(H), 1e-3)


def test_polynomial_strips_trailing_zeros():
    p = Polynomial((1.0, 2.0, 0.0, 0.0))
    assert p.degree == 1
    assert p.coeffs == (1.0 + 0j, 2.0 + 0j)
    assert Polynomial((0.0,)).is_zero


def test_poly_roots_factored_quadratic():
    roots = poly_roots(Polynomial((-1.0, 0.0, 1.0)))  # w^2 - 1
    assert np.allclose(sorted(roots, key=lambda z: z.real), [-1.0, 1.0], atol=1e-12)


def test_poly_roots_quartic_known_roots():
    # w^4 root set {1, i, -2+i, -1/3-2i/3} via its quartic with the
    # coefficients that also pass through the detector
    a0 = (9 + 12j) / 25
    a1 = 2 * SQ2 * (7 + 1j) / 25
    a2 = -4 * (3 + 4j) / 25
    p = Polynomial((-1.0, 0.0, a2, SQ2 * a1, a0))
    roots = poly_roots(p)
    expected = [1.0 + 0j, 1j, -2 + 1j, -1 / 3 - 2j / 3]
    for e in expected:
        assert min(abs(roots - e)) < 1e-9


def test_poly_roots_residual_oracle():
    rng = np.random.default_rng(42)
    for _ in range(100):
        c = rng.normal(size=7) + 1j * rng.normal(size=7)
        p = Polynomial(tuple(c))
        roots = poly_roots(p)
        assert len(roots) == p.degree
        for r in roots:
            bound = 1e-9 * sum(abs(ck) * max(1.0, abs(r)) ** k for k, ck in enumerate(p.coeffs))
            assert abs(p(r)) <= bound


def test_poly_roots_zero_deflation():
    roots = poly_roots(Polynomial((0.0, 0.0, 0.0, 2.0, 1.0)))  # z^3 (z + 2)
    assert sum(1 for r in roots if r == 0) == 3
    assert min(abs(roots + 2.0)) < 1e-12


def test_poly_roots_double_root_cluster():
    # -(w-1)^2 (2w+1) scaled: the double root must come back as two
    # copies of a high-accuracy value, not a straddling pair
    s = math.sin(math.pi / 3)
    p = Polynomial((-s, 0.0, 3 * s, -2 * s))
    roots = poly_roots(p)
    ones = [r for r in roots if abs(r - 1) < 1e-3]
    assert len(ones) == 2
    assert abs(ones[0] - ones[1]) == 0.0
    assert abs(ones[0] - 1.0) < 1e-10
    assert min(abs(r + 0.5) for r in roots) < 1e-12


def test_poly_roots_keeps_close_distinct_roots():
    p = Polynomial.from_roots([1.0, 1.0 + 1e-5, -3.0])
    roots = poly_roots(p)
    rs = sorted(r.real for r in roots if abs(r - 1) < 1e-3)
    assert abs(rs[1] - rs[0]) > 5e-6


def test_poly_roots_degree_zero():
    with pytest.raises(DegreeZero):
        poly_roots(Polynomial((3.0,)))


def test_poly_roots_reexpansion_property():
    rng = np.random.default_rng(7)
    for _ in range(50):
        deg = rng.integers(2, 9)
        while True:
            roots = rng.normal(size=deg) + 1j * rng.normal(size=deg)
            sep = min(
                (abs(roots[i] - roots[j]) for i in range(deg) for j in range(i + 1, deg)),
                default=1.0,
            )
            if sep > 0.2:
                break
        p = Polynomial.from_roots(roots)
        rec = Polynomial.from_roots(poly_roots(p))
        scale = max(abs(c) for c in p.coeffs)
        assert max(abs(np.array(rec.coeffs) - np.array(p.coeffs))) <= 1e-7 * scale


def test_unimodular_filter_known_set():
    roots = np.array([1.0 + 0j, 1j, -2 + 1j, -1 / 3 - 2j / 3])
    kept = unimodular_filter(roots, 1e-8)
    assert len(kept) == 2
    assert min(abs(kept - 1.0)) < 1e-12
    assert min(abs(kept - 1j)) < 1e-12


def test_unimodular_filter_empty_and_renormalization():
    assert len(unimodular_filter([], 1e-8)) == 0
    kept = unimodular_filter([0.9999999999 * np.exp(0.3j)], 1e-8)
    assert len(kept) == 1
    # r/|r| is unit up to an ulp
    assert abs(abs(kept[0]) - 1.0) <= 5e-16


@settings(max_examples=30, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3.0, allow_nan=False, allow_infinity=False), max_size=8))
def test_unimodular_filter_subset_and_idempotent(values):
    kept = unimodular_filter(values, 1e-6)
    for u in kept:
        assert abs(abs(u) - 1.0) <= 1e-15
        assert min((abs(u - v / abs(v)) for v in values if abs(v) > 0), default=1.0) <= 1e-6
    again = unimodular_filter(kept, 1e-6)
    assert len(again) == len(kept)
    if len(kept):
        assert np.allclose(again, kept)
