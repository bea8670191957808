"""Closed-form criteria for n = 2, 3, 4 and the unitary-reducibility test.

These small-n shortcuts are independent routes to the same verdicts as
the general detector and are used to cross-validate it.  The module also
hosts the seeded random-spec samplers and the search harness that sweeps
them looking for forbidden flat counts.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .companion import CompanionSpec, char_coeffs
from .flatness import DetectionTolerances, analyze, candidate_at, confirm_flat
from .numcore import Polynomial, poly_roots, unimodular_filter

__all__ = [
    "ClosedFormReport",
    "ReducibilityVerdict",
    "SAMPLER_KINDS",
    "WrongDimension",
    "criterion_3x3",
    "criterion_4x4",
    "normality_2x2",
    "reducibility",
    "sample_spec",
    "search_flat_counts",
]

FAMILY_TOL = 1e-9


class WrongDimension(ValueError):
    """The closed form asked for applies to a different matrix size."""


@dataclass(frozen=True)
class ReducibilityVerdict:
    """Outcome of the root-of-unity eigenvalue-pattern test.

    A companion matrix is unitarily reducible iff its spectrum equals
    ``{eta w_j : j in J1} U {conj(eta)^-1 w_j : j in J2}`` for some
    nonzero ``eta`` and a partition ``J1 U J2`` of the n-th roots of
    unity ``w_j = exp(2 pi i j / n)``, both parts nonempty.  ``unitary``
    is set when ``|eta| = 1``.
    """

    reducible: bool
    eta: complex | None = None
    partition: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    unitary: bool = False


@dataclass(frozen=True)
class ClosedFormReport:
    """Closed-form flat-count prediction for n = 3 or n = 4."""

    n: int
    unimodular_solutions: tuple[complex, ...]
    tautology: bool
    exception_hit: bool
    predicted_flat_count: int


def _wrap_angle(x: float) -> float:
    return (x + math.pi) % (2.0 * math.pi) - math.pi


def normality_2x2(spec: CompanionSpec) -> bool:
    """Whether the 2x2 companion matrix is normal.

    True iff |a_0| = 1 and either a_1 = 0 or 2 arg(a_1) - arg(a_0) = pi
    (mod 2 pi); exactly then the range degenerates to a line segment.
    """
    if spec.n != 2:
        raise WrongDimension(f"normality_2x2 needs n=2, got n={spec.n}")
    a0, a1 = spec.a
    if abs(abs(a0) - 1.0) > FAMILY_TOL:
        return False
    if a1 == 0:
        return True
    return abs(_wrap_angle(2.0 * cmath.phase(a1) - cmath.phase(a0) - math.pi)) <= FAMILY_TOL


def _dedup_units(values, tol: float = 1e-6):
    out: list[complex] = []
    for w in values:
        if all(abs(w - v) > tol for v in out):
            out.append(complex(w))
    return out


def _confirmed_count(spec: CompanionSpec, solutions, tol: DetectionTolerances) -> int:
    count = 0
    for w in solutions:
        cand = candidate_at(spec, w, tol)
        if cand.passed_necessary and confirm_flat(spec, cand, tol) is not None:
            count += 1
    return count


def criterion_3x3(spec: CompanionSpec, tol: DetectionTolerances | None = None) -> ClosedFormReport:
    """Closed-form flat-portion criterion for 3x3 companion matrices.

    The two necessary conditions reduce to ``a_0 w^3 + a_1 w^2 = 1`` and
    ``2 Re(a_2 w) = |a_0|^2 - 1``.  The second is a tautology when
    ``a_2 = 0, |a_0| = 1``, infeasible when ``2|a_2| < ||a_0|^2 - 1|``,
    and otherwise pins ``w`` to one of two explicitly unimodular values.
    Solutions predict one portion each unless the coefficients sit on the
    exceptional one-parameter family ``a_0 = -2 z^3, a_1 = 3 z^2
    conj(u), a_2 = (3/2) z u`` (|z| = 1, u a cube root of 1), for which
    the count is zero.
    """
    if spec.n != 3:
        raise WrongDimension(f"criterion_3x3 needs n=3, got n={spec.n}")
    tol = tol or DetectionTolerances()
    a0, a1, a2 = spec.a
    res_tol = tol.cond2_tol(spec)
    p_c1 = Polynomial((-1.0 + 0j, 0j, a1, a0))

    exception_hit = False
    if a2 != 0:
        u = (2.0 / 3.0) * a2
        exception_hit = (
            abs(abs(a2) - 1.5) <= FAMILY_TOL
            and abs(u**3 + a0 / 2.0) <= FAMILY_TOL
            and abs(a1 + 9.0 * a0 / (4.0 * a2)) <= FAMILY_TOL
        )

    gap = abs(a0) ** 2 - 1.0
    tautology = abs(a2) <= FAMILY_TOL and abs(gap) <= FAMILY_TOL
    if tautology:
        sols = _dedup_units(unimodular_filter(poly_roots(p_c1), tol.unimodular), tol.dedup)
    elif 2.0 * abs(a2) < abs(gap):
        sols = []
    else:
        root = cmath.sqrt(4.0 * abs(a2) ** 2 - gap * gap)
        pair = [(gap + 1j * root) / (2.0 * a2), (gap - 1j * root) / (2.0 * a2)]
        sols = _dedup_units([w for w in pair if abs(p_c1(w)) <= res_tol], tol.dedup)
    predicted = 0 if exception_hit else len(sols)
    return ClosedFormReport(3, tuple(sols), tautology, exception_hit, predicted)


def criterion_4x4(spec: CompanionSpec, tol: DetectionTolerances | None = None) -> ClosedFormReport:
    """Closed-form flat-portion criterion for 4x4 companion matrices.

    Candidates are the unimodular roots of ``a_0 w^4 + sqrt(2) a_1 w^3 +
    a_2 w^2 = 1``.  Unless the tautology ``a_3 = a_0 conj(a_1),
    |a_0|^2 + |a_1|^2 = 1`` holds, a candidate must also coincide with
    one of the two explicit solutions of ``sqrt(2) Re((a_3 - a_0
    conj(a_1)) w) = |a_0|^2 + |a_1|^2 - 1``; survivors then go through
    the compression confirmation of the general detector.
    """
    if spec.n != 4:
        raise WrongDimension(f"criterion_4x4 needs n=4, got n={spec.n}")
    tol = tol or DetectionTolerances()
    a0, a1, a2, a3 = spec.a
    d = a3 - a0 * a1.conjugate()
    gap = abs(a0) ** 2 + abs(a1) ** 2 - 1.0
    tautology = abs(d) <= FAMILY_TOL and abs(gap) <= FAMILY_TOL

    p_c1 = Polynomial((-1.0 + 0j, 0j, a2, math.sqrt(2.0) * a1, a0))
    if p_c1.degree == 0:
        uni: list[complex] = []
    else:
        uni = _dedup_units(unimodular_filter(poly_roots(p_c1), tol.unimodular), tol.dedup)

    if tautology:
        sols = uni
    elif abs(d) < abs(gap) / math.sqrt(2.0):
        sols = []
    else:
        root = cmath.sqrt(2.0 * abs(d) ** 2 - gap * gap)
        pair = [(gap + 1j * root) / (math.sqrt(2.0) * d), (gap - 1j * root) / (math.sqrt(2.0) * d)]
        sols = [w for w in uni if min(abs(w - pair[0]), abs(w - pair[1])) <= 1e-8]
    predicted = _confirmed_count(spec, sols, tol)
    return ClosedFormReport(4, tuple(sols), tautology, False, predicted)


def reducibility(spec: CompanionSpec, tol: float = 1e-8) -> ReducibilityVerdict:
    """Unitary-reducibility test from the eigenvalue pattern.

    The spectrum must consist of n-th roots of unity scaled by ``eta``
    and ``1/conj(eta)`` with the root indices forming an exact partition.
    A singular companion matrix is always irreducible (zero cannot be a
    scaled root of unity), so any eigenvalue of modulus <= tol settles
    the verdict immediately.

    Phases are matched through a circular mean of ``arg(lambda^n)`` to
    avoid branch-cut artifacts, and the two modulus groups pair through
    the relative test ``|r r' - 1| <= tol (1 + r^2)``.
    """
    ev = poly_roots(char_coeffs(spec))
    mods = np.abs(ev)
    if np.any(mods <= tol):
        return ReducibilityVerdict(False)
    n = spec.n
    units = (ev / mods) ** n
    theta = cmath.phase(complex(np.sum(units))) / n

    indices = []
    for lam in ev:
        k = round((cmath.phase(lam) - theta) * n / (2.0 * math.pi)) % n
        if abs(_wrap_angle(cmath.phase(lam) - theta - 2.0 * math.pi * k / n)) > tol:
            return ReducibilityVerdict(False)
        indices.append(n if k == 0 else k)
    if sorted(indices) != list(range(1, n + 1)):
        return ReducibilityVerdict(False)

    r = float(np.max(mods))
    j1, j2 = [], []
    for lam, j in zip(ev, indices):
        m = abs(lam)
        if abs(m - r) <= tol * (1.0 + r):
            j1.append(j)
        elif abs(m * r - 1.0) <= tol * (1.0 + r * r):
            j2.append(j)
        else:
            return ReducibilityVerdict(False)
    eta = r * cmath.exp(1j * theta)
    unitary = abs(r - 1.0) <= tol
    if not j2:
        if not unitary:
            return ReducibilityVerdict(False)
        # With |eta| = 1 the two groups coincide and any nonempty split works.
        j1s = sorted(j1)
        j1, j2 = j1s[:1], j1s[1:]
    return ReducibilityVerdict(True, eta, (tuple(sorted(j1)), tuple(sorted(j2))), unitary)


# ----------------------------------------------------------------------
# Random spec samplers and the forbidden-count search.
# ----------------------------------------------------------------------

SAMPLER_KINDS = (
    "gauss_half",
    "gauss_one",
    "gauss_two",
    "annulus",
    "tau4_random",
    "tau4_pinned",
    "biquadratic",
)


def _gauss(rng, n: int, sigma: float) -> CompanionSpec:
    z = rng.normal(scale=sigma, size=n) + 1j * rng.normal(scale=sigma, size=n)
    return CompanionSpec.from_coeffs(z)


def _annulus(rng, n: int) -> CompanionSpec:
    mod = rng.uniform(0.5, 1.5, size=n)
    ang = rng.uniform(0.0, 2.0 * math.pi, size=n)
    return CompanionSpec.from_coeffs(mod * np.exp(1j * ang))


def _unit_from(rng) -> complex:
    return cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi))


def _tau4_pair(rng) -> tuple[complex, complex]:
    # |a0|^2 + |a1|^2 = 1 exactly, bounded away from the poles.
    psi = rng.uniform(0.15, math.pi / 2.0 - 0.15)
    return math.cos(psi) * _unit_from(rng), math.sin(psi) * _unit_from(rng)


def _tau4_random(rng, n: int) -> CompanionSpec:
    a0, a1 = _tau4_pair(rng)
    a2 = rng.normal() + 1j * rng.normal()
    return CompanionSpec.from_coeffs([a0, a1, a2, a0 * np.conj(a1)])


def _tau4_pinned(rng, n: int) -> CompanionSpec:
    # Same stratum, but with one candidate direction planted on the circle.
    a0, a1 = _tau4_pair(rng)
    u = _unit_from(rng)
    a2 = (1.0 - a0 * u**4 - math.sqrt(2.0) * a1 * u**3) * u**-2
    return CompanionSpec.from_coeffs([a0, a1, a2, a0 * np.conj(a1)])


def _biquadratic(rng, n: int) -> CompanionSpec:
    # Four planted unimodular candidate directions {+-u, +-v}; the matrix
    # is unitarily reducible with centrally symmetric range.
    while True:
        u, v = _unit_from(rng), _unit_from(rng)
        if min(abs(u - v), abs(u + v)) > 0.05:
            break
    cu, cv = np.conj(u) ** 2, np.conj(v) ** 2
    return CompanionSpec.from_coeffs([-cu * cv, 0.0, cu + cv, 0.0])


def _pinned_necessary_3(rng) -> CompanionSpec:
    # n = 3: plant a direction satisfying both necessary conditions.
    w = _unit_from(rng)
    a0 = rng.normal() + 1j * rng.normal()
    a1 = (1.0 - a0 * w**3) * np.conj(w) ** 2
    a2 = ((abs(a0) ** 2 - 1.0) / 2.0 + 1j * rng.normal()) * np.conj(w)
    return CompanionSpec.from_coeffs([a0, a1, a2])


def sample_spec(rng, n: int, kind: str) -> CompanionSpec:
    """Draw one random spec of size ``n`` from the named distribution.

    The constrained kinds exist because the interesting strata (the
    tautology surface, planted unimodular candidates) have measure zero
    under generic sampling and would never be reached otherwise.  Kinds
    that only make sense for n = 4 fall back to a planted-candidate or
    Gaussian draw for other sizes.
    """
    if kind == "gauss_half":
        return _gauss(rng, n, 0.5)
    if kind == "gauss_one":
        return _gauss(rng, n, 1.0)
    if kind == "gauss_two":
        return _gauss(rng, n, 2.0)
    if kind == "annulus":
        return _annulus(rng, n)
    if kind in ("tau4_random", "tau4_pinned", "biquadratic"):
        if n == 4:
            return {"tau4_random": _tau4_random, "tau4_pinned": _tau4_pinned, "biquadratic": _biquadratic}[kind](rng, n)
        if n == 3:
            return _pinned_necessary_3(rng)
        return _gauss(rng, n, 1.0)
    raise ValueError(f"unknown sampler kind {kind!r}")


def _trial_rng(seed: int, index: int):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, index])))


def _run_shard(args) -> tuple[dict[int, int], list[int]]:
    seed, start, stop, n = args
    hist: dict[int, int] = {}
    violations: list[int] = []
    for t in range(start, stop):
        rng = _trial_rng(seed, t)
        spec = sample_spec(rng, n, SAMPLER_KINDS[t % len(SAMPLER_KINDS)])
        count = analyze(spec).flat_count
        hist[count] = hist.get(count, 0) + 1
        if n == 4 and count == 3:
            violations.append(t)
    return hist, violations


def search_flat_counts(n: int, trials: int, seed: int, workers: int | None = None):
    """Histogram of flat counts over seeded random specs.

    Every trial derives its own generator from ``(seed, trial index)``
    and cycles deterministically through the sampler kinds, so the result
    does not depend on the number of workers.  Returns ``(histogram,
    violations)`` where ``violations`` lists the indices of 4x4 trials
    that produced the forbidden count of three.
    """
    if workers is None:
        workers = int(os.environ.get("FLATRANGE_THREADS", "1") or "1")
    workers = max(1, min(workers, os.cpu_count() or 1, trials or 1))
    hist: dict[int, int] = {}
    violations: list[int] = []
    if workers == 1 or trials < 64:
        shards = [(seed, 0, trials, n)]
        results = map(_run_shard, shards)
    else:
        step = (trials + workers - 1) // workers
        shards = [(seed, lo, min(lo + step, trials), n) for lo in range(0, trials, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_shard, shards))
    for h, v in results:
        for k, c in h.items():
            hist[k] = hist.get(k, 0) + c
        violations.extend(v)
    return dict(sorted(hist.items())), sorted(violations)
