"""Brute-force boundary oracle via the support function.

Independent of the algebraic detector: the boundary of the range is
swept by maximizing ``Re(e^{-i theta} z)`` over the range for a dense
grid of directions, flat portions reveal themselves as directions where
the top eigenvalue of ``Re(e^{-i theta} A)`` degenerates, and the
segments are recovered from the compression of the imaginary part.
CSV and SVG emitters reproduce the classic numerical-range plots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .companion import CompanionSpec, build_matrix, char_coeffs
from .flatness import scal
from .numcore import herm_eig, maxnorm, poly_roots

__all__ = [
    "BoundarySample",
    "EmptyInput",
    "EmpiricalFlat",
    "emit_csv",
    "emit_svg",
    "empirical_flats",
    "sample_boundary",
    "support",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


class EmptyInput(ValueError):
    """An emitter was handed no samples."""


@dataclass(frozen=True)
class BoundarySample:
    """Support-function probe of the range in one direction.

    ``support = lambda_max(Re(e^{-i theta} A))`` is the signed distance
    of the supporting line, ``point`` is the boundary point reached by a
    top eigenvector, and ``eigengap`` is the distance between the two
    largest eigenvalues (zero gaps mark potential flat portions).
    """

    theta: float
    support: float
    point: complex
    eigengap: float


@dataclass(frozen=True)
class EmpiricalFlat:
    """A flat portion found by gap refinement, with its segment."""

    theta_star: float
    segment: tuple[complex, complex]
    length: float


def _rotated_real(A, theta: float):
    w = complex(math.cos(theta), -math.sin(theta))  # e^{-i theta}
    return (w * A + np.conj(w) * A.conj().T) / 2.0


def _sample_at(A, theta: float) -> BoundarySample:
    eig = herm_eig(_rotated_real(A, theta))
    x = eig.vectors[:, -1]
    point = scal(A @ x, x)
    gap = float(eig.values[-1] - eig.values[-2])
    return BoundarySample(theta, float(eig.values[-1]), point, gap)


def support(spec: CompanionSpec, theta: float) -> BoundarySample:
    """One support-function sample of the boundary at direction ``theta``."""
    return _sample_at(build_matrix(spec), theta)


def sample_boundary(spec: CompanionSpec, m: int) -> list[BoundarySample]:
    """``m`` equally spaced samples at ``theta_k = 2 pi k / m``."""
    if m < 8:
        raise ValueError("need at least 8 samples")
    A = build_matrix(spec)
    return [_sample_at(A, 2.0 * math.pi * k / m) for k in range(m)]


def _gap_at(A, theta: float) -> float:
    v = herm_eig(_rotated_real(A, theta)).values
    return float(v[-1] - v[-2])


def _refine_gap(A, lo: float, hi: float, target: float, scale: float, max_iter: int = 60):
    """Golden-section minimization of the eigengap over [lo, hi]."""
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = _gap_at(A, c), _gap_at(A, d)
    best_t, best_g = (c, fc) if fc <= fd else (d, fd)
    for i in range(max_iter):
        if best_g <= target:
            break
        if i >= 25 and best_g > 1e-3 * scale:
            break  # a genuine degeneracy would have collapsed by now
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = _gap_at(A, c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = _gap_at(A, d)
        if fc < best_g:
            best_t, best_g = c, fc
        if fd < best_g:
            best_t, best_g = d, fd
    return best_t, best_g


def empirical_flats(samples: list[BoundarySample], spec: CompanionSpec,
                    gap_tol: float | None = None) -> list[EmpiricalFlat]:
    """Flat portions detected from a boundary sweep.

    Local minima of the sampled eigengap are refined by golden-section
    search (to a gap of 1e-11 or 60 iterations); a refined direction is
    accepted when its gap falls below ``gap_tol`` (default
    ``1e-6 * maxnorm(A)``).  The top two eigenvectors there span the
    degenerate eigenspace, and the compression of the rotated imaginary
    part yields the segment, exactly as the algebraic detector computes
    it.  Refinements closer than one grid step are merged, and scalar
    compressions (coincident endpoints) are dropped.
    """
    if not samples:
        return []
    A = build_matrix(spec)
    scale = maxnorm(A)
    if gap_tol is None:
        gap_tol = 1e-6 * scale
    m = len(samples)
    step = 2.0 * math.pi / m
    # At one grid step from a flat direction the gap is at most about
    # (segment length) * step, so this trigger cannot miss a real flat.
    trigger = 4.0 * math.pi * scale * spec.n / m
    gaps = np.array([s.eigengap for s in samples])
    thetas = np.array([s.theta for s in samples])

    found: list[tuple[float, float]] = []
    for k in range(m):
        g = gaps[k]
        if g > trigger:
            continue
        if g <= gaps[(k - 1) % m] and g <= gaps[(k + 1) % m]:
            lo, hi = thetas[k] - step, thetas[k] + step
            t_star, g_star = _refine_gap(A, lo, hi, 1e-11, scale)
            if g_star <= gap_tol:
                found.append((t_star % (2.0 * math.pi), g_star))

    found.sort()
    merged: list[float] = []
    for t, _ in found:
        if all(min(abs(t - u), 2.0 * math.pi - abs(t - u)) > step for u in merged):
            merged.append(t)

    flats: list[EmpiricalFlat] = []
    for t in merged:
        eig = herm_eig(_rotated_real(A, t))
        s_val = eig.values[-1]
        q1 = eig.vectors[:, -1]
        q2 = eig.vectors[:, -2]
        w = complex(math.cos(t), -math.sin(t))
        M = (w * A - np.conj(w) * A.conj().T) / 2j
        C = np.array(
            [
                [scal(M @ q1, q1), scal(M @ q2, q1)],
                [scal(M @ q1, q2), scal(M @ q2, q2)],
            ]
        )
        mu = herm_eig(C).values
        ends = (np.conj(w) * (s_val + 1j * mu[0]), np.conj(w) * (s_val + 1j * mu[1]))
        length = float(mu[1] - mu[0])
        if length > 1e-8 * (1.0 + scale):
            flats.append(EmpiricalFlat(t, (complex(ends[0]), complex(ends[1])), length))
    return flats


def _fmt(x: float) -> str:
    return format(float(x), ".12g")


def emit_csv(samples: list[BoundarySample]) -> str:
    """Boundary sweep as CSV text: ``theta,re,im,support,eigengap``."""
    if not samples:
        raise EmptyInput("no samples to emit")
    lines = ["theta,re,im,support,eigengap"]
    for s in samples:
        lines.append(",".join(_fmt(v) for v in (s.theta, s.point.real, s.point.imag, s.support, s.eigengap)))
    return "\n".join(lines) + "\n"


def _svg_num(x: float) -> str:
    return format(float(x), ".6g")


def emit_svg(samples: list[BoundarySample], flats: list[EmpiricalFlat],
             eigenvalues=(), y_down: bool = False) -> str:
    """Boundary outline as SVG text.

    Draws the closed boundary polyline, the unit circle as a gridline,
    markers at the given eigenvalues, and each flat segment in a
    distinct stroke.  Mathematical orientation (y axis up) by default;
    ``y_down`` switches to raw screen coordinates.
    """
    if not samples:
        raise EmptyInput("no samples to emit")
    flip = 1.0 if y_down else -1.0
    pts = [(s.point.real, flip * s.point.imag) for s in samples]
    xs = [p[0] for p in pts] + [-1.0, 1.0] + [complex(e).real for e in eigenvalues]
    ys = [p[1] for p in pts] + [-1.0, 1.0] + [flip * complex(e).imag for e in eigenvalues]
    lo_x, hi_x, lo_y, hi_y = min(xs), max(xs), min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-9)
    pad = 0.05 * span
    view = (lo_x - pad, lo_y - pad, (hi_x - lo_x) + 2 * pad, (hi_y - lo_y) + 2 * pad)
    w_major = span / 250.0
    out = [
        '<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">'.format(*(_svg_num(v) for v in view)),
        f'<circle class="unit-circle" cx="0" cy="0" r="1" fill="none" stroke="#999999" '
        f'stroke-width="{_svg_num(w_major / 2)}" stroke-dasharray="{_svg_num(4 * w_major)} {_svg_num(4 * w_major)}"/>',
        '<polygon class="boundary" fill="none" stroke="#1f77b4" stroke-width="{}" points="{}"/>'.format(
            _svg_num(w_major), " ".join(f"{_svg_num(x)},{_svg_num(y)}" for x, y in pts)
        ),
    ]
    for e in eigenvalues:
        e = complex(e)
        out.append(
            f'<circle class="eigenvalue" cx="{_svg_num(e.real)}" cy="{_svg_num(flip * e.imag)}" '
            f'r="{_svg_num(2.0 * w_major)}" fill="#2ca02c"/>'
        )
    for f in flats:
        p, q = f.segment
        out.append(
            f'<line class="flat-segment" x1="{_svg_num(p.real)}" y1="{_svg_num(flip * p.imag)}" '
            f'x2="{_svg_num(q.real)}" y2="{_svg_num(flip * q.imag)}" '
            f'stroke="#d62728" stroke-width="{_svg_num(2.0 * w_major)}"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def spectrum(spec: CompanionSpec):
    """Eigenvalues of the companion matrix (for plot markers)."""
    return poly_roots(char_coeffs(spec))
