"""Command-line front end.

Subcommands: ``analyze`` (flat-portion report as JSON), ``boundary``
(support-function sweep to CSV and optionally SVG), ``check34``
(closed-form criteria for n = 3, 4 cross-checked against the general
detector), ``reduce`` (unitary-reducibility verdict), and ``search``
(seeded random sweep asserting the forbidden 4x4 flat count never
occurs).

Exit codes: 0 success, 1 search property violation, 2 parse or
configuration error, 3 internal numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import dataclass

from .boundary import emit_csv, emit_svg, empirical_flats, sample_boundary, spectrum
from .companion import CompanionSpec
from .flatness import AnalysisReport, DetectionTolerances, analyze
from .numcore import NoConvergence
from .special import WrongDimension, criterion_3x3, criterion_4x4, reducibility, search_flat_counts

__all__ = ["DimensionError", "JobConfig", "ParseError", "main", "parse_coeffs", "render_spec", "run"]


class ParseError(ValueError):
    """Malformed coefficient input; carries the character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DimensionError(ValueError):
    """Coefficient list too short to define a companion matrix."""


_NUMBER = re.compile(r"\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?")


def _parse_literal(text: str, base: int) -> complex:
    """One complex literal: a sum of terms like ``2``, ``-1.5i``, ``sqrt2``."""
    s = text
    pos = 0
    total = 0j
    first = True
    while True:
        while pos < len(s) and s[pos].isspace():
            pos += 1
        if pos >= len(s):
            if first:
                raise ParseError("empty coefficient", base + pos)
            return total
        sign = 1.0
        if s[pos] in "+-":
            sign = -1.0 if s[pos] == "-" else 1.0
            pos += 1
            while pos < len(s) and s[pos].isspace():
                pos += 1
        elif not first:
            raise ParseError(f"expected '+' or '-' before {s[pos:]!r}", base + pos)
        coeff = None
        m = _NUMBER.match(s, pos)
        if m:
            coeff = float(m.group(0))
            pos = m.end()
        if s.startswith("sqrt2", pos):
            coeff = (1.0 if coeff is None else coeff) * math.sqrt(2.0)
            pos += 5
        if pos < len(s) and s[pos] == "i":
            if coeff is None:
                coeff = 1.0
            total += sign * coeff * 1j
            pos += 1
        elif coeff is not None:
            total += sign * coeff
        else:
            raise ParseError(f"expected a number, 'sqrt2' or 'i', found {s[pos:]!r}", base + pos)
        first = False


def _parse_json_spec(text: str) -> CompanionSpec:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from exc
    if not isinstance(doc, dict) or "n" not in doc or "a" not in doc:
        raise ParseError('JSON spec needs keys "n" and "a"', 0)
    n, a = doc["n"], doc["a"]
    if not isinstance(n, int):
        raise ParseError('"n" must be an integer', 0)
    if not isinstance(a, list) or any(not isinstance(p, list) or len(p) != 2 for p in a):
        raise ParseError('"a" must be a list of [re, im] pairs', 0)
    if n < 2:
        raise DimensionError(f"need n >= 2, got n={n}")
    if len(a) != n:
        raise ParseError(f'"a" has {len(a)} entries but n={n}', 0)
    return CompanionSpec(n, tuple(complex(float(p[0]), float(p[1])) for p in a))


def parse_coeffs(text: str) -> CompanionSpec:
    """Coefficients from a comma-separated list or a JSON document.

    The list form accepts literals like ``2+1i``, ``-1-1i``, ``0.5``,
    ``3i`` and the token ``sqrt2``; the JSON form is
    ``{"n": 4, "a": [[re, im], ...]}``.
    """
    if text.lstrip().startswith("{"):
        return _parse_json_spec(text)
    coeffs = []
    pos = 0
    for chunk in text.split(","):
        coeffs.append(_parse_literal(chunk, pos))
        pos += len(chunk) + 1
    if len(coeffs) < 2:
        raise DimensionError(f"need at least 2 coefficients, got {len(coeffs)}")
    return CompanionSpec.from_coeffs(coeffs)


def render_spec(spec: CompanionSpec) -> str:
    """Canonical JSON form; ``parse_coeffs`` inverts it exactly."""
    return json.dumps({"n": spec.n, "a": [[x.real, x.imag] for x in spec.a]})


@dataclass(frozen=True)
class JobConfig:
    """Validated invocation parameters for one CLI run."""

    command: str
    coeffs: str | None = None
    file: str | None = None
    tol_uni: float = 1e-8
    tol_cond2: float = 1e-7
    tol_confirm: float = 1e-8
    gap_tol: float | None = None
    samples: int = 720
    seed: int = 0
    trials: int = 1000
    n: int = 4
    out: str | None = None
    svg: str | None = None
    pretty: bool = False
    y_down: bool = False

    def validate(self) -> None:
        for name in ("tol_uni", "tol_cond2", "tol_confirm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"--{name.replace('_', '-')} must be positive")
        if self.gap_tol is not None and self.gap_tol <= 0:
            raise ValueError("--gap-tol must be positive")
        if self.samples < 8:
            raise ValueError("--samples must be at least 8")
        if self.trials < 1:
            raise ValueError("--trials must be at least 1")
        if self.n < 2:
            raise ValueError("--n must be at least 2")

    def tolerances(self) -> DetectionTolerances:
        return DetectionTolerances(unimodular=self.tol_uni, cond2_base=self.tol_cond2, confirm=self.tol_confirm)

    def spec(self) -> CompanionSpec:
        if self.coeffs is not None:
            return parse_coeffs(self.coeffs)
        if self.file is not None:
            with open(self.file, "r", encoding="utf-8") as fh:
                return parse_coeffs(fh.read().strip())
        raise ValueError("provide a spec via --coeffs or --file")


def _c(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _report_doc(report: AnalysisReport) -> dict:
    return {
        "flat_count": report.flat_count,
        "portions": [
            {
                "omega": _c(p.omega),
                "anchor": _c(p.anchor),
                "slope_rad": p.slope,
                "endpoints": [_c(p.endpoints[0]), _c(p.endpoints[1])],
                "witnesses": {"s12": _c(p.s12), "s22": _c(p.s22)},
            }
            for p in report.portions
        ],
        "reducible": report.reducible.reducible,
        "unitary": report.reducible.unitary,
        "marginal_flags": [_c(c.omega) for c in report.candidates if c.marginal],
        "candidates": [
            {
                "omega": _c(c.omega),
                "cond1_residual": c.cond1_residual,
                "cond2_residual": c.cond2_residual,
                "passed_necessary": c.passed_necessary,
                "marginal": c.marginal,
            }
            for c in report.candidates
        ],
    }


def _verdict_doc(v) -> dict:
    return {
        "reducible": v.reducible,
        "eta": None if v.eta is None else _c(v.eta),
        "abs_eta": None if v.eta is None else abs(v.eta),
        "partition": None if v.partition is None else [list(v.partition[0]), list(v.partition[1])],
        "unitary": v.unitary,
    }


def _fmt_c(z: complex) -> str:
    return f"{z.real:+.9g}{z.imag:+.9g}i"


def _pretty_report(report: AnalysisReport) -> str:
    lines = [f"flat portions: {report.flat_count}"]
    for k, p in enumerate(report.portions, 1):
        lines.append(
            f"  {k}. omega={_fmt_c(p.omega)}  slope={p.slope:.9g} rad  anchor={_fmt_c(p.anchor)}"
        )
        lines.append(f"     segment {_fmt_c(p.endpoints[0])} -> {_fmt_c(p.endpoints[1])}")
        lines.append(f"     witnesses s12={_fmt_c(p.s12)}  s22={_fmt_c(p.s22)}")
    lines.append(f"unitarily reducible: {'yes' if report.reducible.reducible else 'no'}")
    for c in report.candidates:
        status = "passed" if c.passed_necessary else "failed"
        marginal = " (marginal)" if c.marginal else ""
        lines.append(
            f"  candidate omega={_fmt_c(c.omega)}: residuals {c.cond1_residual:.3g} / "
            f"{c.cond2_residual:.3g} {status}{marginal}"
        )
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None) -> None:
    sys.stdout.write(text)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _dump(doc: dict, pretty_text: str | None, config: JobConfig) -> None:
    if config.pretty and pretty_text is not None:
        _emit(pretty_text, config.out)
    else:
        _emit(json.dumps(doc, indent=2) + "\n", config.out)


def run(config: JobConfig) -> int:
    """Execute one command; returns the process exit code."""
    try:
        config.validate()
        if config.command == "analyze":
            report = analyze(config.spec(), config.tolerances())
            _dump(_report_doc(report), _pretty_report(report), config)
            return 0
        if config.command == "boundary":
            spec = config.spec()
            samples = sample_boundary(spec, config.samples)
            _emit(emit_csv(samples), config.out)
            if config.svg:
                flats = empirical_flats(samples, spec, config.gap_tol)
                svg = emit_svg(samples, flats, eigenvalues=spectrum(spec), y_down=config.y_down)
                with open(config.svg, "w", encoding="utf-8", newline="") as fh:
                    fh.write(svg)
            return 0
        if config.command == "check34":
            spec = config.spec()
            tol = config.tolerances()
            if spec.n == 3:
                closed = criterion_3x3(spec, tol)
            elif spec.n == 4:
                closed = criterion_4x4(spec, tol)
            else:
                raise WrongDimension(f"check34 needs n=3 or n=4, got n={spec.n}")
            general = analyze(spec, tol).flat_count
            doc = {
                "n": closed.n,
                "unimodular_solutions": [_c(w) for w in closed.unimodular_solutions],
                "tautology": closed.tautology,
                "exception_hit": closed.exception_hit,
                "predicted_flat_count": closed.predicted_flat_count,
                "general_flat_count": general,
                "agreement": closed.predicted_flat_count == general,
            }
            pretty = (
                f"closed-form count: {closed.predicted_flat_count}\n"
                f"general count:     {general}\n"
                f"agreement:         {'yes' if doc['agreement'] else 'no'}\n"
            )
            _dump(doc, pretty, config)
            return 0
        if config.command == "reduce":
            verdict = reducibility(config.spec())
            doc = _verdict_doc(verdict)
            pretty = f"unitarily reducible: {'yes' if verdict.reducible else 'no'}\n"
            if verdict.reducible:
                pretty += f"eta = {_fmt_c(verdict.eta)} (|eta| = {abs(verdict.eta):.9g})\n"
                pretty += f"partition: {list(verdict.partition[0])} | {list(verdict.partition[1])}\n"
                pretty += f"unitary: {'yes' if verdict.unitary else 'no'}\n"
            _dump(doc, pretty, config)
            return 0
        if config.command == "search":
            hist, violations = search_flat_counts(config.n, config.trials, config.seed)
            doc = {
                "n": config.n,
                "trials": config.trials,
                "seed": config.seed,
                "histogram": {str(k): v for k, v in hist.items()},
                "violations": violations,
            }
            pretty = "flat-count histogram:\n" + "".join(
                f"  {k}: {v}\n" for k, v in hist.items()
            ) + (f"violations at trials {violations}\n" if violations else "")
            _dump(doc, pretty, config)
            return 1 if violations else 0
        raise ValueError(f"unknown command {config.command!r}")
    except (ParseError, DimensionError, WrongDimension, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NoConvergence as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatrange",
        description="Flat portions on the boundary of the numerical range of a companion matrix.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def spec_args(p):
        p.add_argument("--coeffs", help="comma-separated coefficients a_0,...,a_{n-1} (complex literals, 'sqrt2' allowed) or inline JSON")
        p.add_argument("--file", help="file containing the coefficients in either accepted format")

    def tol_args(p):
        p.add_argument("--tol-uni", type=float, default=1e-8, help="unit-circle admission tolerance for candidate roots")
        p.add_argument("--tol-cond2", type=float, default=1e-7, help="base residual tolerance for the second necessary condition")
        p.add_argument("--tol-confirm", type=float, default=1e-8, help="relative nonzero-compression threshold")

    def out_args(p):
        p.add_argument("--out", help="also write the report to this file")
        p.add_argument("--pretty", action="store_true", help="human-readable output instead of JSON")

    p = sub.add_parser("analyze", help="count and locate flat portions")
    spec_args(p), tol_args(p), out_args(p)

    p = sub.add_parser("boundary", help="sample the boundary; emit CSV and optional SVG")
    spec_args(p)
    p.add_argument("--samples", type=int, default=720, help="number of support directions")
    p.add_argument("--gap-tol", type=float, default=None, help="eigengap acceptance threshold for empirical flats")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--svg", help="SVG output path")
    p.add_argument("--y-down", action="store_true", help="screen-style y axis (down) instead of mathematical")

    p = sub.add_parser("check34", help="closed-form criteria for n=3,4 vs the general detector")
    spec_args(p), tol_args(p), out_args(p)

    p = sub.add_parser("reduce", help="unitary-reducibility verdict")
    spec_args(p), out_args(p)

    p = sub.add_parser("search", help="random sweep of flat counts; fails on a forbidden 4x4 count of 3")
    p.add_argument("--n", type=int, default=4, help="matrix size for the random specs")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    out_args(p)
    return parser


def config_from_args(args: argparse.Namespace) -> JobConfig:
    fields = {
        "command": args.command,
        "coeffs": getattr(args, "coeffs", None),
        "file": getattr(args, "file", None),
        "tol_uni": getattr(args, "tol_uni", 1e-8),
        "tol_cond2": getattr(args, "tol_cond2", 1e-7),
        "tol_confirm": getattr(args, "tol_confirm", 1e-8),
        "gap_tol": getattr(args, "gap_tol", None),
        "samples": getattr(args, "samples", 720),
        "seed": getattr(args, "seed", 0),
        "trials": getattr(args, "trials", 1000),
        "n": getattr(args, "n", 4),
        "out": getattr(args, "out", None),
        "svg": getattr(args, "svg", None),
        "pretty": getattr(args, "pretty", False),
        "y_down": getattr(args, "y_down", False),
    }
    return JobConfig(**fields)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
