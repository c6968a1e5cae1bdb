"""Command-line workbench: surface export, pendulum runs, bound fitting, benchmarks.

Engine modes are named ``gc-closed``, ``gc-closed-split``, ``nt-closed``,
``gc-ref``, ``nt-ref``, each optionally suffixed ``-exact`` or ``-fitted``
to pick the membership bound source (fitted is the default).

Exit codes: 0 success, 2 validation or argument problems, 3 numeric
failure (simulation blowup).  Relative output paths are resolved against
$IT2FUZZ_OUT_DIR when that variable is set.

The bench probe stream is a fixed linear congruential generator,
state' = (1664525 * state + 1013904223) mod 2^32 from seed 123456789,
with each draw mapped to [-1, 1) via state / 2^31 - 1; identical probe
sequences feed every engine, so reports are reproducible apart from the
timings themselves.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .engine import BoundSource, ClosedFormEngine, EngineConfig, Form
from .mf import (FitDominanceViolated, IT2Gaussian, NonConvergence,
                 default_fit_window, fit_bounds)
from .pendulum import (LoopConfig, NumericalBlowup, settle_time, simulate,
                       write_trace_csv)
from .reference import RefConfig, ReferenceEngine
from .rulebase import RuleBase, RuleBaseInvalid, default_rulebase, load_rulebase

__all__ = ["SurfaceSpec", "parse_engine_mode", "build_engine", "generate_surface",
           "lcg_probes", "run_bench", "main", "entry"]

OUT_DIR_ENV = "IT2FUZZ_OUT_DIR"

_CLOSED_FORMS = {
    "gc-closed": Form.GC_CLOSED,
    "gc-closed-split": Form.GC_CLOSED_SPLIT,
    "nt-closed": Form.NT_CLOSED,
}
_REF_METHODS = {"gc-ref": "gc", "nt-ref": "nt"}

LCG_SEED = 123456789
LCG_MULT = 1664525
LCG_INC = 1013904223
LCG_MOD = 2 ** 32


class CliError(Exception):
    """Anything that should abort the command with exit code 2."""


def parse_engine_mode(token: str) -> tuple[str, BoundSource]:
    """Split an engine token into its base mode and bound source."""
    base = token.strip()
    source = BoundSource.FITTED
    if base.endswith("-exact"):
        base, source = base[: -len("-exact")], BoundSource.EXACT
    elif base.endswith("-fitted"):
        base = base[: -len("-fitted")]
    if base not in _CLOSED_FORMS and base not in _REF_METHODS:
        raise CliError(f"unknown engine mode {token!r}")
    return base, source


def build_engine(rb: RuleBase, token: str, ref: RefConfig | None = None):
    """Construct the engine object an engine token names."""
    base, source = parse_engine_mode(token)
    if base in _CLOSED_FORMS:
        return ClosedFormEngine(rb, EngineConfig(form=_CLOSED_FORMS[base],
                                                 bound_source=source))
    ref = ref if ref is not None else RefConfig()
    if ref.bound_source is not source:
        ref = RefConfig(t_norm=ref.t_norm, join=ref.join,
                        grid_points=ref.grid_points, domain=ref.domain,
                        consequent_width=ref.consequent_width,
                        bound_source=source,
                        degenerate_epsilon=ref.degenerate_epsilon)
    return ReferenceEngine(rb, ref, method=_REF_METHODS[base])


def _resolve_out(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUT_DIR_ENV)
    if base and not p.is_absolute():
        return Path(base) / p
    return p


def _load_rules(path: str | None) -> RuleBase:
    rb = load_rulebase(path) if path else default_rulebase()
    violations = rb.validate()
    if violations:
        raise CliError(
            "invalid rule base:\n" + "\n".join(f"  [{v.code}] {v.message}" for v in violations)
        )
    return rb


def _fmt(v: float) -> str:
    return f"{v:.17g}"


# -- surface ---------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceSpec:
    """Grid definition for a control-surface export."""

    grid: int = 41
    axis_range: tuple[float, float] = (-1.0, 1.0)
    engines: tuple[str, ...] = ("gc-closed",)

    def __post_init__(self) -> None:
        if self.grid < 2:
            raise ValueError("grid needs at least 2 points per axis")
        lo, hi = self.axis_range
        if not lo < hi:
            raise ValueError(f"bad axis range ({lo}, {hi})")
        if not self.engines:
            raise ValueError("at least one engine required")


def generate_surface(rb: RuleBase, spec: SurfaceSpec) -> list[str]:
    """CSV lines (header first) for the engines evaluated over the grid.

    Rows run row-major: x1 varies slowest.  Values are printed with 17
    significant digits so equal inputs give byte-identical files.
    """
    engines = [build_engine(rb, tok) for tok in spec.engines]
    axis = np.linspace(spec.axis_range[0], spec.axis_range[1], spec.grid)
    lines = ["x1,x2," + ",".join(spec.engines)]
    for x1 in axis:
        for x2 in axis:
            vals = ",".join(_fmt(e.infer((x1, x2)).value) for e in engines)
            lines.append(f"{_fmt(x1)},{_fmt(x2)},{vals}")
    return lines


def cmd_surface(args: argparse.Namespace) -> int:
    rb = _load_rules(args.rules)
    spec = SurfaceSpec(grid=args.grid, engines=tuple(args.engine.split(",")))
    lines = generate_surface(rb, spec)
    text = "\n".join(lines) + "\n"
    if args.out:
        _resolve_out(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# -- pendulum ----------------------------------------------------------------

def cmd_pendulum(args: argparse.Namespace) -> int:
    rb = _load_rules(args.rules)
    engine = build_engine(rb, args.engine)
    try:
        cfg = LoopConfig(step=args.step, duration=args.duration,
                         initial_angle=args.angle0)
    except ValueError as exc:
        raise CliError(str(exc))
    prefix = _resolve_out(args.out)
    code = 0
    try:
        trace = simulate(engine, cfg)
    except NumericalBlowup as exc:
        trace = exc.trace
        code = 3
        print(f"numeric failure: {exc}", file=sys.stderr)
    write_trace_csv(trace, Path(str(prefix) + "_trace.csv"))
    summary = {
        "settle_time_s": settle_time(trace) if not trace.failed else None,
        "max_abs_angle_rad": float(np.max(np.abs(trace.angles))) if trace.times.size else None,
        "final_angle_rad": float(trace.angles[-1]) if trace.times.size else None,
        "degenerate_steps": int(trace.degenerate_flags.sum()),
        "failed": trace.failed,
    }
    Path(str(prefix) + "_summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return code


# -- fit ---------------------------------------------------------------------

def cmd_fit(args: argparse.Namespace) -> int:
    if args.sigma <= 0.0:
        raise CliError("sigma must be positive")
    if args.dmu < 0.0:
        raise CliError("dmu must be non-negative")
    m = IT2Gaussian.uncertain_mean(-args.dmu, args.dmu, args.sigma)
    window = tuple(args.window) if args.window else default_fit_window(m)
    try:
        umf, lmf = fit_bounds(m, window=window, samples=args.samples)
    except (FitDominanceViolated, NonConvergence, ValueError) as exc:
        raise CliError(str(exc))
    xs = np.linspace(window[0], window[1], args.samples)
    sse = float(np.sum((m.umf_samples(xs) - umf.sample(xs)) ** 2)
                + np.sum((m.lmf_samples(xs) - lmf.sample(xs)) ** 2))
    report = {
        "umf": {"mean": umf.mean, "sigma": umf.sigma, "scale": umf.scale},
        "lmf": {"mean": lmf.mean, "sigma": lmf.sigma, "scale": lmf.scale},
        "sse": sse,
    }
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        _resolve_out(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# -- bench ---------------------------------------------------------------------

def lcg_probes(count: int, seed: int = LCG_SEED) -> list[tuple[float, float]]:
    """Deterministic probe points in [-1, 1)^2 from the documented LCG."""
    state = seed % LCG_MOD
    out = []
    for _ in range(count):
        state = (LCG_MULT * state + LCG_INC) % LCG_MOD
        a = state / 2 ** 31 - 1.0
        state = (LCG_MULT * state + LCG_INC) % LCG_MOD
        b = state / 2 ** 31 - 1.0
        out.append((a, b))
    return out


def run_bench(rb: RuleBase, engine_tokens: tuple[str, ...], probes: int,
              seed: int = LCG_SEED, warmup: int = 100) -> dict:
    """Per-inference timing stats for each engine over one shared probe stream.

    The first ``warmup`` inferences are run but not measured.  Speedups
    are reported per method family when exactly one closed and one
    reference engine of that family are present.
    """
    if probes < 1:
        raise CliError("no probes")
    points = lcg_probes(probes, seed)
    warm = lcg_probes(min(warmup, probes), seed + 1)
    report: dict = {"probes": probes, "seed": seed, "engines": {}}
    means: dict[str, float] = {}
    for token in engine_tokens:
        engine = build_engine(rb, token)
        for p in warm:
            engine.infer(p)
        samples = []
        for p in points:
            t0 = time.perf_counter_ns()
            engine.infer(p)
            samples.append(time.perf_counter_ns() - t0)
        means[token] = statistics.fmean(samples)
        report["engines"][token] = {
            "mean_ns": statistics.fmean(samples),
            "median_ns": float(statistics.median(samples)),
            "std_ns": statistics.pstdev(samples),
            "count": len(samples),
        }
    speedup = {}
    for family in ("gc", "nt"):
        closed = [t for t in engine_tokens
                  if parse_engine_mode(t)[0] in _CLOSED_FORMS
                  and parse_engine_mode(t)[0].startswith(family)]
        ref = [t for t in engine_tokens if parse_engine_mode(t)[0] == f"{family}-ref"]
        if len(closed) == 1 and len(ref) == 1:
            speedup[family] = means[ref[0]] / means[closed[0]]
    if speedup:
        report["speedup"] = speedup
    return report


def cmd_bench(args: argparse.Namespace) -> int:
    rb = _load_rules(args.rules)
    tokens = tuple(args.engine.split(","))
    for tok in tokens:
        parse_engine_mode(tok)
    report = run_bench(rb, tokens, args.probes, seed=args.seed)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        _resolve_out(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# -- wiring ---------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="it2fuzz",
        description="Closed-form interval type-2 fuzzy inference workbench",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("surface", help="export a control surface as CSV")
    p.add_argument("--grid", type=int, default=41, help="points per axis (default 41)")
    p.add_argument("--engine", default="gc-closed",
                   help="comma-separated engine modes (default gc-closed)")
    p.add_argument("--rules", default=None, help="rule base JSON (default: built-in demo)")
    p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
    p.set_defaults(fn=cmd_surface)

    p = sub.add_parser("pendulum", help="run the inverted-pendulum loop")
    p.add_argument("--engine", default="gc-closed", help="engine mode (default gc-closed)")
    p.add_argument("--angle0", type=float, default=0.1, help="initial angle, rad")
    p.add_argument("--step", type=float, default=1e-3, help="integration step, s")
    p.add_argument("--duration", type=float, default=5.0, help="simulated time, s")
    p.add_argument("--rules", default=None, help="rule base JSON (default: built-in demo)")
    p.add_argument("--out", default="pendulum", help="output prefix (default 'pendulum')")
    p.set_defaults(fn=cmd_pendulum)

    p = sub.add_parser("fit", help="fit scaled-Gaussian stand-ins for an uncertain-mean FOU")
    p.add_argument("--dmu", type=float, required=True, help="mean half-spread")
    p.add_argument("--sigma", type=float, required=True, help="Gaussian width")
    p.add_argument("--window", type=float, nargs=2, default=None,
                   help="fit window (default: center +- 3(sigma + dmu))")
    p.add_argument("--samples", type=int, default=1001, help="fit grid points (default 1001)")
    p.add_argument("--out", default=None, help="output JSON path (default: stdout)")
    p.set_defaults(fn=cmd_fit)

    p = sub.add_parser("bench", help="per-inference timing comparison")
    p.add_argument("--probes", type=int, default=10000,
                   help="measured inferences per engine (default 10000)")
    p.add_argument("--engine", default="gc-closed,gc-ref",
                   help="comma-separated engine modes (default gc-closed,gc-ref)")
    p.add_argument("--seed", type=int, default=LCG_SEED, help="probe generator seed")
    p.add_argument("--rules", default=None, help="rule base JSON (default: built-in demo)")
    p.add_argument("--out", default=None, help="output JSON path (default: stdout)")
    p.set_defaults(fn=cmd_bench)
    return top


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuleBaseInvalid as exc:
        print(f"error: invalid rule base: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
