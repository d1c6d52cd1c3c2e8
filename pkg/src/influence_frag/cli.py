"""Command-line entry point: ``influence-frag <command> [flags]``.

Commands write one CSV plus a ``<name>.manifest.json`` next to it.  The CSV
depends only on the flags and the seed; the manifest also records the tool
version and a timestamp.

Exit codes: 0 success, 1 invalid input, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import os
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from . import __version__
from .analytic import CurveKind, closed_b, closed_bk, closed_c, curve_grid, p_grid, p_to_m
from .fragmentology import harmonic
from .process_sim import ConfigError, Engine, Mode, SimConfig, run_replications, run_until_k_roots, total_edges
from .seeding import DEFAULT_SEED
from .stats import summarize, summarize_values

THREADS_ENV = "INFLUENCE_FRAG_THREADS"
TRAJECTORY_HEADER = ["t", "a_mean", "a_var", "a_min", "a_max", "se", "b_t", "c_t", "bk_t"]
SWEEP_HEADER = ["p", "m", "reps", "a_mean", "a_se", "b_m", "c_m", "bk_m", "k"]
FRAGMENTS_HEADER = ["p", "m", "k_hat", "largest_mean", "largest_se", "pred_largest", "pred_mean"]


def fmt(x) -> str:
    """Round-trip decimal text; None becomes an empty cell."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    x = float(x)
    return str(int(x)) if x.is_integer() and abs(x) < 2**53 else repr(x)


def render_csv(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def resolve_threads(flag: int | None) -> int:
    if flag is not None:
        return max(1, flag)
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def write_outputs(out_dir: str, name: str, text: str, manifest: dict) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{name}.csv"
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    manifest = {
        "tool": "influence-frag",
        "version": __version__,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
        "output": str(path),
        **manifest,
    }
    with open(out / f"{name}.manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path


def parse_grid_spec(spec: str) -> list[float]:
    """``start:stop:step`` (inclusive)."""
    try:
        start, stop, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise ConfigError(f"grid must look like start:stop:step, got {spec!r}") from None
    grid = p_grid(start, stop, step)
    if not grid:
        raise ConfigError(f"grid {spec!r} is empty")
    if grid[0] < 0 or grid[-1] > 1 + 1e-12:
        raise ConfigError(f"p-grid {spec!r} must lie in [0, 1]")
    return grid


def parse_step_grid(spec: str, n: int, k: int) -> list[int]:
    """Comma list or ``start:stop:step`` in edge steps; ``N`` and ``Neff`` are allowed."""
    names = {"N": total_edges(n), "Neff": total_edges(n, k)}

    def val(tok: str) -> int:
        tok = tok.strip()
        if tok in names:
            return names[tok]
        try:
            return int(tok)
        except ValueError:
            raise ConfigError(f"bad grid entry {tok!r}") from None

    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError(f"grid must look like start:stop:step, got {spec!r}")
        start, stop, step = (val(p) for p in parts)
        if step <= 0:
            raise ConfigError("grid step must be positive")
        grid = list(range(start, stop + 1, step))
    else:
        grid = [val(t) for t in spec.split(",") if t.strip()]
    if not grid:
        raise ConfigError(f"grid {spec!r} is empty")
    return grid


def _default_checkpoints(m: int, count: int = 21) -> tuple[int, ...]:
    return tuple(sorted({round(i * m / (count - 1)) for i in range(count)}))


def _config_record(config: SimConfig) -> dict:
    d = asdict(config)
    d["engine"] = config.engine.value
    d["mode"] = config.mode.value
    d["N_total"] = config.N_total
    return d


# Commands -----------------------------------------------------------------

def cmd_simulate(args) -> int:
    N = total_edges(args.n, args.k)
    m = args.m if args.m is not None else p_to_m(args.p, N)
    cps = (tuple(int(c) for c in args.checkpoints.split(",")) if args.checkpoints
           else _default_checkpoints(m))
    config = SimConfig(n=args.n, m=m, k=args.k, engine=args.engine, mode=args.mode,
                       seed=args.seed, reps=args.reps, checkpoints=cps)
    trajs = run_replications(config, resolve_threads(args.threads))
    table = summarize(trajs)
    edge_steps = config.engine is not Engine.FIXED_GRAPH
    rows = []
    for r in table.rows:
        b = c = bk = None
        if edge_steps and config.k == 0:
            b, c = closed_b(config.n, r.t), closed_c(config.n, r.t)
        elif edge_steps:
            bk = closed_bk(config.n, config.k, r.t)
        rows.append([r.t, r.mean, r.var, r.min, r.max, r.se, b, c, bk])
    path = write_outputs(args.out, "trajectory", render_csv(TRAJECTORY_HEADER, rows),
                         {"command": "simulate", "config": _config_record(config)})
    print(f"wrote {path}")
    return 0


def sweep_rows(n: int, k: int, grid: Sequence[float], reps: int, seed: int,
               engine: str = Engine.SKIP_CHAIN.value, threads: int = 1) -> list[list]:
    N = total_edges(n, k)
    N0 = total_edges(n)
    ms = [p_to_m(p, N) for p in grid]
    cps = tuple(sorted(set(ms)))
    config = SimConfig(n=n, m=cps[-1], k=k, engine=engine, seed=seed, reps=reps, checkpoints=cps)
    table = summarize(run_replications(config, threads))
    by_t = {r.t: r for r in table.rows}
    rows = []
    for p, m in zip(grid, ms):
        r = by_t[m]
        m0 = m if k == 0 else p_to_m(p, N0)
        bk = closed_bk(n, k, m) if k >= 1 else None
        rows.append([p, m, reps, r.mean, r.se, closed_b(n, m0), closed_c(n, m0), bk, k])
    return rows


def cmd_sweep(args) -> int:
    grid = parse_grid_spec(args.p_grid)
    rows = sweep_rows(args.n, args.k, grid, args.reps, args.seed, args.engine,
                      resolve_threads(args.threads))
    path = write_outputs(args.out, "sweep", render_csv(SWEEP_HEADER, rows),
                         {"command": "sweep", "n": args.n, "k": args.k, "p_grid": args.p_grid,
                          "reps": args.reps, "seed": args.seed, "engine": args.engine})
    print(f"wrote {path}")
    return 0


def _stick_prediction(k_hat: int) -> tuple[float, float]:
    return float(harmonic(k_hat) / k_hat), 1.0 / k_hat


def fragment_rows_grid(n: int, grid: Sequence[float], reps: int, seed: int,
                       threads: int = 1) -> list[list]:
    N = total_edges(n)
    ms = [p_to_m(p, N) for p in grid]
    cps = tuple(sorted(set(ms)))
    config = SimConfig(n=n, m=cps[-1], seed=seed, reps=reps, checkpoints=cps)
    trajs = run_replications(config, threads)
    cols = [[v / n for v in tr.largest_values] for tr in trajs]
    by_t = {r.t: r for r in summarize_values(cps, cols).rows}
    rows = []
    for p, m in zip(grid, ms):
        k_hat = max(1, round(closed_b(n, m)))
        pred_largest, pred_mean = _stick_prediction(k_hat)
        rows.append([p, m, k_hat, by_t[m].mean, by_t[m].se, pred_largest, pred_mean])
    return rows


def fragment_rows_target(n: int, targets: Sequence[int], reps: int, seed: int) -> list[list]:
    config = SimConfig(n=n, m=total_edges(n), seed=seed, reps=reps)
    rows = []
    for target in targets:
        largest = [[max(run_until_k_roots(config, target, r)) / n] for r in range(reps)]
        row = summarize_values([0], largest).rows[0]
        pred_largest, pred_mean = _stick_prediction(target)
        rows.append([None, None, target, row.mean, row.se, pred_largest, pred_mean])
    return rows


def cmd_fragments(args) -> int:
    if (args.p_grid is None) == (args.target_k is None):
        raise ConfigError("give exactly one of --p-grid or --target-k")
    if args.p_grid is not None:
        rows = fragment_rows_grid(args.n, parse_grid_spec(args.p_grid), args.reps, args.seed,
                                  resolve_threads(args.threads))
    else:
        targets = [int(t) for t in args.target_k.split(",")]
        rows = fragment_rows_target(args.n, targets, args.reps, args.seed)
    path = write_outputs(args.out, "fragments", render_csv(FRAGMENTS_HEADER, rows),
                         {"command": "fragments", "n": args.n, "p_grid": args.p_grid,
                          "target_k": args.target_k, "reps": args.reps, "seed": args.seed})
    print(f"wrote {path}")
    return 0


def analytic_rows(n: int, k: int, kinds: Sequence[CurveKind], grid: Sequence[int]) -> list[list]:
    curves = []
    for kind in kinds:
        if kind in (CurveKind.CLOSED_BK,) and k < 1:
            raise ConfigError(f"{kind.value} needs --k >= 1")
        try:
            curves.append(curve_grid(kind, n, k, grid))
        except ValueError as exc:
            raise ConfigError(f"{kind.value}: {exc}") from None
    return [[t, *(float(c.values[i]) for c in curves)] for i, t in enumerate(grid)]


def cmd_analytic(args) -> int:
    try:
        kinds = [CurveKind(s.strip()) for s in args.kinds.split(",")]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    grid = parse_step_grid(args.grid, args.n, args.k)
    rows = analytic_rows(args.n, args.k, kinds, grid)
    header = ["t", *(k.value for k in kinds)]
    path = write_outputs(args.out, "analytic", render_csv(header, rows),
                         {"command": "analytic", "n": args.n, "k": args.k, "kinds": args.kinds,
                          "grid": args.grid})
    print(f"wrote {path}")
    return 0


def cmd_verify(args) -> int:
    from .verify import format_report, run_all

    results = run_all(level=args.level, threads=resolve_threads(args.threads))
    print(format_report(results))
    return 0 if all(r.passed for r in results) else 2


# Parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="influence-frag",
        description="Influence-fragmentation process on random graphs G(n, m).",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, reps_default):
        p.add_argument("--reps", type=int, default=reps_default)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker processes (default: ${THREADS_ENV} or CPU count)")
        p.add_argument("--out", default=".", help="output directory")

    p = sub.add_parser("simulate", help="checkpointed trajectory summary")
    p.add_argument("--n", type=int, required=True)
    budget = p.add_mutually_exclusive_group(required=True)
    budget.add_argument("--m", type=int)
    budget.add_argument("--p", type=float, help="maps to m = round(p * N_total)")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--engine", default=Engine.SKIP_CHAIN.value, choices=[e.value for e in Engine])
    p.add_argument("--mode", default=Mode.EDGE.value, choices=[m.value for m in Mode])
    p.add_argument("--checkpoints", help="comma-separated increasing steps in [0, m]")
    common(p, 100)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="final active count over a p-grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p-grid", required=True, help="start:stop:step, inclusive")
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--engine", default=Engine.SKIP_CHAIN.value,
                   choices=[Engine.SKIP_CHAIN.value, Engine.PERMUTATION_REVEAL.value])
    common(p, 50)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fragments", help="largest fragment vs stick-breaking prediction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p-grid", help="start:stop:step, inclusive")
    p.add_argument("--target-k", help="comma-separated fragment counts")
    common(p, 20)
    p.set_defaults(func=cmd_fragments)

    p = sub.add_parser("analytic", help="analytic curves on a step grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--kinds", required=True,
                   help="comma list of " + ",".join(k.value for k in CurveKind))
    p.add_argument("--grid", required=True, help="comma list or start:stop:step; N, Neff allowed")
    p.add_argument("--out", default=".", help="output directory")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("verify", help="run the acceptance criteria")
    p.add_argument("--level", choices=["fast", "full"], default="fast")
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
