"""Command line entry point: ``roadgen generate|metrics|render|bench``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import bench
from .estimators import GENERATORS, make_generator
from .fitness import DEFAULT_WEIGHTS, FitnessWeights, fitness
from .grid import GridFormatError, load_grid, save_grid, to_dict
from .metrics import full_report
from .render import TilesetError, load_tileset, render, synth_tileset
from .wfc import WfcFailure

def parse_size(text: str) -> tuple[int, int]:
    try:
        h, w = (int(p) for p in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"size must look like 12x12, got {text!r}") from None
    if h < 1 or w < 1:
        raise argparse.ArgumentTypeError("size must be positive")
    return h, w


def _weight_override(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"weight {name!r} needs a number, got {value!r}") from None


def load_weights(args) -> FitnessWeights:
    w = DEFAULT_WEIGHTS
    if getattr(args, "weights", None):
        w = FitnessWeights.from_json(args.weights)
    overrides = dict(getattr(args, "weight", None) or [])
    return w.with_overrides(**overrides) if overrides else w


def _add_weight_args(p):
    p.add_argument("--weights", metavar="FILE", help='JSON file {"weights": {...}}')
    p.add_argument("--weight", metavar="NAME=VALUE", action="append", type=_weight_override,
                   help="override a single weight (repeatable)")


def _generator_params(args) -> dict:
    m = args.method
    opts = {}
    if m == "wfc":
        opts.update(max_attempts=args.attempts, hard_boundary=args.hard_boundary,
                    allow_empty=args.allow_empty,
                    forbid_adjacent_crossings=not args.allow_adjacent_crossings)
    else:
        opts.update(generations=args.generations)
    if m in ("pso", "gwo"):
        opts.update(population=args.population)
    if m == "pso":
        opts.update(inertia=args.w, c1=args.c1, c2=args.c2)
    if m in ("ea", "map-elites"):
        opts.update(mu=args.mu, lambda_=args.lambda_, tournament_size=args.tournament,
                    mutation_rate=args.mutation_rate)
    return {k: v for k, v in opts.items() if v is not None}


def _write_trace(path: Path, trace) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["generation", "best_fitness"])
        for i, f in enumerate(trace, start=1):
            w.writerow([i, f])


def cmd_generate(args) -> int:
    h, w = args.size
    weights = load_weights(args)
    gen = make_generator(args.method, height=h, width=w, weights=weights,
                         random_state=args.seed, **_generator_params(args))
    try:
        gen.fit()
    except WfcFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    doc = {"method": args.method, "seed": args.seed, "fitness": gen.best_fitness_,
           "grid": to_dict(gen.best_grid_), "metrics": gen.report_.to_dict()}
    if args.method == "wfc":
        doc["attempts"] = gen.attempts_
    if args.out is None:
        json.dump(doc, sys.stdout, indent=2)
        print()
        return 0
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    save_grid(gen.best_grid_, out / "grid.json")
    (out / "metrics.json").write_text(json.dumps(
        {**gen.report_.to_dict(), "fitness": gen.best_fitness_}, indent=2))
    _write_trace(out / "trace.csv", gen.fitness_trace_)
    if args.method == "map-elites":
        (out / "archive.json").write_text(json.dumps(gen.archive_.to_records()))
    print(f"{args.method}: fitness {gen.best_fitness_:g}, wrote {out}")
    return 0


def cmd_metrics(args) -> int:
    g = load_grid(args.grid)
    report = full_report(g)
    json.dump({**report.to_dict(), "fitness": fitness(report, load_weights(args))},
              sys.stdout, indent=2)
    print()
    return 0


def cmd_render(args) -> int:
    g = load_grid(args.grid)
    rng = np.random.default_rng(args.seed)
    if args.synthetic:
        ts = synth_tileset(args.tile_px)
    else:
        ts = load_tileset(args.tileset)
    written = render(g, ts, rng).save(args.out)
    print("\n".join(written.values()))
    return 0


def cmd_bench(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    params = {}
    if args.generations is not None:
        params = {m: {"generations": args.generations} for m in methods if m != "wfc"}
    if args.hard_boundary:
        params["wfc"] = {"hard_boundary": True}
    spec = bench.ExperimentSpec(methods=methods, sizes=args.size, runs=args.runs,
                                weights=load_weights(args), method_params=params,
                                master_seed=args.seed)

    def progress(rec):
        status = f"fitness {rec.fitness:g}" if rec.success else f"FAILED ({rec.error})"
        print(f"{rec.method} {rec.size[0]}x{rec.size[1]} run {rec.run}: {status} "
              f"[{rec.wall_time:.2f}s]", flush=True)

    records = bench.run_experiment(spec, args.out, progress=progress)
    bench.write_outputs(records, args.out, wfc_hard_boundary=args.hard_boundary)
    print((Path(args.out) / "verdicts.txt").read_text(), end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roadgen", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="run one generator and write the best grid")
    p.add_argument("--method", required=True, choices=sorted(GENERATORS))
    p.add_argument("--size", type=parse_size, default=(12, 12), metavar="HxW")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", help="output directory (default: JSON on stdout)")
    p.add_argument("--hard-boundary", action="store_true", help="WFC: forbid off-grid bits")
    p.add_argument("--allow-empty", action="store_true", help="WFC: allow the empty tile")
    p.add_argument("--allow-adjacent-crossings", action="store_true",
                   help="WFC: do not forbid connected crossing pairs")
    p.add_argument("--attempts", type=int, help="WFC: restarts before giving up")
    p.add_argument("--generations", type=int)
    p.add_argument("--population", type=int, help="PSO/GWO swarm size")
    p.add_argument("--w", type=float, help="PSO inertia")
    p.add_argument("--c1", type=float)
    p.add_argument("--c2", type=float)
    p.add_argument("--mu", type=int)
    p.add_argument("--lambda", dest="lambda_", type=int)
    p.add_argument("--tournament", type=int)
    p.add_argument("--mutation-rate", type=float)
    _add_weight_args(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("metrics", help="print the metric report of a grid JSON file")
    p.add_argument("--grid", required=True)
    _add_weight_args(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("render", help="compose a map image and masks")
    p.add_argument("--grid", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--tileset", help="tileset directory")
    src.add_argument("--synthetic", action="store_true", help="use the procedural tileset")
    p.add_argument("--tile-px", type=int, default=128)
    p.add_argument("--seed", type=int, default=None, help="variant selection seed")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("bench", help="run the method x seed benchmark")
    p.add_argument("--methods", default=",".join(bench.METHODS))
    p.add_argument("--size", type=parse_size, action="append", metavar="HxW")
    p.add_argument("--runs", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--generations", type=int, help="override generations for iterative methods")
    p.add_argument("--hard-boundary", action="store_true")
    p.add_argument("--out", required=True)
    _add_weight_args(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "size", None) is None and args.command == "bench":
        args.size = [(12, 12)]
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (GridFormatError, TilesetError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
