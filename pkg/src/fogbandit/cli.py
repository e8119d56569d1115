"""Command-line front end.

Verbs:
  run            run a learning campaign and write plot-ready CSV/JSON files
  solve-nash     solve the game's equilibrium and print it as JSON
  validate-spec  check a game parameterization and report warnings
  bench-slope    fit the log-log regret growth exponent from a regret CSV

Any module error exits nonzero after printing a machine-readable error JSON.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

import numpy as np

from .campaign import (ExperimentConfig, StrategyConfig, run_campaign,
                       summary_dict, write_outputs, STRATEGY_NAMES)
from .dataset import builtin_game1, load_dataset, select_subgame
from .engine import regret_slope
from .game import GameSpec
from .nash import solve_nash


def _add_game_args(p):
    p.add_argument("--game", choices=["game1", "dataset"], default="game1",
                   help="built-in two-node game or the bundled index dataset")
    p.add_argument("--dataset", default=None,
                   help="dataset path (defaults to the bundled file)")
    p.add_argument("--nodes", type=int, default=None,
                   help="use the first N nodes of the dataset")
    p.add_argument("--tasks", type=int, default=None,
                   help="use the first N tasks of the dataset")
    p.add_argument("--noise-std", type=float, default=0.01)
    p.add_argument("--spec-json", default=None,
                   help="load the game from a GameSpec JSON document instead")


def build_spec(args) -> GameSpec:
    if args.spec_json:
        return GameSpec.from_json(Path(args.spec_json).read_text())
    if args.game == "game1":
        return builtin_game1(noise_std=args.noise_std)
    ds = load_dataset(args.dataset)
    nodes = range(args.nodes if args.nodes else ds.K)
    tasks = range(args.tasks if args.tasks else ds.M)
    return select_subgame(ds, nodes, tasks, noise_std=args.noise_std)


def cmd_run(args) -> int:
    spec = build_spec(args)
    params = json.loads(args.params) if args.params else {}
    strategies = [StrategyConfig(name, params.get(name, {}))
                  for name in args.strategy.split(",")]
    config = ExperimentConfig(
        spec=spec, strategies=strategies, T=args.T, n_seeds=args.seeds,
        master_seed=args.master_seed, regret_mode=args.regret_mode,
        out_dir=Path(args.out), trace=args.trace,
    )
    config.out_dir.mkdir(parents=True, exist_ok=True)
    result = run_campaign(config, progress=print if args.verbose else None)
    written = write_outputs(result, config.out_dir)
    for s in result.strategies:
        print(f"{s.name}: final average regret (node mean) = "
              f"{s.final_avg_regret_node_mean():.6g}, slope = {s.slope:.3f}, "
              f"{s.runtime:.1f}s")
    print(f"wrote {len(written)} files to {config.out_dir}")
    return 0


def cmd_solve_nash(args) -> int:
    spec = build_spec(args)
    sol = solve_nash(spec, tol=args.tol, n_starts=args.starts,
                     seed=args.master_seed)
    doc = {
        "x_star": sol.x_star.tolist(),
        "utilities": sol.utilities.tolist(),
        "eps_gap": sol.eps_gap,
        "iterations": sol.iterations,
        "converged": sol.converged,
    }
    text = json.dumps(doc, indent=2)
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "nash.json").write_text(text)
    return 0


def cmd_validate_spec(args) -> int:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        spec = build_spec(args)
    print(json.dumps({
        "valid": True,
        "K": spec.K,
        "M": spec.M,
        "warnings": [str(w.message) for w in caught],
    }, indent=2))
    return 0


def cmd_bench_slope(args) -> int:
    rows = np.genfromtxt(args.input, delimiter=",", names=True)
    nodes = np.unique(rows["node"]).astype(int)
    slopes = {}
    for k in nodes:
        sel = rows["node"] == k
        slopes[str(k)] = regret_slope(rows["cumulative_regret"][sel],
                                      window=(args.window, 1.0),
                                      t=rows["t"][sel])
    t0 = rows["node"] == nodes[0]
    t_axis = rows["t"][t0]
    node_mean = np.zeros_like(t_axis)
    for k in nodes:
        node_mean += rows["cumulative_regret"][rows["node"] == k]
    node_mean /= len(nodes)
    slopes["node_mean"] = regret_slope(node_mean, window=(args.window, 1.0),
                                       t=t_axis)
    print(json.dumps({"slopes": slopes, "window": [args.window, 1.0]}, indent=2))
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fogbandit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a learning campaign")
    _add_game_args(p)
    p.add_argument("--strategy", default="bgam",
                   help=f"comma-separated names from {{{','.join(STRATEGY_NAMES)}}}")
    p.add_argument("--T", type=int, default=50_000)
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--regret-mode", choices=["ne_reference", "per_round_br"],
                   default="ne_reference")
    p.add_argument("--out", default="results")
    p.add_argument("--trace", action="store_true",
                   help="also stream per-round traces (large files)")
    p.add_argument("--params", default=None,
                   help='JSON dict of per-strategy parameter overrides, e.g. '
                        '\'{"bgam": {"nu": 0.05}}\'')
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("solve-nash", help="solve the equilibrium")
    _add_game_args(p)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--starts", type=int, default=20)
    p.add_argument("--master-seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_solve_nash)

    p = sub.add_parser("validate-spec", help="validate a game parameterization")
    _add_game_args(p)
    p.set_defaults(func=cmd_validate_spec)

    p = sub.add_parser("bench-slope", help="fit regret growth exponent")
    p.add_argument("--input", required=True, help="regret CSV from `run`")
    p.add_argument("--window", type=float, default=0.5,
                   help="fit from this fraction of the horizon onward")
    p.set_defaults(func=cmd_bench_slope)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
