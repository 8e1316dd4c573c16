"""Command-line front end.

Subcommands: sweep, learn, compare, transfer. Angles cross this boundary in
degrees; everything behind it is radians. Each campaign writes a trials CSV,
a JSON summary, and a PNG figure into --out, and reruns with the same
arguments reproduce the CSV/JSON byte for byte.

Exit codes: 0 success, 2 configuration error, 3 campaign failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .campaigns import (
    DEFAULT_COMPARE_TARGETS,
    DEFAULT_DH,
    DEFAULT_GRID,
    DEFAULT_NUM_SEEDS,
    DEFAULT_REPS,
    DEFAULT_SUPPORT_SIMPLEX,
    DEFAULT_TRANSFER_TARGET,
    TRANSFER_MAX_ITERS,
    run_compare,
    run_learn,
    run_sweep,
    run_transfer,
)
from .learner import LearnerConfig
from .models import MeshSpec, TargetSpec
from .plant import Command, ConfigError, PlantParams, load_plant_config, plant_config_hash
from .reporting import write_csv, write_json_summary, write_trials_csv
from . import plots

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAMPAIGN = 3


def _float_list(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from exc


def _target_list(text: str) -> tuple:
    """Parse 'x:thetadeg,x:thetadeg,...' pairs."""
    out = []
    for item in text.split(","):
        try:
            x, theta_deg = item.split(":")
            out.append((float(x), float(theta_deg)))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(
                f"expected x:theta_deg pairs, got {item!r}"
            ) from exc
    return tuple(out)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--plant", metavar="FILE", help="plant config JSON (defaults built in)")
    p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    p.add_argument("--out", default="out", metavar="DIR", help="output directory (default ./out)")


def _add_learning(p: argparse.ArgumentParser, max_iters: int) -> None:
    p.add_argument("--trials-per-command", type=int, default=3, metavar="N")
    p.add_argument("--max-iters", type=int, default=max_iters, metavar="T")
    p.add_argument("--eps-x", type=float, default=0.05, help="position tolerance, m")
    p.add_argument("--eps-theta-deg", type=float, default=45.0, help="angle tolerance, deg")
    p.add_argument("--mesh-min", type=float, default=-1.0)
    p.add_argument("--mesh-max", type=float, default=2.0)
    p.add_argument("--mesh-step", type=float, default=0.05)
    p.add_argument("--cone-nonneg", action="store_true",
                   help="restrict cone coordinates to alpha >= 0")
    p.add_argument("--support", metavar="FILE",
                   help="JSON list of [pitch, speed, damping] support commands")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fliplab",
        description="Planar throw-flip lab: seeded surrogate plant and learning benchmarks.",
    )
    parser.add_argument("--version", action="version", version=f"fliplab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="grid sweep of the command box")
    _add_common(p)
    p.add_argument("--reps", type=int, default=DEFAULT_REPS)
    p.add_argument("--pitch-values", type=_float_list, default=DEFAULT_GRID[0])
    p.add_argument("--speed-values", type=_float_list, default=DEFAULT_GRID[1])
    p.add_argument("--damping-values", type=_float_list, default=DEFAULT_GRID[2])

    p = sub.add_parser("learn", help="one iterative learning run")
    _add_common(p)
    _add_learning(p, max_iters=5)
    p.add_argument("--target-x", type=float, required=True, help="target landing x, m")
    p.add_argument("--target-theta-deg", type=float, required=True,
                   help="target landing angle, deg (unwrapped)")
    p.add_argument("--model", choices=("m1", "m2"), default="m2")

    p = sub.add_parser("compare", help="paired m1-vs-m2 study over targets and seeds")
    _add_common(p)
    _add_learning(p, max_iters=5)
    p.add_argument("--targets", type=_target_list,
                   default=tuple((t.x, math.degrees(t.theta)) for t in DEFAULT_COMPARE_TARGETS),
                   help="comma-separated x:theta_deg pairs")
    p.add_argument("--num-seeds", type=int, default=DEFAULT_NUM_SEEDS)

    p = sub.add_parser("transfer", help="CoM-shift transfer vs from-scratch study")
    _add_common(p)
    _add_learning(p, max_iters=TRANSFER_MAX_ITERS)
    p.add_argument("--dh", type=float, default=DEFAULT_DH, help="CoM shift, m")
    p.add_argument("--target-x", type=float, default=DEFAULT_TRANSFER_TARGET.x)
    p.add_argument("--target-theta-deg", type=float,
                   default=math.degrees(DEFAULT_TRANSFER_TARGET.theta))
    p.add_argument("--num-seeds", type=int, default=DEFAULT_NUM_SEEDS)
    p.add_argument("--reps", type=int, default=DEFAULT_REPS, help="source sweep repetitions")

    return parser


def _load_params(args) -> PlantParams:
    if args.plant:
        return load_plant_config(args.plant)
    return PlantParams()


def _load_support(args):
    if not getattr(args, "support", None):
        return DEFAULT_SUPPORT_SIMPLEX
    try:
        with open(args.support, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        commands = tuple(Command(float(c[0]), float(c[1]), float(c[2])) for c in raw)
    except (OSError, ValueError, TypeError, IndexError) as exc:
        raise ConfigError(f"{args.support}: bad support command list: {exc}") from exc
    if len(commands) < 3:
        raise ConfigError(f"{args.support}: need at least 3 support commands")
    return commands


def _learner_config(args) -> LearnerConfig:
    mesh = MeshSpec(alpha_min=args.mesh_min, alpha_max=args.mesh_max,
                    step=args.mesh_step, nonneg=args.cone_nonneg)
    try:
        return LearnerConfig(
            max_iterations=args.max_iters,
            trials_per_command=args.trials_per_command,
            model=getattr(args, "model", "m2"),
            mesh=mesh,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _target(args) -> TargetSpec:
    try:
        return TargetSpec(
            args.target_x,
            math.radians(args.target_theta_deg),
            eps_x=args.eps_x,
            eps_theta=math.radians(args.eps_theta_deg),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _meta(params, args) -> dict:
    return {"plant_hash": plant_config_hash(params), "master_seed": args.seed,
            "campaign": args.command}


def cmd_sweep(args) -> int:
    params = _load_params(args)
    result = run_sweep(params, seed=args.seed, reps=args.reps,
                       grid=(args.pitch_values, args.speed_values, args.damping_values))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_trials_csv(out / "sweep_trials.csv", result.trial_rows(), _meta(params, args))
    write_csv(
        out / "sweep_commands.csv",
        ("pitch", "speed", "damping", "n", "mean_x", "std_x", "mean_theta_rad", "std_theta_rad"),
        result.command_stats,
        _meta(params, args),
    )
    write_json_summary(out / "sweep_summary.json", result.summary())
    plots.plot_sweep(result, out / "sweep_scatter.png")
    s = result.summary()
    print(f"sweep: {s['n_commands']} commands, {s['n_trials']} trials")
    print(f"  landing x range    [{s['landing_x_range'][0]:.3f}, {s['landing_x_range'][1]:.3f}] m")
    lo, hi = s["landing_theta_range"]
    print(f"  landing angle range [{math.degrees(lo):.1f}, {math.degrees(hi):.1f}] deg")
    print(f"  outputs in {out}/")
    return EXIT_OK


def cmd_learn(args) -> int:
    params = _load_params(args)
    config = _learner_config(args)
    target = _target(args)
    run = run_learn(params, target, config, seed=args.seed, support_commands=_load_support(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_trials_csv(out / "learn_trials.csv", run.trial_rows(), _meta(params, args))
    summary = run.summary()
    summary["plant_hash"] = plant_config_hash(params)
    write_json_summary(out / "learn_summary.json", summary)
    plots.plot_learning(run, out / "learn_progress.png")
    r = run.result
    print(f"learn [{run.model}] target ({target.x:.2f} m, {math.degrees(target.theta):.0f} deg): {r.status}")
    print(f"  support best error   {r.support_best_error:.3f}")
    print(f"  first-iteration error {r.first_iteration_error:.3f}")
    print(f"  min error            {r.best_error:.3f}")
    print(f"  iterations to 2-of-N {r.iters_to_two_of_n}   all-N {r.iters_to_all_n}")
    print(f"  outputs in {out}/")
    return EXIT_OK


def cmd_compare(args) -> int:
    params = _load_params(args)
    config = _learner_config(args)
    try:
        targets = tuple(
            TargetSpec(x, math.radians(thd), eps_x=args.eps_x,
                       eps_theta=math.radians(args.eps_theta_deg))
            for x, thd in args.targets
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    seeds = tuple(range(args.seed, args.seed + args.num_seeds))
    report = run_compare(params, targets, config, seeds, support_commands=_load_support(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_trials_csv(out / "compare_trials.csv", report.trial_rows(), _meta(params, args))
    write_json_summary(out / "compare_summary.json", report.summary())
    plots.plot_compare(report, out / "compare_summary.png")
    s = report.summary()
    print(f"compare: {len(targets)} targets x {len(seeds)} seeds, paired m1/m2")
    print("  target              m1 iters  m2 iters   m1 first  m2 first")
    for t in s["per_target"]:
        lbl = f"({t['target']['x']:.2f}, {math.degrees(t['target']['theta_rad']):5.0f}d)"
        print(f"  {lbl:18s}  {t['m1']['mean_iters_to_2_of_n']:8.2f}  {t['m2']['mean_iters_to_2_of_n']:8.2f}"
              f"   {t['m1']['mean_first_iteration_error']:8.2f}  {t['m2']['mean_first_iteration_error']:8.2f}")
    pooled = s["pooled"]
    print(f"  pooled iterations to 2-of-N: m1 {pooled['m1']['mean_iters_to_2_of_n']:.2f}"
          f" vs m2 {pooled['m2']['mean_iters_to_2_of_n']:.2f}"
          f" ({pooled['reduction_pct_2_of_n']:.1f}% reduction)")
    print(f"  outputs in {out}/")
    return EXIT_OK


def cmd_transfer(args) -> int:
    params = _load_params(args)
    config = _learner_config(args)
    target = _target(args)
    seeds = tuple(range(args.seed, args.seed + args.num_seeds))
    report = run_transfer(params, dh=args.dh, target=target, config=config, seeds=seeds,
                          reps=args.reps, support_commands=_load_support(args))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_trials_csv(out / "transfer_trials.csv", report.trial_rows(), _meta(params, args))
    write_json_summary(out / "transfer_summary.json", report.summary())
    plots.plot_transfer(report, out / "transfer_summary.png")
    s = report.summary()
    print(f"transfer: dh={args.dh*100:.0f} cm, target ({target.x:.2f} m, "
          f"{math.degrees(target.theta):.0f} deg), {len(seeds)} paired seeds")
    print(f"  mean iterations to all-N: transfer {s['mean_iters_to_all_n']['m3']:.2f}"
          f" vs scratch {s['mean_iters_to_all_n']['m2_scratch']:.2f}"
          f" ({s['reduction_pct']:.1f}% reduction)")
    print(f"  transfer strictly faster in {100*s['m3_strictly_fewer_fraction']:.0f}% of pairs")
    print(f"  outputs in {out}/")
    return EXIT_OK


HANDLERS = {
    "sweep": cmd_sweep,
    "learn": cmd_learn,
    "compare": cmd_compare,
    "transfer": cmd_transfer,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # campaign-level failure
        print(f"campaign failed: {exc}", file=sys.stderr)
        return EXIT_CAMPAIGN


if __name__ == "__main__":
    sys.exit(main())
