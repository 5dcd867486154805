"""Command-line interface: instance generation, single runs, benchmarks, bounds."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import constants
from .allocation import characteristic_time, kl_bernoulli
from .errors import LinbaiError
from .harness import BenchConfig, bench, build_instance, render_csv
from .instance import gen_many_arms, load_instance, save_instance, sphere_instance
from .lts import LazySchedule, StopConfig, beta_threshold, run_lts, stopping_statistic
from .sphere import SphereConfig, run_sphere, sphere_lower_bound


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--delta", type=float, default=0.05, help="risk level")
    p.add_argument("--seed", type=int, default=0, help="trial seed")
    p.add_argument("--schedule", default="exp", help="allocation update schedule: exp, every, or period:P")
    p.add_argument("--mode", choices=("avg", "noavg"), default="noavg", help="tracking mode")
    p.add_argument("--profile", choices=("paper-main", "paper-appendix"), default="paper-appendix")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="linbai", description="Best-arm identification for linear bandits")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-instance", help="generate a many-arms benchmark instance CSV")
    p.add_argument("--arms", type=int, required=True, help="number of arms (>= 3)")
    p.add_argument("--seed", type=int, default=1, help="instance seed")
    p.add_argument("--sigma", type=float, default=1.0, help="reward noise std")
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("run", help="run a single trial with a verbose trace")
    p.add_argument("--instance", required=True, help="instance CSV path")
    _add_common(p)
    p.add_argument("--verbose", action="store_true", help="print one line per round instead of per update")

    p = sub.add_parser("bench", help="run a benchmark suite from a JSON config")
    p.add_argument("--config", help="JSON config file mirroring BenchConfig")
    p.add_argument("--instance", help="instance CSV path (overrides config)")
    p.add_argument("--trials", type=int, help="number of trials")
    p.add_argument("--delta", type=float, help="risk level")
    p.add_argument("--seed", type=int, help="seed base")
    p.add_argument("--schedule", help="exp, every, or period:P")
    p.add_argument("--mode", choices=("avg", "noavg"), help="tracking mode for the lts algorithm")
    p.add_argument("--profile", choices=("paper-main", "paper-appendix"))
    p.add_argument("--jobs", type=int, help="parallel workers")
    p.add_argument("--out", help="output path prefix (writes .csv and .json)")

    p = sub.add_parser("lower-bound", help="print the sample-complexity lower bound for an instance")
    p.add_argument("--instance", help="instance CSV path (finite case)")
    p.add_argument("--sphere-d", type=int, help="sphere dimension (continuous case)")
    p.add_argument("--mu-norm", type=float, default=1.0, help="norm of the true parameter (sphere)")
    p.add_argument("--sigma", type=float, default=1.0, help="noise std (sphere)")
    p.add_argument("--epsilon", type=float, default=0.1, help="accuracy target (sphere)")
    p.add_argument("--delta", type=float, default=0.05)

    p = sub.add_parser("sphere-bench", help="benchmark the round-robin sphere algorithm")
    p.add_argument("--sphere-d", type=int, required=True)
    p.add_argument("--mu-norm", type=float, default=1.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=1000, help="seed base")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="output path prefix")
    return parser


def _cmd_gen_instance(args) -> int:
    inst = gen_many_arms(args.arms, args.seed, sigma=args.sigma)
    save_instance(inst, args.out)
    print(f"wrote {inst.name}: K={inst.arm_set.n_arms} d={inst.arm_set.dim} -> {args.out}")
    return 0


def _cmd_run(args) -> int:
    instance = load_instance(args.instance)
    stop = StopConfig.from_profile(args.profile, args.delta, instance.sigma, instance.arm_set)
    schedule = LazySchedule.parse(args.schedule)
    arms = instance.arm_set

    def trace(design, tracker):
        is_update = schedule.contains(design.t)
        if not (args.verbose or is_update):
            return
        if design.min_eig > 0:
            z, a_hat = stopping_statistic(design, arms)
            beta = beta_threshold(design, stop, design.t)
            print(
                f"t={design.t} lam_min={design.min_eig:.6g} Z={z:.6g} beta={beta:.6g} "
                f"leader={a_hat} support={tracker.allocation.support_size if tracker.allocation else 0}"
            )
        else:
            print(f"t={design.t} lam_min=0 (exploring)")

    record = run_lts(
        instance, stop, schedule=schedule, mode=args.mode, seed=args.seed, on_round=trace
    )
    print(
        f"tau={record.tau} answer={record.answer} correct={record.correct} "
        f"support={record.support_size} incomplete={record.incomplete}"
    )
    print(f"wall_time_s={record.wall_time_s:.3f}", file=sys.stderr)
    return 0


def _cmd_bench(args) -> int:
    if args.config:
        cfg = BenchConfig.from_json(args.config)
    else:
        cfg = BenchConfig()
    overrides = {
        "trials": args.trials,
        "delta": args.delta,
        "seed_base": args.seed,
        "schedule": args.schedule,
        "profile": args.profile,
        "jobs": args.jobs,
        "out": args.out,
    }
    if args.instance:
        overrides["instance"] = "csv"
        overrides["csv_path"] = args.instance
    if args.mode:
        overrides["algorithms"] = (f"lts-{args.mode}",)
    fields = {k: v for k, v in overrides.items() if v is not None}
    if fields:
        cfg = BenchConfig(**{**cfg.to_dict(), **fields})
    rows = bench(cfg)
    sys.stdout.write(render_csv(rows, csv_times=cfg.csv_times))
    return 0


def _cmd_lower_bound(args) -> int:
    kl = kl_bernoulli(args.delta, 1.0 - args.delta)
    if args.sphere_d:
        inst = sphere_instance(args.mu_norm * np.ones(args.sphere_d) / np.sqrt(args.sphere_d), sigma=args.sigma)
        cfg = SphereConfig(dim=args.sphere_d, epsilon=args.epsilon, delta=args.delta, sigma=args.sigma)
        bound = sphere_lower_bound(inst, cfg)
        print(f"sphere d={args.sphere_d} epsilon={args.epsilon} delta={args.delta}")
        print(f"expected_sample_complexity_lower_bound={bound:.6g}")
        return 0
    if not args.instance:
        raise LinbaiError("lower-bound needs --instance or --sphere-d")
    instance = load_instance(args.instance)
    tstar = characteristic_time(instance.mu, instance.arm_set)
    bound = instance.sigma**2 * tstar * kl
    print(f"characteristic_time={tstar:.6g}")
    print(f"expected_sample_complexity_lower_bound={bound:.6g}")
    return 0


def _cmd_sphere_bench(args) -> int:
    cfg = BenchConfig(
        instance="sphere",
        dim=args.sphere_d,
        mu_norm=args.mu_norm,
        sigma=args.sigma,
        epsilon=args.epsilon,
        algorithms=("sphere-rr",),
        delta=args.delta,
        trials=args.trials,
        seed_base=args.seed,
        jobs=args.jobs,
        out=args.out or "",
    )
    rows = bench(cfg)
    sys.stdout.write(render_csv(rows, csv_times=cfg.csv_times))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "gen-instance": _cmd_gen_instance,
        "run": _cmd_run,
        "bench": _cmd_bench,
        "lower-bound": _cmd_lower_bound,
        "sphere-bench": _cmd_sphere_bench,
    }
    try:
        return handlers[args.command](args)
    except LinbaiError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
