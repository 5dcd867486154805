"""Batch experiment runner: seeded trials, aggregation, CSV/JSON persistence.

Trials are independent and seeded seed_base + i, so enlarging a suite never
perturbs earlier trials and parallel execution merges deterministically by
trial index. The CSV table is a pure function of the configuration; measured
wall times live in the JSON records (and enter the CSV only when csv_times
is set, which breaks byte-reproducibility and is off by default).
"""
from __future__ import annotations

import dataclasses
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import constants
from .allocation import Allocation
from .baselines import oracle_allocation, run_oracle_tracking, run_static
from .errors import InvalidConfigError
from .instance import Instance, gen_many_arms, load_instance, orthonormal_instance, sphere_instance
from .lts import LazySchedule, StopConfig, run_lts
from .records import RunRecord
from .sphere import SphereConfig, run_sphere

CSV_HEADER = "algorithm,instance,trials,mean_tau,std_tau,error_rate,mean_support,mean_time_s,incomplete"
JSON_FORMAT_VERSION = 1

FINITE_ALGORITHMS = ("lts-noavg", "lts-avg", "oracle", "static-uniform")


@dataclass
class BenchConfig:
    """Flat description of one benchmark suite; JSON-serializable."""

    instance: str = "many-arms"  # many-arms | orthonormal | csv | sphere
    arms: int = 1000
    instance_seed: int = 1
    dim: int = 2
    sigma: float = 1.0
    csv_path: str = ""
    mu_norm: float = 1.0
    epsilon: float = 0.1
    algorithms: tuple = ("lts-noavg",)
    delta: float = 0.05
    trials: int = 20
    seed_base: int = 1000
    jobs: int = 1
    out: str = ""
    profile: str = "paper-appendix"
    schedule: str = "exp"
    opt_tol: float = 1e-4
    opt_max_iter: int = 20_000
    max_rounds: int = constants.MAX_ROUNDS
    csv_times: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise InvalidConfigError("trials must be >= 1")
        if not (0.0 < self.delta < 1.0):
            raise InvalidConfigError("delta must lie in (0, 1)")
        if self.jobs < 1:
            raise InvalidConfigError("jobs must be >= 1")
        self.algorithms = tuple(self.algorithms)
        for alg in self.algorithms:
            if alg not in FINITE_ALGORITHMS and alg != "sphere-rr":
                raise InvalidConfigError(f"unknown algorithm {alg!r}")

    @classmethod
    def from_json(cls, path) -> "BenchConfig":
        with open(path) as fh:
            data = json.load(fh)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["algorithms"] = list(self.algorithms)
        return out


def build_instance(cfg: BenchConfig) -> Instance:
    if cfg.instance == "many-arms":
        return gen_many_arms(cfg.arms, cfg.instance_seed, sigma=cfg.sigma)
    if cfg.instance == "orthonormal":
        return orthonormal_instance(cfg.dim, sigma=cfg.sigma)
    if cfg.instance == "csv":
        if not cfg.csv_path:
            raise InvalidConfigError("csv instance needs csv_path")
        return load_instance(cfg.csv_path, name=os.path.basename(cfg.csv_path))
    if cfg.instance == "sphere":
        direction = np.ones(cfg.dim) / math.sqrt(cfg.dim)
        return sphere_instance(cfg.mu_norm * direction, sigma=cfg.sigma)
    raise InvalidConfigError(f"unknown instance kind {cfg.instance!r}")


def _run_trial(payload) -> RunRecord:
    cfg_dict, algorithm, trial_index, oracle_weights = payload
    cfg = BenchConfig(**cfg_dict)
    instance = build_instance(cfg)
    seed = cfg.seed_base + trial_index
    if algorithm == "sphere-rr":
        scfg = SphereConfig(
            dim=cfg.dim, epsilon=cfg.epsilon, delta=cfg.delta, sigma=cfg.sigma, max_rounds=cfg.max_rounds
        )
        return run_sphere(instance, scfg, seed=seed)
    stop = StopConfig.from_profile(cfg.profile, cfg.delta, cfg.sigma, instance.arm_set)
    if algorithm in ("lts-noavg", "lts-avg"):
        return run_lts(
            instance,
            stop,
            schedule=LazySchedule.parse(cfg.schedule),
            mode=algorithm.split("-")[1],
            seed=seed,
            opt_tol=cfg.opt_tol,
            opt_max_iter=cfg.opt_max_iter,
            max_rounds=cfg.max_rounds,
        )
    if algorithm == "oracle":
        return run_oracle_tracking(
            instance, stop, seed=seed, allocation=Allocation(np.asarray(oracle_weights)), max_rounds=cfg.max_rounds
        )
    if algorithm == "static-uniform":
        return run_static(
            instance, stop, seed, Allocation.uniform(instance.arm_set.n_arms),
            max_rounds=cfg.max_rounds, algorithm="static-uniform",
        )
    raise InvalidConfigError(f"unknown algorithm {algorithm!r}")


def run_suite(cfg: BenchConfig) -> list[RunRecord]:
    """All (algorithm, trial) runs of the suite, ordered by algorithm then trial."""
    instance = build_instance(cfg)
    payloads = []
    for alg in cfg.algorithms:
        oracle_weights = None
        if alg == "oracle":
            oracle_weights = oracle_allocation(instance).weights.tolist()
        for i in range(cfg.trials):
            payloads.append((cfg.to_dict(), alg, i, oracle_weights))
    if cfg.jobs == 1:
        return [_run_trial(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        return list(pool.map(_run_trial, payloads))


def wilson_upper(errors: int, n: int, z: float = 1.96) -> float:
    """Upper end of the Wilson score interval for an error proportion."""
    if n == 0:
        return 1.0
    p = errors / n
    denom = 1.0 + z * z / n
    center = p + z * z / (2 * n)
    rad = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n))
    return (center + rad) / denom


def aggregate(records: list[RunRecord]) -> list[dict]:
    """Per-algorithm summary rows; incomplete runs are counted but excluded from means."""
    rows = []
    seen = []
    for rec in records:
        if rec.algorithm not in seen:
            seen.append(rec.algorithm)
    for alg in seen:
        recs = [r for r in records if r.algorithm == alg]
        complete = [r for r in recs if not r.incomplete]
        taus = np.array([r.tau for r in complete], dtype=float)
        rows.append(
            {
                "algorithm": alg,
                "instance": recs[0].instance,
                "trials": len(recs),
                "mean_tau": float(np.mean(taus)) if taus.size else float("nan"),
                "std_tau": float(np.std(taus, ddof=1)) if taus.size > 1 else 0.0,
                "error_rate": (sum(1 for r in complete if not r.correct) / len(complete)) if complete else float("nan"),
                "mean_support": float(np.mean([r.support_size for r in complete])) if complete else float("nan"),
                "mean_time_s": float(np.mean([r.wall_time_s for r in complete])) if complete else float("nan"),
                "incomplete": len(recs) - len(complete),
            }
        )
    return rows


def render_csv(rows: list[dict], csv_times: bool = False) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        time_field = repr(row["mean_time_s"]) if csv_times else ""
        lines.append(
            ",".join(
                [
                    row["algorithm"],
                    row["instance"],
                    str(row["trials"]),
                    repr(row["mean_tau"]),
                    repr(row["std_tau"]),
                    repr(row["error_rate"]),
                    repr(row["mean_support"]),
                    time_field,
                    str(row["incomplete"]),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def bench(cfg: BenchConfig) -> list[dict]:
    """Run the whole suite, write CSV and JSON next to cfg.out, return the rows."""
    started = time.perf_counter()
    records = run_suite(cfg)
    rows = aggregate(records)
    if cfg.out:
        csv_path = cfg.out + ".csv"
        json_path = cfg.out + ".json"
        with open(csv_path, "w") as fh:
            fh.write(render_csv(rows, csv_times=cfg.csv_times))
        payload = {
            "format_version": JSON_FORMAT_VERSION,
            "config": cfg.to_dict(),
            "elapsed_s": time.perf_counter() - started,
            "aggregates": rows,
            "records": [dataclasses.asdict(r) for r in records],
        }
        with open(json_path, "w") as fh:
            json.dump(payload, fh, indent=1)
    return rows
