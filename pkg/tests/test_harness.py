import json
import subprocess
import sys

import numpy as np
import pytest

from linbai.errors import InvalidConfigError
from linbai.harness import CSV_HEADER, BenchConfig, aggregate, bench, render_csv, run_suite, wilson_upper
from linbai.records import RunRecord


def small_config(**over):
    base = dict(
        instance="many-arms",
        arms=30,
        instance_seed=3,
        algorithms=("lts-noavg",),
        delta=0.1,
        trials=4,
        seed_base=50,
        jobs=1,
    )
    base.update(over)
    return BenchConfig(**base)


def test_config_validation():
    with pytest.raises(InvalidConfigError):
        small_config(trials=0)
    with pytest.raises(InvalidConfigError):
        small_config(delta=1.5)
    with pytest.raises(InvalidConfigError):
        small_config(algorithms=("nonsense",))


def test_config_json_round_trip(tmp_path):
    cfg = small_config(out="x")
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    again = BenchConfig.from_json(path)
    assert again.to_dict() == cfg.to_dict()
    path.write_text(json.dumps({"bogus_key": 1}))
    with pytest.raises(InvalidConfigError):
        BenchConfig.from_json(path)


def test_csv_schema_and_determinism(tmp_path):
    cfg = small_config(out=str(tmp_path / "a"))
    bench(cfg)
    text = (tmp_path / "a.csv").read_text()
    assert text.splitlines()[0] == CSV_HEADER
    assert CSV_HEADER == (
        "algorithm,instance,trials,mean_tau,std_tau,error_rate,mean_support,mean_time_s,incomplete"
    )
    cfg2 = small_config(out=str(tmp_path / "b"))
    bench(cfg2)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_json_payload(tmp_path):
    cfg = small_config(out=str(tmp_path / "a"))
    bench(cfg)
    payload = json.loads((tmp_path / "a.json").read_text())
    assert payload["format_version"] == 1
    assert len(payload["records"]) == cfg.trials
    assert payload["records"][0]["seed"] == cfg.seed_base
    assert all(r["wall_time_s"] >= 0 for r in payload["records"])


def test_parallel_merge_is_deterministic(tmp_path):
    rows1 = bench(small_config(trials=6, jobs=1))
    rows2 = bench(small_config(trials=6, jobs=3))
    assert render_csv(rows1) == render_csv(rows2)


def test_aggregate_excludes_incomplete():
    recs = [
        RunRecord("a", "i", 0, 10, 0, True, 2, 0.5, False),
        RunRecord("a", "i", 1, 20, 0, False, 4, 0.7, False),
        RunRecord("a", "i", 2, 999, 0, True, 4, 0.1, True),
    ]
    row = aggregate(recs)[0]
    assert row["trials"] == 3
    assert row["mean_tau"] == 15.0
    assert row["error_rate"] == 0.5
    assert row["incomplete"] == 1
    assert row["std_tau"] == pytest.approx(np.std([10, 20], ddof=1))


def test_seed_extension_preserves_prefix():
    rows4 = run_suite(small_config(trials=4))
    rows6 = run_suite(small_config(trials=6))
    assert [r.tau for r in rows6[:4]] == [r.tau for r in rows4]


def test_wilson_upper_monotone():
    assert wilson_upper(0, 100) < wilson_upper(1, 100) < wilson_upper(5, 100)
    assert wilson_upper(0, 400) < wilson_upper(0, 100)
    assert wilson_upper(0, 0) == 1.0


def _cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "linbai.cli", *args], capture_output=True, text=True
    )


def test_cli_gen_instance_and_lower_bound(tmp_path):
    path = tmp_path / "inst.csv"
    out = _cli("gen-instance", "--arms", "12", "--seed", "4", "--out", str(path))
    assert out.returncode == 0 and path.exists()
    lb = _cli("lower-bound", "--instance", str(path), "--delta", "0.05")
    assert lb.returncode == 0
    assert "expected_sample_complexity_lower_bound=" in lb.stdout


def test_cli_lower_bound_orthonormal(tmp_path):
    # frozen composition: T* = 8 and kl(0.05, 0.95) -> bound ~ 21.2
    from linbai.instance import orthonormal_instance, save_instance

    path = tmp_path / "ortho.csv"
    save_instance(orthonormal_instance(2), path)
    lb = _cli("lower-bound", "--instance", str(path), "--delta", "0.05")
    bound = float(lb.stdout.strip().rsplit("=", 1)[1])
    assert bound == pytest.approx(8.0 * 2.649995081249796, rel=1e-3)


def test_cli_run_trace_is_deterministic(tmp_path):
    path = tmp_path / "inst.csv"
    _cli("gen-instance", "--arms", "12", "--seed", "4", "--out", str(path))
    r1 = _cli("run", "--instance", str(path), "--seed", "7", "--delta", "0.1")
    r2 = _cli("run", "--instance", str(path), "--seed", "7", "--delta", "0.1")
    assert r1.returncode == 0
    assert r1.stdout == r2.stdout
    assert "tau=" in r1.stdout


def test_cli_bench_from_config(tmp_path):
    cfgfile = tmp_path / "cfg.json"
    cfgfile.write_text(json.dumps(small_config(out=str(tmp_path / "r")).to_dict()))
    out = _cli("bench", "--config", str(cfgfile))
    assert out.returncode == 0
    assert out.stdout.splitlines()[0] == CSV_HEADER
    assert (tmp_path / "r.csv").exists()


def test_cli_sphere_bench(tmp_path):
    out = _cli(
        "sphere-bench", "--sphere-d", "3", "--mu-norm", "5", "--sigma", "0.1",
        "--epsilon", "0.1", "--trials", "5", "--out", str(tmp_path / "s"),
    )
    assert out.returncode == 0
    lines = out.stdout.splitlines()
    assert lines[0] == CSV_HEADER and lines[1].startswith("sphere-rr,")


def test_cli_rejects_unknown_flag():
    out = _cli("bench", "--nonsense")
    assert out.returncode == 2


def test_cli_rejects_bad_combo():
    out = _cli("lower-bound")
    assert out.returncode == 2
