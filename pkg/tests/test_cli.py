import json
from pathlib import Path

import pytest

from kgchannels.cli import EXIT_FAILED, EXIT_INVALID, EXIT_OK, main
from kgchannels.green import read_cauchy_binary, read_cauchy_csv

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(*args):
    return main([str(a) for a in args])


@pytest.mark.parametrize("name", ["scenario_d2", "scenario_d3", "rotation_variant_d2", "theta_zero_d2"])
def test_shipped_configs_validate(name, tmp_path):
    assert run("validate", CONFIGS / f"{name}.json", "--config-only", "--out", tmp_path / "v.json") == EXIT_OK
    assert json.loads((tmp_path / "v.json").read_text())["violations"] == []


def test_invalid_config_exit_code(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"version": 1, "geometry": {"r1": 0.6}}))
    assert run("run-classical", cfg, "--out", tmp_path / "r.json") == EXIT_INVALID
    assert "s + lambda < r1" in capsys.readouterr().err
    assert not (tmp_path / "r.json").exists()


def test_bad_version_exit_code(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"version": 99}))
    assert run("run-quantum", cfg) == EXIT_INVALID


def test_run_classical_dumps_states(tmp_path):
    out = tmp_path / "r.json"
    code = run("run-classical", CONFIGS / "scenario_d2.json", "--out", out, "--dump-dir", tmp_path / "dump")
    assert code == EXIT_OK
    rep = json.loads(out.read_text())
    assert rep["passed"] and rep["classical"]["alice_operation"] == "kick"
    files = sorted(p.name for p in (tmp_path / "dump").iterdir())
    assert files == [f"state_{n}.csv" for n in ("after_alice", "after_alice_and_bob", "after_bob", "initial")]
    data, m = read_cauchy_csv(tmp_path / "dump" / "state_after_alice.csv")
    assert m == 1.0 and data.grid.N == 128


def test_theta_zero_reports_failure(tmp_path, capsys):
    assert run("run-classical", CONFIGS / "theta_zero_d2.json", "--out", tmp_path / "r.json") == EXIT_FAILED
    assert "FAIL" in capsys.readouterr().err
    assert json.loads((tmp_path / "r.json").read_text())["passed"] is False


def test_timing_only_adds_runtime(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cfg = CONFIGS / "scenario_d2.json"
    assert run("run-quantum", cfg, "--out", a) == EXIT_OK
    assert run("run-quantum", cfg, "--out", b, "--timing") == EXIT_OK
    ra, rb = json.loads(a.read_text()), json.loads(b.read_text())
    assert rb["provenance"].pop("runtime_seconds") > 0
    assert ra == rb


def test_reports_are_byte_identical(tmp_path):
    cfg = CONFIGS / "scenario_d2.json"
    run("run-quantum", cfg, "--out", tmp_path / "a.json")
    run("run-quantum", cfg, "--out", tmp_path / "b.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_dump_green_formats(tmp_path):
    cfg = CONFIGS / "scenario_d2.json"
    assert run("dump-green", cfg, "--function", "alice", "--out", tmp_path / "g.csv") == EXIT_OK
    assert run("dump-green", cfg, "--function", "alice", "--format", "bin", "--out", tmp_path / "g.bin") == EXIT_OK
    a, _ = read_cauchy_csv(tmp_path / "g.csv")
    b, _ = read_cauchy_binary(tmp_path / "g.bin")
    assert (a.u == b.u).all() and (a.v == b.v).all()
    assert run("dump-green", cfg, "--function", "nobody", "--out", tmp_path / "x.csv") == EXIT_INVALID


def test_convergence_bad_levels(tmp_path):
    assert run("convergence", CONFIGS / "scenario_d2.json", "--levels", "1", "--out", tmp_path / "c.json") == EXIT_INVALID
