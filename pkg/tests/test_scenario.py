import json
import math

import pytest

from kgchannels.config import SCHEMA_VERSION, ScenarioConfig
from kgchannels.errors import ConfigError, ResourceLimitExceeded
from kgchannels.report import build_report, dumps
from kgchannels.scenario import public, run_classical, run_quantum, validate_config
from kgchannels.suite import run_convergence


@pytest.fixture(scope="module")
def classical(cfg):
    return run_classical(cfg)


@pytest.fixture(scope="module")
def quantum(cfg):
    return run_quantum(cfg)


# ----------------------------------------------------------------- config


def test_default_config_is_valid(cfg):
    assert validate_config(cfg) == []
    assert validate_config(ScenarioConfig.default(3)) == []


def test_geometry_violation_message(cfg):
    bad = cfg.replace(geometry={"r1": 0.6})
    assert any("s + lambda < r1" in m for m in validate_config(bad))


def test_causal_margin_violation(cfg):
    fns = dict(cfg.raw["functions"])
    fns["observer"] = {**fns["observer"], "center": [1.35, 1.35]}
    assert any("causal margin" in m for m in validate_config(cfg.replace(functions=fns)))


def test_mass_and_grid_violations(cfg):
    assert any("mass" in m for m in validate_config(cfg.replace(mass=0.0)))
    assert validate_config(cfg.replace(grid={"N": 100}))[0].startswith("grid:")


def test_role_violations(cfg):
    assert any("alice.operation" in m for m in validate_config(cfg.replace(alice={"operation": "teleport"})))
    assert any("O(-)" in m for m in validate_config(cfg.replace(alice={"function": "charlie"})))


def test_version_and_dimension_errors():
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"version": SCHEMA_VERSION + 1})
    with pytest.raises(ConfigError):
        ScenarioConfig.from_dict({"version": SCHEMA_VERSION, "d": 4})


def test_load_resolves_output_paths(tmp_path):
    (tmp_path / "c.json").write_text(json.dumps({"version": 1, "output": {"report": "r.json"}}))
    cfg = ScenarioConfig.load(tmp_path / "c.json")
    assert cfg.raw["output"]["report"] == str((tmp_path / "r.json").resolve())


# ---------------------------------------------------------------- classical


def test_classical_kick_values(classical):
    assert classical["baseline"] == 0.0
    assert classical["bob_only"] == 0.0
    assert classical["no_signaling_defect"] <= 1e-8
    assert classical["relative_signal"] >= 1e-3
    assert all(r["passed"] for r in classical["checks"])


def test_classical_theta_zero_collapses(cfg):
    out = run_classical(cfg.replace(geometry={"theta": 0.0}))
    z = out["theta_zero"]
    assert out["alice_and_bob"] == out["alice_only"] == z["alice_and_bob"]
    rows = {r["name"]: r for r in out["checks"]}
    assert not rows["classical |alice_and_bob - bob_only| (relative)"]["passed"]


def test_classical_rotation_variant(cfg):
    out = run_classical(cfg.replace(alice={"operation": "rotation"}))
    assert out["alice_operation"] == "rotation"
    assert out["baseline"] != 0.0
    assert out["no_signaling_defect"] <= 1e-8
    assert out["relative_signal"] >= 1e-3


# ------------------------------------------------------------------ quantum


def test_quantum_values(quantum):
    assert quantum["baseline"] == 0.0
    assert abs(quantum["alice_only"]) <= 1e-8 * quantum["signal_scale"]
    assert math.isclose(quantum["alice_and_bob"], quantum["G_Rc_h"], rel_tol=1e-10)
    assert quantum["spacelike_control"]["spacelike"]
    assert all(r["passed"] for r in quantum["checks"])


def test_quantum_spacelike_geometry_gives_no_signal(cfg):
    """A quarter turn leaves the rotated Charlie region spacelike from Alice: no signal."""
    q = run_quantum(cfg.replace(geometry={"theta": math.pi / 2}))
    assert abs(q["G_Rc_h"]) <= 1e-8 * q["signal_scale"]


# ------------------------------------------------------------------ reports


def test_report_is_deterministic(cfg, classical, quantum):
    a = dumps(build_report(cfg, classical=public(classical), quantum=quantum))
    b = dumps(build_report(cfg, classical=public(run_classical(cfg)), quantum=run_quantum(cfg)))
    assert a == b


def test_report_shape(cfg, classical):
    rep = build_report(cfg, classical=public(classical))
    assert rep["schema"] == "kgchannels.report/1"
    assert rep["passed"] is True
    assert "runtime_seconds" not in rep["provenance"]
    assert "runtime_seconds" in build_report(cfg, 1.5, classical=public(classical))["provenance"]
    json.loads(dumps(rep))


def test_row_tolerances_come_from_config(cfg, classical, quantum):
    echoed = set(cfg.tol.values())
    for r in classical["checks"] + quantum["checks"]:
        assert r["tolerance"] in echoed or r["tolerance"] == 0.0


# -------------------------------------------------------------- convergence


def test_convergence_requires_two_levels(cfg):
    with pytest.raises(ValueError):
        run_convergence(cfg, 1)


def test_convergence_resource_limit(cfg):
    with pytest.raises(ResourceLimitExceeded):
        run_convergence(cfg, 8)
