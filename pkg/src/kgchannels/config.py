"""Versioned JSON configuration of a scenario run."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .fields import SpatialGrid, TestFunction
from .geometry import ScenarioGeometry
from .green import KGParams
from .rotation import LocalizedRotation

SCHEMA_VERSION = 1

DEFAULT_TOLERANCES = {
    "causality": 1e-8,
    "antisymmetry": 1e-8,
    "symplectic_chain": 1e-5,
    "jacobian": 1e-6,
    "sigma_invariance": 1e-3,
    "bracket_preservation": 1e-4,
    "channel_locality": 1e-10,
    "channel_routes": 1e-5,
    "no_signaling": 1e-8,
    "signal": 1e-3,
    "convention_lock": 1e-5,
    "rotation_invariance": 1e-6,
    "tn_zero": 1e-10,
    "tn_limit": 0.1,
    "leapfrog": 1e-3,
    "surface_independence": 1e-5,
    "kernel_quotient": 1e-5,
    "causality_control": 1e-3,
    "peierls_leibniz": 1e-8,
    "jacobi": 1e-9,
    "energy_drift": 1e-6,
    "order_slack": 0.5,
}

DEFAULT_SUITE = {
    "spacelike_pairs": 50,
    "control_pairs": 20,
    "antisymmetry_pairs": 50,
    "chain_pairs": 20,
    "jacobian_points": 100,
    "sigma_pairs": 20,
    "lock_pairs": 30,
    "channel_cases": 10,
    "leapfrog_time": 0.5,
    "refine_max_nodes": 1 << 20,
}


def default_config(d: int = 2) -> dict:
    """Reference layout: Alice at ``-lambda e1``, Charlie at ``+lambda e1``."""
    N = 128 if d == 2 else 64
    zero = [0.0] * (d - 1)
    return {
        "version": SCHEMA_VERSION,
        "d": d,
        "grid": {"N": N, "L": 1.6},
        "mass": 1.0,
        "time_nodes": 64,
        "geometry": {"r1": 0.8, "r2": 1.2, "s": 0.2, "lambda": 0.5, "theta": math.pi, "axis": 2},
        "functions": {
            "alice": {"center": [-0.5, *zero], "radius": 0.09, "half_width": 0.09, "t0": -0.01, "amplitude": 1000.0},
            "charlie": {"center": [0.5, *zero], "radius": 0.09, "half_width": 0.09, "t0": 0.01, "amplitude": 1000.0},
            "observer": {"center": [1.0, 1.0, *zero[1:]], "radius": 0.1, "half_width": 0.04, "t0": 0.0, "amplitude": 1000.0},
            "charlie_offset": {"center": [0.54, *zero], "radius": 0.07, "half_width": 0.07, "t0": 0.01, "amplitude": 1000.0},
            "seed_field": {"center": [-0.4, *zero], "radius": 0.09, "half_width": 0.09, "t0": 0.0, "amplitude": 1000.0},
        },
        "alice": {"operation": "kick", "function": "alice"},
        "alice_rotation": {
            "r1": 0.1,
            "r2": 0.19,
            "theta": math.pi / 2,
            "initial_state": "seed_field",
            "observable": "charlie_offset",
        },
        "charlie": {"function": "charlie", "tn_n": 1000},
        "observer": "observer",
        "tolerances": dict(DEFAULT_TOLERANCES),
        "suite": dict(DEFAULT_SUITE),
        "seed": 20240611,
        "output": {"report": None, "dump_dir": None},
    }


def _merge(base: dict, over: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "functions":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass(frozen=True)
class ScenarioConfig:
    raw: dict

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        if data.get("version") != SCHEMA_VERSION:
            raise ConfigError(f"unsupported config version {data.get('version')!r}; expected {SCHEMA_VERSION}")
        d = data.get("d", 2)
        if d not in (2, 3):
            raise ConfigError(f"d must be 2 or 3, got {d}")
        return cls(_merge(default_config(d), data))

    @classmethod
    def load(cls, path) -> "ScenarioConfig":
        with open(path, encoding="utf-8") as fh:
            cfg = cls.from_dict(json.load(fh))
        out = cfg.raw["output"]
        base = Path(path).resolve().parent
        for key in ("report", "dump_dir"):
            if out.get(key):
                out[key] = str((base / out[key]).resolve())
        return cfg

    @classmethod
    def default(cls, d: int = 2) -> "ScenarioConfig":
        return cls(default_config(d))

    def replace(self, **changes) -> "ScenarioConfig":
        return ScenarioConfig(_merge(self.raw, changes))

    def to_json(self) -> str:
        return json.dumps(self.raw, indent=2, sort_keys=True)

    # typed views -------------------------------------------------------

    @property
    def d(self) -> int:
        return self.raw["d"]

    @property
    def grid(self) -> SpatialGrid:
        g = self.raw["grid"]
        return SpatialGrid(self.d, int(g["N"]), float(g["L"]))

    @property
    def params(self) -> KGParams:
        return KGParams(float(self.raw["mass"]), self.grid, int(self.raw["time_nodes"]))

    @property
    def geometry(self) -> ScenarioGeometry:
        g = self.raw["geometry"]
        return ScenarioGeometry(g["r1"], g["r2"], g["s"], g["lambda"], self.d, g.get("axis", 2))

    @property
    def theta(self) -> float:
        return float(self.raw["geometry"]["theta"])

    @property
    def bob(self) -> LocalizedRotation:
        g = self.raw["geometry"]
        return LocalizedRotation(g["r1"], g["r2"], self.theta, g.get("axis", 2))

    def function(self, name: str) -> TestFunction:
        try:
            spec = self.raw["functions"][name]
        except KeyError:
            raise ConfigError(f"unknown test function id {name!r}") from None
        return TestFunction.from_dict(spec)

    @property
    def alice_function(self) -> TestFunction:
        return self.function(self.raw["alice"]["function"])

    @property
    def charlie_function(self) -> TestFunction:
        """Charlie's observable; the rotation variant may name its own (off-centre) one."""
        if self.raw["alice"]["operation"] == "rotation" and self.raw["alice_rotation"].get("observable"):
            return self.function(self.raw["alice_rotation"]["observable"])
        return self.function(self.raw["charlie"]["function"])

    @property
    def observer_function(self) -> TestFunction:
        return self.function(self.raw["observer"])

    @property
    def tol(self) -> dict:
        return self.raw["tolerances"]

    @property
    def suite(self) -> dict:
        return self.raw["suite"]

    @property
    def seed(self) -> int:
        return int(self.raw["seed"])
