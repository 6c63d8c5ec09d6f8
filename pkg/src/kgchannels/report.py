"""JSON report assembly.

Reports are deterministic: keys are sorted, floats are written with ``repr``
precision and wall-clock time appears only on request.
"""

from __future__ import annotations

import json
import math
import platform
from importlib import metadata

import numpy as np
import scipy

from .config import ScenarioConfig

SCHEMA = "kgchannels.report/1"


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def provenance(cfg: ScenarioConfig, runtime: float | None = None) -> dict:
    g = cfg.grid
    out = {
        "package": _version(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "grid": {"d": g.d, "N": g.N, "L": g.L, "h": g.h},
        "seed": cfg.seed,
    }
    if runtime is not None:
        out["runtime_seconds"] = runtime
    return out


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else repr(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


def all_passed(rows) -> bool:
    return all(r["passed"] for r in rows)


def build_report(cfg: ScenarioConfig, runtime: float | None = None, **blocks) -> dict:
    """``blocks`` are named sections such as ``classical=``, ``quantum=``, ``suite=``."""
    rows = []
    for block in blocks.values():
        if isinstance(block, dict) and "checks" in block:
            rows += block["checks"]
        elif isinstance(block, list):
            rows += [r for r in block if "passed" in r]
    report = {
        "schema": SCHEMA,
        "config": cfg.raw,
        **{k: v for k, v in blocks.items() if v is not None},
        "passed": all_passed(rows),
        "provenance": provenance(cfg, runtime),
    }
    return _plain(report)


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
