"""Alice / Bob / Charlie runs in the classical and the quantized theory."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .classical import (
    DiracState,
    KickChannel,
    PolynomialFunctional,
    RotationChannel,
    apply_channel,
    apply_channel_to_state,
    eval_functional,
    lattice_shift,
)
from .config import ScenarioConfig
from .errors import KGChannelsError
from .geometry import are_spacelike
from .green import green_solution, write_cauchy_binary, write_cauchy_csv
from .quantum import VacuumContext, quantum_scenario, tn_expectation_defect, two_point
from .rotation import LocalizedRotation
from .symplectic import signal_scale, solution_norm


def check_row(name: str, value: float, tolerance: float, mode: str = "max") -> dict:
    """``mode='max'``: pass iff value <= tolerance; ``'min'``: pass iff value >= tolerance."""
    passed = value <= tolerance if mode == "max" else value >= tolerance
    return {"name": name, "value": float(value), "tolerance": float(tolerance), "mode": mode, "passed": bool(passed)}


# ------------------------------------------------------------------ validation


def validate_config(cfg: ScenarioConfig) -> list[str]:
    """Every geometric and numerical precondition of a run; empty means runnable."""
    out: list[str] = []
    raw = cfg.raw
    try:
        grid = cfg.grid
    except (KGChannelsError, ValueError) as exc:
        return [f"grid: {exc}"]
    if not float(raw["mass"]) > 0:
        out.append("mass must be strictly positive")
    if int(raw["time_nodes"]) < 2:
        out.append("time_nodes must be at least 2")
    for v in cfg.geometry.violations():
        out.append(v.replace("constraint", "geometry constraint"))
    names = set(raw["functions"])
    try:
        fns = {k: cfg.function(k) for k in names}
    except (KGChannelsError, ValueError, TypeError) as exc:
        return out + [f"functions: {exc}"]
    for k, f in fns.items():
        if f.d != cfg.d:
            out.append(f"function {k!r} has dimension {f.d}, config has d={cfg.d}")
    if out:
        return out
    max_time = max(f.max_abs_time for f in fns.values())
    for k, f in sorted(fns.items()):
        reach = max(abs(c) for c in f.center) + f.radius + f.max_abs_time + max_time
        if reach > grid.L - 2 * grid.h:
            out.append(
                f"causal margin: function {k!r} reaches {reach:.4g} > L - 2h = {grid.L - 2 * grid.h:.4g}"
            )
    geo = cfg.geometry
    alice = raw["alice"]
    if alice.get("operation") not in ("kick", "rotation"):
        out.append("alice.operation must be 'kick' or 'rotation'")
    for role in ("alice", "charlie"):
        if raw[role]["function"] not in names:
            out.append(f"{role}.function refers to unknown id {raw[role]['function']!r}")
    if raw["observer"] not in names:
        out.append(f"observer refers to unknown id {raw['observer']!r}")
    if out:
        return out
    a, c = cfg.alice_function, cfg.charlie_function
    if not a.inside(geo.o_minus):
        out.append("alice's test function is not inside O(-)")
    if not c.inside(geo.o_plus):
        out.append("charlie's test function is not inside O(+)")
    if not are_spacelike(cfg.observer_function.enclosing_cone(), geo.bob):
        out.append("observer's test function is not spacelike from O(r2)")
    ar = raw["alice_rotation"]
    if not 0 < ar["r1"] < ar["r2"]:
        out.append("alice_rotation needs 0 < r1 < r2")
    elif ar["r2"] > geo.s:
        out.append("alice_rotation must be localized inside B(-): r2 <= s")
    center = -geo.lam * np.eye(cfg.d)[0]
    try:
        lattice_shift(grid, center)
    except KGChannelsError:
        out.append("alice_rotation center -lambda e1 is not a lattice vector (lambda must be a multiple of h)")
    if ar.get("initial_state") is not None and ar["initial_state"] not in names:
        out.append(f"alice_rotation.initial_state refers to unknown id {ar['initial_state']!r}")
    if int(raw["charlie"].get("tn_n", 1)) < 1:
        out.append("charlie.tn_n must be a positive integer")
    tol = raw["tolerances"]
    for k, v in tol.items():
        if not (isinstance(v, (int, float)) and v >= 0):
            out.append(f"tolerance {k!r} must be a non-negative number")
    return out


# ------------------------------------------------------------------- classical


def alice_channel(cfg: ScenarioConfig):
    p = cfg.params
    if cfg.raw["alice"]["operation"] == "kick":
        return KickChannel.from_source(cfg.alice_function, p)
    ar = cfg.raw["alice_rotation"]
    rot = LocalizedRotation(ar["r1"], ar["r2"], ar["theta"], cfg.geometry.axis)
    center = tuple(-cfg.geometry.lam * np.eye(cfg.d)[0])
    return RotationChannel(rot, center)


def initial_state(cfg: ScenarioConfig) -> DiracState:
    """``delta_0`` for the kick; ``delta_{G g}`` for the rotation variant."""
    p = cfg.params
    name = cfg.raw["alice_rotation"].get("initial_state")
    if cfg.raw["alice"]["operation"] == "kick" or name is None:
        return DiracState.zero(p)
    return DiracState(p, green_solution(cfg.function(name), p))


def _classical_values(cfg: ScenarioConfig, bob: RotationChannel) -> dict:
    c = cfg.charlie_function
    C = PolynomialFunctional.linear(c)
    nu = initial_state(cfg)
    alice = alice_channel(cfg)
    after_a = apply_channel_to_state(alice, nu)
    after_b = apply_channel_to_state(bob, nu)
    after_ab = apply_channel_to_state(bob, after_a)
    return {
        "states": (nu, after_a, after_b, after_ab),
        "alice": alice,
        "baseline": float(eval_functional(C, nu)),
        "alice_only": float(eval_functional(C, after_a)),
        "bob_only": float(eval_functional(C, after_b)),
        "alice_and_bob": float(eval_functional(C, after_ab)),
    }


def classical_scale(cfg: ScenarioConfig) -> float:
    p = cfg.params
    c = cfg.charlie_function
    nc = solution_norm(green_solution(c, p), p)
    if cfg.raw["alice"]["operation"] == "kick":
        return signal_scale(c, cfg.alice_function, p)
    nu = initial_state(cfg)
    return 2.0 * nc * (solution_norm(nu.phi, p) if nu.phi is not None else 0.0)


def run_classical(cfg: ScenarioConfig) -> dict:
    """Charlie's ``F_c`` on ``nu``, ``nu o Y_A`` and ``nu o Y_A o Y_B`` (Alice first, then Bob)."""
    tol = cfg.tol
    p = cfg.params
    bob = RotationChannel(cfg.bob)
    vals = _classical_values(cfg, bob)
    scale = classical_scale(cfg)
    base = vals["baseline"]
    nosig = abs(vals["alice_only"] - base) / scale
    signal = abs(vals["alice_and_bob"] - vals["bob_only"]) / scale

    zero = _classical_values(cfg, RotationChannel(LocalizedRotation(cfg.bob.r1, cfg.bob.r2, 0.0, cfg.bob.axis)))
    collapse = max(abs(zero[k] - zero["baseline"]) for k in ("alice_only", "alice_and_bob")) / scale

    o = cfg.observer_function
    after_a = vals["states"][1]
    obs_state = abs(
        eval_functional(PolynomialFunctional.linear(o), apply_channel_to_state(bob, after_a))
        - eval_functional(PolynomialFunctional.linear(o), after_a)
    )
    obs_scale = 2.0 * solution_norm(green_solution(o, p), p) * max(
        solution_norm(after_a.phi, p) if after_a.phi is not None else 0.0, 1e-300
    )
    obs_functional = apply_channel(bob, PolynomialFunctional.linear(o)) == PolynomialFunctional.linear(o)

    checks = [
        check_row("classical alice_only - baseline (relative)", nosig, tol["no_signaling"]),
        check_row("classical |alice_and_bob - bob_only| (relative)", signal, tol["signal"], "min"),
        check_row("classical theta=0 control collapse (relative)", collapse, tol["no_signaling"]),
        check_row("classical observer spacelike from O(r2) unchanged by Bob (relative)", obs_state / obs_scale, tol["channel_locality"]),
        check_row("classical observer functional fixed structurally", 0.0 if obs_functional else 1.0, 0.0),
    ]
    return {
        "alice_operation": cfg.raw["alice"]["operation"],
        "order": "state: nu -> nu o Y_Alice -> nu o Y_Alice o Y_Bob",
        "baseline": base,
        "alice_only": vals["alice_only"],
        "bob_only": vals["bob_only"],
        "alice_and_bob": vals["alice_and_bob"],
        "signal_scale": scale,
        "no_signaling_defect": nosig,
        "relative_signal": signal,
        "theta_zero": {k: zero[k] for k in ("baseline", "alice_only", "bob_only", "alice_and_bob")},
        "observer_state_defect": obs_state,
        "checks": checks,
        "_states": vals["states"],
    }


# --------------------------------------------------------------------- quantum


def spacelike_control(cfg: ScenarioConfig):
    """Alice's function turned by 90 degrees: its region stays spacelike from ``R_theta(supp c)``."""
    return cfg.alice_function.rotated(math.pi / 2, cfg.geometry.axis)


def run_quantum(cfg: ScenarioConfig) -> dict:
    tol = cfg.tol
    p = cfg.params
    ctx = VacuumContext(p)
    c, h = cfg.charlie_function, cfg.alice_function
    n = int(cfg.raw["charlie"]["tn_n"])
    rec = quantum_scenario(c, h, cfg.theta, cfg.geometry, ctx, n)
    scale = signal_scale(c, h, p)
    rc = c.rotated(cfg.theta, cfg.geometry.axis)

    hc = spacelike_control(cfg)
    ctrl_ok = are_spacelike(hc.enclosing_cone(), rc.enclosing_cone())
    ctrl = {
        "G_Rc_h": ctx.G(rc, hc),
        "tn_defect": tn_expectation_defect(n, rc, hc, ctx),
        "spacelike": ctrl_ok,
    }
    zero = quantum_scenario(c, h, 0.0, cfg.geometry, ctx, n)
    w_c = two_point(c, c, p).real
    w_rc = two_point(rc, rc, p).real
    limit = -rec["G_Rc_h"]
    tn_rel = abs(rec["tn_defect_alice_and_bob"] - limit) / abs(limit) if limit else math.inf
    checks = [
        check_row("quantum alice_only - baseline (relative)", abs(rec["alice_only"] - rec["baseline"]) / scale, tol["no_signaling"]),
        check_row("quantum |alice_and_bob - baseline| (relative)", abs(rec["alice_and_bob"] - rec["baseline"]) / scale, tol["signal"], "min"),
        check_row("quantum theta=0 control (relative)", abs(zero["alice_and_bob"]) / scale, tol["no_signaling"]),
        check_row("quantum vacuum rotation invariance |w2(Rc,Rc) - w2(c,c)|", abs(w_rc - w_c), tol["rotation_invariance"]),
        check_row("Tn defect, spacelike pair", abs(rec["tn_defect_alice_only"]), tol["tn_zero"]),
        check_row("Tn defect vs -G(Rc, h) (relative)", tn_rel, tol["tn_limit"]),
        check_row("spacelike-h control G (relative)", abs(ctrl["G_Rc_h"]) / scale if ctrl_ok else math.inf, tol["no_signaling"]),
        check_row("spacelike-h control Tn defect", abs(ctrl["tn_defect"]) if ctrl_ok else math.inf, tol["tn_zero"]),
    ]
    return {
        "baseline": rec["baseline"],
        "alice_only": rec["alice_only"],
        "alice_and_bob": rec["alice_and_bob"],
        "no_signaling_defect": abs(rec["alice_only"] - rec["baseline"]) / scale,
        "signal_scale": scale,
        "G_c_h": rec["G_c_h"],
        "G_Rc_h": rec["G_Rc_h"],
        "tn_n": n,
        "tn_defect": rec["tn_defect_alice_and_bob"],
        "tn_defect_alice_only": rec["tn_defect_alice_only"],
        "w2_c": w_c,
        "w2_Rc": w_rc,
        "theta_zero": {k: zero[k] for k in ("baseline", "alice_only", "alice_and_bob")},
        "spacelike_control": ctrl,
        "convention": dict(ctx.convention),
        "checks": checks,
    }


# --------------------------------------------------------------------- outputs


def dump_states(block: dict, directory, mass: float) -> list[str]:
    """Plot-ready CSV dumps of the classical states (Cauchy data on the lattice)."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    names = ("initial", "after_alice", "after_bob", "after_alice_and_bob")
    written = []
    for name, state in zip(names, block["_states"]):
        path = d / f"state_{name}.csv"
        write_cauchy_csv(path, state.data, mass)
        written.append(str(path))
    return written


def dump_green(cfg: ScenarioConfig, name: str, path, fmt: str = "csv") -> str:
    p = cfg.params
    sol = green_solution(cfg.function(name), p)
    if fmt == "csv":
        write_cauchy_csv(path, sol.data, p.mass)
    elif fmt == "bin":
        write_cauchy_binary(path, sol.data, p.mass)
    else:
        raise ValueError("format must be 'csv' or 'bin'")
    return str(path)


def public(block: dict) -> dict:
    return {k: v for k, v in block.items() if not k.startswith("_")}

