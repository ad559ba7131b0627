"""`blue` command-line interface.

Thin client over the core package: every subcommand parses arguments,
calls the library, and writes text/CSV. Exit codes: 0 success, 1 validation
or input error, 2 numerical divergence. Angles are degrees on the CLI and
radians internally.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path


def _load_model(path: str | None):
    from .model import default_model, load_model

    return load_model(path) if path else default_model()


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x.strip()]


def _cmd_gains(args) -> int:
    from .control import gains_from_poles

    p1, p2 = _floats(args.poles)
    g = gains_from_poles(p1, p2)
    if args.json:
        print(json.dumps({"kp": g.kp, "kd": g.kd}))
    else:
        print(f"kp = {g.kp:.17g}")
        print(f"kd = {g.kd:.17g}")
    return 0


def _print_table(rows: list[dict], as_json: bool) -> None:
    if as_json:
        print(json.dumps(rows, indent=2))
        return
    cols = list(rows[0].keys())
    print(",".join(f"{c:>15}" for c in cols))
    for r in rows:
        print(",".join(f"{r[c]:>15.6g}" for c in cols))


def _cmd_drivetrain(args) -> int:
    from .design_check import speed_torque_table

    speeds = _floats(args.speeds)
    rows = speed_torque_table(speeds, power_w=args.power, r1=args.r1, r2=args.r2)
    _print_table(rows, args.json)
    return 0


def _cmd_design_check(args) -> int:
    from . import design_check as dc

    if args.check == "table":
        rows = dc.speed_torque_table(power_w=args.power, r1=args.r1, r2=args.r2)
        _print_table(rows, args.json)
        return 0
    if args.check == "utilization":
        u = dc.asme_elliptic_utilization(args.sa, args.sm, args.se, args.sy)
        out = {"Sa_Pa": args.sa, "Sm_Pa": args.sm, "Se_Pa": args.se,
               "Sy_Pa": args.sy, "utilization": u, "passes": u <= 1.0}
        print(json.dumps(out, indent=2) if args.json
              else f"utilization = {u:.6g} ({'pass' if u <= 1.0 else 'FAIL'})")
        return 0
    if args.check == "shaft":
        section = dc.ShaftSection(D=args.outer_d * 1e-3, d=args.inner_d * 1e-3)
        inputs = dc.StressInputs(Se=args.se, Sy=args.sy, fs=args.fs,
                                 Kf_bend=args.kf_bend, Kf_tors=args.kf_tors,
                                 Ma=args.ma, section=section)
        ta = dc.internal_shaft_torque_capacity(inputs)
        out = {"outer_diameter_m": section.D, "inner_diameter_m": section.d,
               "section_area_m2": section.area,
               "section_second_moment_m4": section.second_moment,
               "Se_Pa": inputs.Se, "fs": inputs.fs, "Kf_bend": inputs.Kf_bend,
               "Kf_tors": inputs.Kf_tors, "Ma_Nm": inputs.Ma,
               **dc.internal_shaft_terms(inputs),
               "torque_capacity_Nm": ta}
        print(json.dumps(out, indent=2) if args.json
              else f"alternating torque capacity = {ta:.6g} N*m")
        return 0
    if args.check == "base":
        F = dc.base_force_limit(Se=args.se, fs=args.fs, moment_arm=args.arm,
                                section_modulus=args.modulus, Kf=args.kf)
        out = {"Se_Pa": args.se, "fs": args.fs, "moment_arm": args.arm,
               "section_modulus": args.modulus, "Kf": args.kf,
               "allowable_stress_Pa": args.se / args.fs,
               "stress_at_limit_Pa": dc.base_stress(F, args.arm, args.modulus, args.kf),
               "force_limit_N": F}
        print(json.dumps(out, indent=2) if args.json
              else f"base force limit = {F:.6g} N")
        return 0
    # femur
    F = dc.femur_force_limit(Se=args.se, fs=args.fs, axial_force=args.axial,
                             area=args.area, c=args.c, I=args.inertia)
    out = {"Se_Pa": args.se, "fs": args.fs, "axial_force_N": args.axial,
           "area_m2": args.area, "c": args.c, "I": args.inertia,
           "allowable_stress_Pa": args.se / args.fs,
           "axial_stress_Pa": args.axial / args.area,
           "stress_at_limit_Pa": dc.femur_stress(F, args.axial, args.area,
                                                 args.c, args.inertia),
           "force_limit_N": F}
    print(json.dumps(out, indent=2) if args.json
          else f"femur force limit = {F:.6g} N")
    return 0


def _cmd_fk_sweep(args) -> int:
    from .kinematics import joint_sweep
    from .sim import Trajectory, write_csv

    m = _load_model(args.model)
    joints = [int(j) for j in args.joints.split(",") if j.strip()]
    table = joint_sweep(m, joints,
                        (math.radians(args.from_deg), math.radians(args.to_deg)),
                        args.steps)
    tr = Trajectory(columns=table.columns, data=table.data,
                    meta={"joints": ",".join(str(j) for j in joints)})
    write_csv(tr, args.out)
    print(f"wrote {table.data.shape[0]} rows to {args.out}")
    return 0


def _cmd_dyn(args) -> int:
    import numpy as np

    from .dynamics import energies, matrices
    from .model import JointState

    m = _load_model(args.model)
    q = np.array(_floats(args.q)) if args.q else np.zeros(6)
    qd = np.array(_floats(args.qd)) if args.qd else np.zeros(6)
    if q.shape != (6,) or qd.shape != (6,):
        raise ValueError("--q and --qd need six comma-separated values")
    mats = matrices(m, q, qd)
    en = energies(m, JointState(0.0, q, qd))
    if args.format == "csv":
        def block(name, arr):
            arr = np.atleast_2d(arr)
            for i, row in enumerate(arr):
                print(",".join([f"{name}{i+1}"] + [f"{x:.17g}" for x in row]))
        block("D", mats.D)
        block("C", mats.C)
        block("G", mats.G)
        print(f"T,{en.T:.17g}")
        print(f"V,{en.V:.17g}")
        print(f"L,{en.L:.17g}")
    else:
        with np.printoptions(precision=6, suppress=False):
            print("D [kg*m^2]:");  print(mats.D)
            print("C [kg*m^2/s]:");  print(mats.C)
            print("G [N*m]:");  print(mats.G)
        print(f"T = {en.T:.9g} J, V = {en.V:.9g} J, L = {en.L:.9g} J")
    return 0


def _resolve_config(name: str) -> Path:
    from importlib import resources

    p = Path(name)
    if p.exists():
        return p
    builtin = resources.files("bluebiped.data").joinpath(f"{name}.toml")
    if builtin.is_file():
        return Path(str(builtin))
    raise FileNotFoundError(f"config not found: {name}")


def _cmd_simulate(args) -> int:
    from .sim import load_config, run_scenario, write_csv

    cfg = load_config(_resolve_config(args.config))
    if args.seed is not None:
        cfg.seed = args.seed
    if args.electrical:
        cfg.electrical = True
    m = _load_model(args.model)
    tr = run_scenario(cfg, m)
    out = args.out or cfg.output or "trajectory.csv"
    write_csv(tr, out)
    print(f"wrote {tr.data.shape[0]} rows to {out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="blue",
                                 description="BLUE biped simulator and design checks")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gains", help="PD gains from pole magnitudes")
    p.add_argument("--poles", required=True, help="two pole magnitudes, e.g. 8,40")
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_gains)

    p = sub.add_parser("drivetrain", help="belt drivetrain speed/torque table")
    p.add_argument("--power", type=float, default=8.0, help="transmitted power [W]")
    p.add_argument("--speeds", required=True, help="input speeds [rpm], comma-separated")
    p.add_argument("--r1", type=float, default=0.75)
    p.add_argument("--r2", type=float, default=0.525)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=_cmd_drivetrain)

    p = sub.add_parser("design-check", help="mechanical design-limit checks")
    sc = p.add_subparsers(dest="check", required=True)

    t = sc.add_parser("table", help="published speed/torque verification table")
    t.add_argument("--power", type=float, default=8.0)
    t.add_argument("--r1", type=float, default=0.75)
    t.add_argument("--r2", type=float, default=0.525)
    t.add_argument("--json", action="store_true")
    t.set_defaults(fn=_cmd_design_check)

    t = sc.add_parser("utilization", help="elliptic fatigue utilization")
    t.add_argument("--sa", type=float, required=True, help="alternating stress [Pa]")
    t.add_argument("--sm", type=float, required=True, help="mean stress [Pa]")
    t.add_argument("--se", type=float, required=True, help="endurance limit [Pa]")
    t.add_argument("--sy", type=float, required=True, help="yield strength [Pa]")
    t.add_argument("--json", action="store_true")
    t.set_defaults(fn=_cmd_design_check)

    t = sc.add_parser("shaft", help="internal shaft alternating-torque capacity")
    t.add_argument("--outer-d", type=float, required=True, help="outer diameter [mm]")
    t.add_argument("--inner-d", type=float, default=0.0, help="inner diameter [mm]")
    t.add_argument("--se", type=float, required=True, help="endurance limit [Pa]")
    t.add_argument("--sy", type=float, default=1e9, help="yield strength [Pa]")
    t.add_argument("--fs", type=float, default=2.0)
    t.add_argument("--kf-bend", type=float, default=1.0)
    t.add_argument("--kf-tors", type=float, default=1.0)
    t.add_argument("--ma", type=float, default=0.0, help="alternating moment [N*m]")
    t.add_argument("--json", action="store_true")
    t.set_defaults(fn=_cmd_design_check)

    t = sc.add_parser("base", help="actuator-base force limit")
    t.add_argument("--se", type=float, default=64.93e6)
    t.add_argument("--fs", type=float, default=2.0)
    t.add_argument("--arm", type=float, default=1.57)
    t.add_argument("--modulus", type=float, default=5.645e-7)
    t.add_argument("--kf", type=float, default=1.45)
    t.add_argument("--json", action="store_true")
    t.set_defaults(fn=_cmd_design_check)

    t = sc.add_parser("femur", help="femur combined tension+bending force limit")
    t.add_argument("--se", type=float, default=60e6)
    t.add_argument("--fs", type=float, default=2.0)
    t.add_argument("--axial", type=float, default=57.5)
    t.add_argument("--area", type=float, default=2.4e-4)
    t.add_argument("--c", type=float, default=190e-5)
    t.add_argument("--inertia", type=float, default=7.246e-9)
    t.add_argument("--json", action="store_true")
    t.set_defaults(fn=_cmd_design_check)

    p = sub.add_parser("fk-sweep", help="joint sweep table of frame origins")
    p.add_argument("--model", default=None)
    p.add_argument("--joints", default="0,1,4",
                   help="joint indices (0 = passive support angle), e.g. 0,1,4")
    p.add_argument("--from", dest="from_deg", type=float, default=0.0,
                   help="start angle [deg]")
    p.add_argument("--to", dest="to_deg", type=float, default=15.0,
                   help="end angle [deg]")
    p.add_argument("--steps", type=int, default=16)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_fk_sweep)

    p = sub.add_parser("dyn", help="print D, C, G and energies at a state")
    p.add_argument("--model", default=None)
    p.add_argument("--q", default=None, help="six joint angles [rad], comma-separated")
    p.add_argument("--qd", default=None, help="six joint rates [rad/s], comma-separated")
    p.add_argument("--format", choices=("pretty", "csv"), default="pretty")
    p.set_defaults(fn=_cmd_dyn)

    p = sub.add_parser("simulate", help="run a scenario config, write CSV")
    p.add_argument("--config", required=True,
                   help="config path or builtin name (zero_input, tracking)")
    p.add_argument("--model", default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None,
                   help="recorded in output metadata (scenarios are deterministic)")
    p.add_argument("--electrical", action="store_true",
                   help="integrate armature current states instead of the "
                        "steady-state approximation")
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=_cmd_serve)

    return ap


def main(argv: list[str] | None = None) -> int:
    from .errors import ConfigError, DegenerateModelError, DivergenceError, ModelError

    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except DivergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ModelError, ConfigError, DegenerateModelError, FileNotFoundError,
            ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
