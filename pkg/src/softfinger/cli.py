"""Command-line front end.

Thin shells over the library: every artifact a subcommand writes equals
the direct library result.  Angles cross this boundary in degrees,
lengths in millimetres.  Exit codes: 0 success, 2 bad configuration or
input file, 3 numerical failure.
"""

import argparse
import hashlib
import json
import math
import os
import sys

import numpy as np

from softfinger import (
    __version__,
    calibration,
    csvio,
    errors,
    geometry,
    hydraulic,
    kinematics,
    manipulability,
    pneumatic,
    sim,
)
from softfinger._kernels import BACKEND

PNEUMATIC_CSV_HEADER = ("l_mm", "P_MPa", "f_N", "dfdl_N_per_mm")
FORCE_CSV_HEADER = ("delta_y_mm", "P_MPa", "F_N")
SCATTER_CSV_HEADER = ("Q_mm", "l_mm", "l_fit_mm")


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _outdir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


def _load_geometry(args):
    if args.geometry is None:
        return geometry.reference_geometry(), {}
    return geometry.load_geometry(args.geometry), {args.geometry: _sha256(args.geometry)}


def _write_meta(out_dir, name, command, inputs, params, outputs) -> None:
    meta = {
        "command": command,
        "package_version": __version__,
        "backend": BACKEND,
        "inputs_sha256": inputs,
        "params": params,
        "outputs": sorted(outputs),
    }
    with open(os.path.join(out_dir, name), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _matrix(m) -> list:
    return [[float(v) for v in row] for row in np.asarray(m)]


def cmd_sweep(args) -> int:
    geom, inputs = _load_geometry(args)
    out_dir = _outdir(args)
    grid = manipulability.sweep_workspace(
        geom, n1=args.n1, n2=args.n2, normalized=not args.raw
    )
    csv_path = os.path.join(out_dir, "sweep.csv")
    manipulability.write_grid_csv(grid, csv_path)
    _write_meta(
        out_dir, "sweep_meta.json", "sweep", inputs,
        {
            "n1": args.n1,
            "n2": args.n2,
            "normalized": not args.raw,
            "geometry": geom.to_dict(),
        },
        ["sweep.csv"],
    )
    print(f"wrote {csv_path} ({args.n1}x{args.n2} grid)")
    return 0


def cmd_contour(args) -> int:
    geom, inputs = _load_geometry(args)
    out_dir = _outdir(args)
    fixed = manipulability.FixedJoint(args.fixed_joint)
    trace = manipulability.contour_fixed(
        geom, fixed, math.radians(args.fixed_deg), n=args.n
    )
    slope, r2 = manipulability.slope_estimate(trace)
    csv_path = os.path.join(out_dir, "contour.csv")
    manipulability.write_trace_csv(trace, csv_path)
    summary = {
        "fixed_joint": fixed.value,
        "fixed_deg": args.fixed_deg,
        "n": args.n,
        "slope_deg_per_mm": slope,
        "r2": r2,
    }
    summary_path = os.path.join(out_dir, "contour_summary.json")
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_meta(
        out_dir, "contour_meta.json", "contour", inputs,
        {"fixed_joint": fixed.value, "fixed_deg": args.fixed_deg, "n": args.n,
         "geometry": geom.to_dict()},
        ["contour.csv", "contour_summary.json"],
    )
    print(f"wrote {csv_path}; slope {slope:.4f} deg/mm, r^2 {r2:.6f}")
    return 0


def cmd_compliance(args) -> int:
    geom, inputs = _load_geometry(args)
    out_dir = _outdir(args)
    if args.chamber is None:
        chamber = hydraulic.HydraulicChamber()
    else:
        chamber = hydraulic.load_chamber(args.chamber)
        inputs[args.chamber] = _sha256(args.chamber)
    a_eff = args.a_eff if args.a_eff is not None else math.pi * chamber.d0 ** 2 / 4.0
    c_h = args.c_h if args.c_h is not None else hydraulic.propose_hydraulic_compliance(chamber)
    params = hydraulic.ComplianceParams(C_h=c_h, A_eff=a_eff)
    q = [math.radians(v) for v in args.q_deg]
    chain = hydraulic.stiffness_chain(geom, q, params)
    stiff_path = os.path.join(out_dir, "stiffness.json")
    payload = {
        "q_deg": list(args.q_deg),
        "C_h_mm_per_N": params.C_h,
        "A_eff_mm2": params.A_eff,
        "C_l": params.C_l,
        "J": _matrix(chain.J),
        "K_q": _matrix(chain.K_q),
        "C_q": _matrix(chain.C_q),
        "J_a": _matrix(chain.J_a),
        "K_a": _matrix(chain.K_a),
        "C_a": _matrix(chain.C_a),
        "k_a_is_pseudoinverse": chain.k_a_is_pseudoinverse,
    }
    with open(stiff_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    lo, hi = args.dy_range
    if not (lo < hi):
        raise errors.ConfigError("--dy-range must be MIN MAX with MIN < MAX")
    rows = []
    for i in range(args.dy_steps):
        dy = lo + (hi - lo) * (i / (args.dy_steps - 1))
        force, pressure = hydraulic.solve_hydraulic_force(chamber, dy)
        rows.append((dy, pressure, force))
    curve_path = os.path.join(out_dir, "force_curve.csv")
    csvio.write_rows(curve_path, FORCE_CSV_HEADER, rows)
    _write_meta(
        out_dir, "compliance_meta.json", "compliance", inputs,
        {
            "q_deg": list(args.q_deg),
            "chamber": chamber.to_dict(),
            "C_h_mm_per_N": params.C_h,
            "A_eff_mm2": params.A_eff,
            "dy_range": [lo, hi],
            "dy_steps": args.dy_steps,
            "geometry": geom.to_dict(),
        },
        ["stiffness.json", "force_curve.csv"],
    )
    print(f"wrote {stiff_path} and {curve_path}")
    return 0


def cmd_pneumatic_curve(args) -> int:
    out_dir = _outdir(args)
    inputs = {}
    if args.model is None:
        model = pneumatic.PneumaticModel()
    else:
        model = pneumatic.load_model(args.model)
        inputs[args.model] = _sha256(args.model)
    lo, hi = args.l_range
    if not (lo < hi):
        raise errors.ConfigError("--l-range must be MIN MAX with MIN < MAX")
    rows = []
    for i in range(args.steps):
        l = lo + (hi - lo) * (i / (args.steps - 1))
        pressure = pneumatic.gas_pressure(model, l)
        rows.append((
            l,
            pressure,
            pneumatic.gas_force(model, l),
            pneumatic.gas_tangent_stiffness(model, l),
        ))
    csv_path = os.path.join(out_dir, "pneumatic_curve.csv")
    csvio.write_rows(csv_path, PNEUMATIC_CSV_HEADER, rows)
    _write_meta(
        out_dir, "pneumatic_curve_meta.json", "pneumatic-curve", inputs,
        {"model": model.to_dict(), "l_range": [lo, hi], "steps": args.steps},
        ["pneumatic_curve.csv"],
    )
    print(f"wrote {csv_path}")
    return 0


def cmd_calibrate(args) -> int:
    geom, inputs = _load_geometry(args)
    out_dir = _outdir(args)
    samples = calibration.load_dataset(args.dataset)
    inputs[args.dataset] = _sha256(args.dataset)
    report = calibration.validate_dataset(geom, samples)
    report_path = os.path.join(out_dir, "calibration_report.json")
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    outputs = ["calibration_report.json"]
    q_cols, l_cols = calibration._columns(geom, samples)
    for i, rep in enumerate(report.actuators):
        rows = [
            (q, l, rep.fit.k * q + rep.fit.b)
            for q, l in zip(q_cols[i], l_cols[i])
        ]
        name = f"scatter_l{i + 1}.csv"
        csvio.write_rows(os.path.join(out_dir, name), SCATTER_CSV_HEADER, rows)
        outputs.append(name)
    _write_meta(
        out_dir, "calibrate_meta.json", "calibrate", inputs,
        {"n_samples": report.n_samples, "geometry": geom.to_dict()},
        outputs,
    )
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    r2s = ", ".join(f"{rep.fit.r2:.4f}" for rep in report.actuators)
    print(f"wrote {report_path}; r^2 per actuator: {r2s}")
    return 0


def cmd_simulate(args) -> int:
    geom, inputs = _load_geometry(args)
    out_dir = _outdir(args)
    scenario = sim.load_scenario(args.scenario)
    inputs[args.scenario] = _sha256(args.scenario)
    params = sim.SimParams(
        inertia=tuple(args.inertia),
        k_joint=tuple(args.k_joint),
        damping=None if args.damping is None else tuple(args.damping),
        gravity=tuple(args.gravity),
        link_masses=tuple(args.masses),
        dt=args.dt,
        record_stride=args.stride,
    )
    traj = sim.run_scenario(scenario, params, geom)
    csv_path = os.path.join(out_dir, "trajectory.csv")
    sim.write_trajectory_csv(traj, csv_path)
    _write_meta(
        out_dir, "simulate_meta.json", "simulate", inputs,
        {
            "dt": params.dt,
            "record_stride": params.record_stride,
            "inertia": list(params.inertia),
            "k_joint": list(params.k_joint),
            "damping": list(params.effective_damping()),
            "gravity": list(params.gravity),
            "link_masses": list(params.link_masses),
            "geometry": geom.to_dict(),
        },
        ["trajectory.csv"],
    )
    print(f"wrote {csv_path} ({traj.t.size} records)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="softfinger",
        description="Soft-rigid hybrid finger analysis toolkit",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument(
            "--geometry", metavar="JSON",
            help="finger geometry file (default: packaged reference)",
        )
        p.add_argument(
            "--out", metavar="DIR", default=".",
            help="output directory (default: current)",
        )

    p = sub.add_parser("sweep", help="normalized manipulability grid CSV")
    common(p)
    p.add_argument("--n1", type=int, default=41, help="theta1 samples")
    p.add_argument("--n2", type=int, default=41, help="theta2 samples")
    p.add_argument(
        "--raw", action="store_true",
        help="emit raw manipulability instead of normalized",
    )
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("contour", help="actuator-motion trace at a fixed joint")
    common(p)
    p.add_argument(
        "--fixed-joint", choices=[j.value for j in manipulability.FixedJoint],
        default="theta1", help="which base joint stays fixed",
    )
    p.add_argument(
        "--fixed-deg", type=float, default=0.0,
        help="fixed joint value, degrees",
    )
    p.add_argument("--n", type=int, default=81, help="trace samples")
    p.set_defaults(func=cmd_contour)

    p = sub.add_parser(
        "compliance", help="stiffness/compliance matrices and force curve"
    )
    common(p)
    p.add_argument("--chamber", metavar="JSON", help="hydraulic chamber file")
    p.add_argument(
        "--q-deg", type=float, nargs=3, default=(0.0, 0.0, 0.0),
        metavar=("T1", "T2", "T3"), help="joint configuration, degrees",
    )
    p.add_argument(
        "--c-h", type=float, default=None,
        help="chamber compliance mm/N (default: derived from the chamber)",
    )
    p.add_argument(
        "--a-eff", type=float, default=None,
        help="effective area mm^2 (default: pi*d0^2/4)",
    )
    p.add_argument(
        "--dy-range", type=float, nargs=2, default=(-2.0, 2.0),
        metavar=("MIN", "MAX"), help="axial displacement sweep, mm",
    )
    p.add_argument("--dy-steps", type=int, default=81)
    p.set_defaults(func=cmd_compliance)

    p = sub.add_parser("pneumatic-curve", help="gas actuator P/f/stiffness curve")
    p.add_argument("--model", metavar="JSON", help="pneumatic model file")
    p.add_argument(
        "--out", metavar="DIR", default=".",
        help="output directory (default: current)",
    )
    p.add_argument(
        "--l-range", type=float, nargs=2, default=(0.0, 20.0),
        metavar=("MIN", "MAX"), help="actuator length sweep, mm",
    )
    p.add_argument("--steps", type=int, default=101)
    p.set_defaults(func=cmd_pneumatic_curve)

    p = sub.add_parser("calibrate", help="fit piston-position calibration")
    common(p)
    p.add_argument("dataset", help="calibration CSV (Q1..Q3, theta1..3)")
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("simulate", help="run a compliant-motion scenario")
    common(p)
    p.add_argument("scenario", help="scenario JSON script")
    p.add_argument("--dt", type=float, default=1e-3, help="time step, s")
    p.add_argument("--stride", type=int, default=1, help="record stride")
    p.add_argument(
        "--inertia", type=float, nargs=3, default=(5.0, 4.0, 3.0),
        metavar=("I1", "I2", "I3"), help="joint inertia, kg*mm^2",
    )
    p.add_argument(
        "--k-joint", type=float, nargs=3, default=(50.0, 50.0, 50.0),
        metavar=("K1", "K2", "K3"), help="joint stiffness, N*mm/rad",
    )
    p.add_argument(
        "--damping", type=float, nargs=3, default=None,
        metavar=("B1", "B2", "B3"),
        help="joint damping, N*mm*s/rad (default: derived, zeta=0.7)",
    )
    p.add_argument(
        "--gravity", type=float, nargs=3, default=(0.0, 0.0, -9810.0),
        metavar=("GX", "GY", "GZ"), help="gravity, mm/s^2",
    )
    p.add_argument(
        "--masses", type=float, nargs=3, default=(0.008, 0.006, 0.004),
        metavar=("M1", "M2", "M3"), help="link point masses, kg",
    )
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except errors.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except errors.SingularConfiguration as exc:
        where = ""
        if exc.theta1 is not None:
            where = (
                f" at theta1 = {math.degrees(exc.theta1):.3f} deg, "
                f"theta2 = {math.degrees(exc.theta2):.3f} deg"
            )
        print(f"numerical error: {exc}{where}", file=sys.stderr)
        return 3
    except errors.SoftFingerError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
