"""Command-line entry point.

Subcommands:

  verify      run every verification suite, emit a JSON report
  brackets    identify the 6x6 bracket table, emit JSON
  integrate   integrate one geodesic to CSV plus a JSON sidecar
  reduce      map a trajectory CSV through the reduction, emit JSON
  flow        evaluate the closed-form orbit at one point

Exit codes: 0 all checks pass, 1 a check or runtime failure, 2 usage or
configuration error.  Reports are byte-identical for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import chart, geodesics, jetcalc, reduction, symmetries
from .suites import ConfigError, RunConfig, run_all

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    parser.add_argument("--samples", type=int, default=1000,
                        help="sample-count knob; 1000 reproduces the standard counts")
    parser.add_argument("--margin", type=float, default=chart.DEFAULT_MARGIN,
                        help="chart sampling margin in radians (default 0.1)")
    parser.add_argument("--step", type=float, default=1e-3,
                        help="RK4 step in x, at most 0.01 (default 1e-3)")
    parser.add_argument("--out", type=str, default=None, help="output path")
    parser.add_argument("--json", action="store_true",
                        help="machine-readable output on stdout")


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _config_from(args, tol_overrides=None) -> RunConfig:
    return RunConfig(
        seed=args.seed,
        samples=args.samples,
        margin=args.margin,
        step=args.step,
        trajectories=getattr(args, "trajectories", 50),
        tolerances=tol_overrides or {},
        out=args.out,
    )


def _parse_tolerances(args) -> dict:
    overrides = {}
    for item in args.tol or []:
        if "=" not in item:
            raise ConfigError(f"--tol expects NAME=VALUE, got {item!r}")
        name, _, value = item.partition("=")
        try:
            overrides[name.strip()] = float(value)
        except ValueError:
            raise ConfigError(f"--tol value is not a number: {item!r}") from None
    if args.tol_all is not None:
        from .suites import DEFAULT_TOLERANCES

        overrides = {name: args.tol_all for name in DEFAULT_TOLERANCES}
    return overrides


def cmd_verify(args) -> int:
    try:
        cfg = _config_from(args, _parse_tolerances(args))
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_USAGE
    report = run_all(cfg)
    _emit(report, cfg.out)
    return EXIT_OK if report["passed"] else EXIT_FAIL


def cmd_brackets(args) -> int:
    try:
        cfg = _config_from(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_USAGE
    n = max(10, cfg.samples // 20)
    try:
        table = symmetries.bracket_table(samples=n, tol=cfg.tol("bracket_table"),
                                         seed=cfg.seed + 17, margin=cfg.margin)
    except symmetries.AmbiguousIdentification as err:
        print(f"identification failed: {err}", file=sys.stderr)
        return EXIT_FAIL
    _emit(table.to_json_dict(), cfg.out)
    return EXIT_OK


def _parse_floats(text: str, count: int, what: str) -> list[float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if len(parts) != count:
        raise ConfigError(f"{what} expects {count} comma-separated numbers, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"{what} is not numeric: {text!r}") from None


def cmd_integrate(args) -> int:
    try:
        cfg = _config_from(args)
        initial = _parse_floats(args.initial, 5, "--initial")
        j0 = chart.jet1(*initial)
    except (ConfigError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_USAGE

    out = Path(cfg.out) if cfg.out else Path("trajectory.csv")
    sidecar_path = out.with_suffix(".json")
    status = "ok"
    detail = ""
    traj = None
    try:
        traj = geodesics.integrate(j0, args.x_end, cfg.step)
    except geodesics.DomainExit as err:
        status, detail, traj = "DomainExit", str(err), err.trajectory
    except geodesics.SingularSystem as err:
        status, detail, traj = "SingularSystem", str(err), err.trajectory

    sidecar = {"status": status, "initial": initial, "x_end": args.x_end,
               "step": cfg.step}
    if detail:
        sidecar["detail"] = detail
    if traj is not None and len(traj) > 0:
        traj.to_csv(out)
        sidecar["samples"] = len(traj)
        sidecar["x_reached"] = float(traj.x[-1])
        sidecar["k"] = float(geodesics.infer_k(traj.jet(0)))
        sidecar["noether_drift"] = traj.noether_drift()
        if status == "ok":
            sidecar["oracle_endpoint_error"] = geodesics.endpoint_error_vs_great_circle(traj)
    sidecar_path.write_text(json.dumps(sidecar, indent=2) + "\n")
    if not args.json:
        print(f"wrote {out} and {sidecar_path} ({status})")
    else:
        print(json.dumps(sidecar, indent=2))
    return EXIT_OK if status == "ok" else EXIT_FAIL


def cmd_reduce(args) -> int:
    path = Path(args.trajectory)
    try:
        traj = geodesics.Trajectory.from_csv(path)
    except (OSError, ValueError) as err:
        print(f"cannot read trajectory: {err}", file=sys.stderr)
        return EXIT_USAGE
    report = reduction.reduction_report(traj)
    _emit(report, args.out)
    return EXIT_OK


def cmd_flow(args) -> int:
    try:
        x, y = _parse_floats(args.point, 2, "--point")
        lam = args.lam
        chart.ChartPoint(x, y, 0.0)
    except (ConfigError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        X, Y = reduction.global_flow(x, y, lam)
    except reduction.BranchExit as err:
        print(f"flow failed: {err}", file=sys.stderr)
        return EXIT_FAIL
    omega_residual = abs(
        reduction.omega_coordinate(X, Y) - reduction.omega_coordinate(x, y)
    )
    tau_residual = math.nan
    if x != 0.0 and X != 0.0:
        tau_residual = abs(reduction.wrap_mod_pi(
            reduction.tau_coordinate(X, Y) - reduction.tau_coordinate(x, y) - lam
        ))
    payload = {
        "point": [x, y],
        "lambda": lam,
        "image": [X, Y],
        "omega_residual": omega_residual,
        "tau_shift_residual": tau_residual,
    }
    if args.json or args.out:
        _emit(payload, args.out)
    else:
        print(f"X = {X:.17g}")
        print(f"Y = {Y:.17g}")
        print(f"omega residual     = {omega_residual:.3e}")
        print(f"tau shift residual = {tau_residual:.3e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glome",
        description="Symmetry analysis of geodesics on the 3-sphere: "
                    "verification suites, integration, and order reduction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run all verification suites")
    _add_common(p_verify)
    p_verify.add_argument("--trajectories", type=int, default=50,
                          help="geodesics per dynamics suite (default 50)")
    p_verify.add_argument("--tol", action="append", metavar="NAME=VALUE",
                          help="override one tolerance (repeatable)")
    p_verify.add_argument("--tol-all", type=float, default=None,
                          help="override every tolerance with one value")
    p_verify.set_defaults(func=cmd_verify)

    p_br = sub.add_parser("brackets", help="emit the identified bracket table")
    _add_common(p_br)
    p_br.set_defaults(func=cmd_brackets)

    p_int = sub.add_parser("integrate", help="integrate one geodesic to CSV")
    _add_common(p_int)
    p_int.add_argument("--initial", required=True,
                       help="x,y,v,y_x,v_x of the initial state")
    p_int.add_argument("--x-end", type=float, required=True, dest="x_end")
    p_int.set_defaults(func=cmd_integrate)

    p_red = sub.add_parser("reduce", help="reduction report for a trajectory CSV")
    p_red.add_argument("trajectory", help="path to a trajectory CSV")
    p_red.add_argument("--out", type=str, default=None)
    p_red.add_argument("--json", action="store_true")
    p_red.set_defaults(func=cmd_reduce)

    p_flow = sub.add_parser("flow", help="evaluate the closed-form orbit")
    p_flow.add_argument("--point", required=True, help="x,y of the seed point")
    p_flow.add_argument("--lambda", type=float, required=True, dest="lam")
    p_flow.add_argument("--out", type=str, default=None)
    p_flow.add_argument("--json", action="store_true")
    p_flow.set_defaults(func=cmd_flow)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except jetcalc.DomainError as err:
        print(f"domain error: {err}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
