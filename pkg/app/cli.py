"""Command-line front end

    python -m app.cli check-state --state s.json
    python -m app.cli classify --left l.json --right r.json --front f.json
    python -m app.cli simulate-linear --preset gronwall --out runs/rt
    python -m app.cli verify --seed 7

Exit codes: 0 pass, 1 property failure or inadmissible input, 2 configuration error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

from app.config import settings
from app.data.io import load_model, write_csv, write_snapshot, write_summary
from app.data.schema import FrontModel, PeriodicModel, RunSummary, ScenarioModel, StateModel
from app.errors import ConfigError, ContactError
from app.physics.characteristics import char_spectrum
from app.physics.eos import ThermoParams, hyperbolicity_report
from app.physics.jumps import classify, rh_residuals
from app.solver.grid import Grid
from app.solver.linearized import run_linearized
from app.solver.periodic import PeriodicConfig, run_nonlinear_periodic, smooth_planar_data
from app.solver.scenarios import PRESETS, build_basic_state, build_scenario, preset
from app.verification import convergence
from app.verification.samplers import GENERATOR_NAME
from app.verification.suites import SUITES, SuiteContext, run_all

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2


def _params(model: Optional[StateModel] = None) -> ThermoParams:
    if model is not None and model.params is not None:
        return model.params.to_params()
    return ThermoParams.from_settings()


def _out_dir(args) -> Optional[Path]:
    if not getattr(args, "out", None):
        return None
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _print_checks(checks) -> None:
    for key, c in checks.items():
        mark = "✅" if c.passed else "❌"
        print(f"  {mark} {key:<10} {c.description:<40} margin {c.margin: .6g}")


def _scenario(args) -> ScenarioModel:
    if args.scenario:
        model = load_model(args.scenario, ScenarioModel)
    else:
        model = preset(args.preset)
    if args.seed is not None:
        model = model.model_copy(update={"seed": args.seed})
    return model


def _grid(args, model: ScenarioModel) -> Grid:
    spec = model.grid
    if getattr(args, "grid", None):
        return Grid.parse(args.grid, L1=spec.L1, T=spec.T, cfl=spec.cfl)
    return Grid(**spec.model_dump())


# commands

def cmd_check_state(args) -> int:
    model = load_model(args.state, StateModel)
    report = hyperbolicity_report(_params(model), model.to_state())
    print(f"State p={model.p} v={model.v} H={model.H} S={model.S}")
    _print_checks(report.checks)
    if report.admissible:
        print("✅ admissible")
        return EXIT_OK
    for line in report.failures():
        print(f"❌ {line}")
    return EXIT_FAILED


def cmd_speeds(args) -> int:
    model = load_model(args.state, StateModel)
    spectrum = char_spectrum(_params(model), model.to_state(), tuple(args.normal))
    print("eigenvalues: " + " ".join(f"{x: .10g}" for x in spectrum.lambdas))
    for name, value in spectrum.speeds.items():
        print(f"  {name:<5} {value: .10g}")
    print(f"margin {spectrum.margin:.6g}")
    return EXIT_OK


def cmd_classify(args) -> int:
    left = load_model(args.left, StateModel)
    right = load_model(args.right, StateModel)
    front = load_model(args.front, FrontModel) if args.front else FrontModel()
    params = _params(left)
    geom = front.geometry()
    kind = classify(params, left.to_state(), right.to_state(), geom, args.tol)
    res = rh_residuals(params, left.to_state(), right.to_state(), geom)
    print(kind.value)
    logger.info(f"residual norm {res.norm():.3g}")
    return EXIT_OK


def cmd_audit(args) -> int:
    model = _scenario(args)
    params = model.params.to_params()
    basic = build_basic_state(params, model.basic_state, _grid(args, model))
    report = basic.audit(bound_K=settings.BASIC_STATE_BOUND_K, tol=args.tol)
    _print_checks(report.checks)
    for w in report.warnings:
        print(f"⚠️ {w}")
    if report.passed:
        print("✅ basic state admissible")
        return EXIT_OK
    for line in report.failures():
        print(f"❌ {line}")
    return EXIT_FAILED


def cmd_simulate_linear(args) -> int:
    model = _scenario(args)
    out = _out_dir(args)
    config = build_scenario(model, grid=_grid(args, model))
    result = run_linearized(config)
    last = result.series.last()
    print(f"t={last['t']:.6g} I={last['I']:.6e} jump_HN={last['jump_HN']:.3e}")
    summary = RunSummary(
        command="simulate-linear",
        seed=model.seed if model.seed is not None else settings.DEFAULT_SEED,
        generator=GENERATOR_NAME,
        passed=result.series.all_finite(),
        values={**{k: float(v) for k, v in last.items()}, **result.errors},
    )
    if out is not None:
        write_csv(result.series.to_frame(), out / "diagnostics.csv")
        write_summary(summary, out / "summary.json")
        write_snapshot(out / "Udot", result.Udot, {
            "grid": {"n1": result.grid.n1, "n2": result.grid.n2, "L1": result.grid.L1, "T": result.grid.T},
            "axes": ["side", "x1", "x2", "var"],
            "variables": ["p", "u1", "u2", "H1", "H2", "S"],
            "sides": ["+", "-"],
        })
        write_snapshot(out / "phi", result.phi, {"axes": ["x2"], "grid": {"n2": result.grid.n2}})
    return EXIT_OK if summary.passed else EXIT_FAILED


def cmd_simulate_periodic(args) -> int:
    model = load_model(args.config, PeriodicModel) if args.config else PeriodicModel()
    n = model.n
    if args.grid:
        n = Grid.parse(args.grid, L1=1.0, T=0.0).n1
    config = PeriodicConfig(
        model.params.to_params(),
        smooth_planar_data(n, model.amplitude),
        n_steps=None if model.T is not None else model.n_steps,
        T=model.T,
        cfl=model.cfl,
        dissipation=model.dissipation,
        cadence=model.cadence,
        name=model.name,
    )
    result = run_nonlinear_periodic(config)
    for k, v in result.summary.items():
        print(f"  {k:<20} {v:.6e}")
    out = _out_dir(args)
    if out is not None:
        write_csv(result.series.to_frame(), out / "diagnostics.csv")
        write_summary(RunSummary(command="simulate-periodic", values=result.summary), out / "summary.json")
        write_snapshot(out / "U", result.U, {
            "grid": {"n": n},
            "axes": ["x1", "x2", "var"],
            "variables": ["p", "u1", "u2", "u3", "H1", "H2", "H3", "S"],
        })
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else settings.DEFAULT_SEED
    ctx = SuiteContext(ThermoParams.from_settings(), seed, scale=args.scale)
    results = run_all(ctx, args.suite or None)
    print("=" * 60)
    for r in results:
        print(f"{'✅' if r.passed else '❌'} {r.name:<24} {r.elapsed:7.2f}s {r.message}")
    print("=" * 60)
    passed = all(r.passed for r in results)
    out = _out_dir(args)
    if out is not None:
        rows = [{"suite": r.name, "metric": k, "value": v} for r in results for k, v in r.metrics.items()]
        write_csv(pd.DataFrame(rows, columns=["suite", "metric", "value"]), out / "suites.csv")
        write_summary(RunSummary(
            command="verify",
            seed=seed,
            generator=GENERATOR_NAME,
            passed=passed,
            flags={r.name: r.passed for r in results},
            messages=[r.message for r in results if r.message],
        ), out / "summary.json")
    return EXIT_OK if passed else EXIT_FAILED


def cmd_convergence(args) -> int:
    levels = tuple(args.levels) if args.levels else None
    params = ThermoParams.from_settings()
    summary = RunSummary(command=f"convergence {args.study}", seed=args.seed, generator=GENERATOR_NAME)
    frame = None
    if args.study == "gronwall":
        fit = convergence.gronwall_study()
        summary.fit = fit.to_dict()
        summary.passed = fit.passed
        for k, v in fit.to_dict().items():
            print(f"  {k:<20} {v: .6g}")
    elif args.study == "normal_field":
        study = convergence.normal_field_study(levels or (32, 64))
        summary.passed = study.passed
        summary.orders = {"lifted_ratio": study.lifted.min_ratio, "control_ratio": study.control.min_ratio}
        frame = pd.concat([study.lifted.to_frame().assign(mode="lifted"), study.control.to_frame().assign(mode="control")])
    else:
        if args.study == "mms":
            study = convergence.manufactured_solution_study(levels or (32, 64, 128), seed=args.seed)
            summary.passed = study.min_order >= convergence.MIN_ORDER
        elif args.study == "g6":
            study = convergence.g6_transport_study(levels or (32, 64, 128))
            summary.passed = study.min_order >= convergence.MIN_ORDER
        else:
            study = convergence.divergence_study(params, levels or (32, 64))
            summary.passed = study.min_ratio >= convergence.MIN_RATIO
        summary.orders = {f"{a}->{b}": float(o) for a, b, o in zip(study.levels, study.levels[1:], study.orders)}
        frame = study.to_frame()
    if frame is not None:
        print(frame.to_string(index=False))
    print("✅ passed" if summary.passed else "❌ failed")
    out = _out_dir(args)
    if out is not None:
        if frame is not None:
            write_csv(frame, out / f"{args.study}.csv")
        write_summary(summary, out / "summary.json")
    return EXIT_OK if summary.passed else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmhd-contact", description="RMHD contact discontinuity toolkit")
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)
    
    def common(p, tol=settings.JUMP_TOL):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--grid", default=None, help="n1xn2")
        p.add_argument("--tol", type=float, default=tol)
    
    p = sub.add_parser("check-state", help="hyperbolicity report of one state")
    p.add_argument("--state", required=True)
    common(p)
    p.set_defaults(func=cmd_check_state)
    
    p = sub.add_parser("speeds", help="characteristic speeds of one state")
    p.add_argument("--state", required=True)
    p.add_argument("--normal", type=float, nargs=2, default=[1.0, 0.0])
    common(p)
    p.set_defaults(func=cmd_speeds)
    
    p = sub.add_parser("classify", help="classify a pair of traces")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--front", default=None)
    common(p)
    p.set_defaults(func=cmd_classify)
    
    for name, func, help_ in (
        ("audit", cmd_audit, "audit a scenario's basic state"),
        ("simulate-linear", cmd_simulate_linear, "run the linearized solver"),
    ):
        p = sub.add_parser(name, help=help_)
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--scenario", default=None, help="scenario JSON")
        src.add_argument("--preset", choices=sorted(PRESETS), default=None)
        common(p)
        p.set_defaults(func=func)
    
    p = sub.add_parser("simulate-periodic", help="run the nonlinear periodic solver")
    p.add_argument("--config", default=None)
    common(p)
    p.set_defaults(func=cmd_simulate_periodic)
    
    p = sub.add_parser("verify", help="run the property suites")
    p.add_argument("--suite", action="append", choices=sorted(SUITES))
    p.add_argument("--scale", type=float, default=1.0, help="sample-size multiplier")
    common(p)
    p.set_defaults(func=cmd_verify)
    
    p = sub.add_parser("convergence", help="grid-refinement study")
    p.add_argument("--study", choices=["mms", "div", "normal_field", "g6", "gronwall"], default="mms")
    p.add_argument("--levels", type=int, nargs="+", default=None)
    common(p)
    p.set_defaults(func=cmd_convergence)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"❌ configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ContactError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
