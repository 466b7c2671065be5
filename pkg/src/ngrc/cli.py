"""Command-line entry point: simulate | train | forecast | metrics | sweep | reproduce."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dynamics, experiments, forecast, metrics, solvers
from .config import NgrcConfig, load_config
from .dynamics import DegenerateDataError, DivergenceError
from .features import monomial_exponents
from .solvers import SolverId

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DIVERGENCE = 3


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="YAML config file; flags override file values")
    parser.add_argument("--system", choices=[s.value for s in dynamics.SystemId])
    parser.add_argument("--integrator", choices=[i.value for i in dynamics.IntegratorId])
    parser.add_argument("--seed", type=int)
    parser.add_argument("--h", type=float, dest="h")
    parser.add_argument("--k", type=int)
    parser.add_argument("--tau", type=int)
    parser.add_argument("--p", type=int)
    parser.add_argument("--beta", type=float)
    parser.add_argument("--n-train", type=int, dest="n_train")
    parser.add_argument("--n-test", type=int, dest="n_test")
    parser.add_argument(
        "--solver",
        action="append",
        choices=[s.value for s in SolverId] + ["all"],
        help="repeatable; 'all' selects every solver",
    )
    parser.add_argument(
        "--coordinates",
        help="comma-separated observed coordinate indices (default: full state)",
    )


def _config_from_args(args) -> NgrcConfig:
    overrides = {
        "system": args.system,
        "integrator": args.integrator,
        "seed": args.seed,
        "h": args.h,
        "k": args.k,
        "tau": args.tau,
        "p": args.p,
        "beta": args.beta,
        "n_train": args.n_train,
        "n_test": args.n_test,
        "solvers": args.solver,
    }
    if args.coordinates:
        overrides["coordinates"] = [int(c) for c in args.coordinates.split(",")]
    return load_config(args.config, overrides)


def _write_manifest(out_dir: Path, config: NgrcConfig, command: str, files) -> None:
    manifest = {
        "command": command,
        "config": config.to_dict(),
        "files": list(files),
    }
    with (out_dir / "manifest.json").open("w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_simulate(args) -> int:
    config = _config_from_args(args)
    traj = dynamics.generate(
        config.system,
        config.integrator,
        config.seed,
        config.h,
        config.n_samples() - 1,
        n_transient=config.n_transient,
    )
    if config.coordinates:
        traj = dynamics.observe(traj, config.coordinates)
    traj = dynamics.normalize(traj)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    dynamics.to_csv(traj, out)
    _write_manifest(out.parent, config, "simulate", [out.name])
    return EXIT_OK


def cmd_train(args) -> int:
    config = _config_from_args(args)
    config.validate_lengths()
    traj = dynamics.from_csv(args.traj, system=config.system)
    report = solvers.train(traj, config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(solvers.report_to_json(report) + "\n")
    basis = monomial_exponents(config.k, traj.dim, config.p)
    files = ["report.json"]
    for solver in config.solvers:
        name = f"readout_{solver.value}.csv"
        solvers.write_readout_csv(report.readouts[solver], basis, out_dir / name)
        files.append(name)
    _write_manifest(out_dir, config, "train", files)
    for solver in config.solvers:
        readout = report.readouts[solver]
        if readout.any_failed:
            bad = [i for i, f in enumerate(readout.per_coordinate_failed) if f]
            print(f"note: {solver.value} failed on coordinates {bad}", file=sys.stderr)
    return EXIT_OK


def cmd_forecast(args) -> int:
    config = _config_from_args(args)
    traj = dynamics.from_csv(args.traj, system=config.system)
    W = solvers.read_readout_csv(args.readout)
    result = forecast.rollout(
        W,
        traj,
        config,
        config.n_test,
        escape_threshold=config.escape_threshold,
        bounded_margin=config.bounded_margin,
    )
    truth_end = min(len(traj), config.n_train + config.n_test)
    truth = traj.states[config.n_train : truth_end]
    scored = metrics.compute_metrics(
        truth[: len(result.states)],
        result,
        traj.h,
        metrics.LYAPUNOV_EXPONENT[config.system],
        eta=config.eta,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    dynamics.to_csv(dynamics.Trajectory(result.states, traj.h), out_dir / "forecast.csv")
    payload = {
        "vpt": scored.vpt,
        "d_maxima": scored.d_maxima,
        "e_psd": scored.e_psd,
        "bounded": scored.bounded,
        "sentinel_applied": scored.sentinel_applied,
        "escape_index": result.escape_index,
    }
    (out_dir / "metrics.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    _write_manifest(out_dir, config, "forecast", ["forecast.csv", "metrics.json"])
    return EXIT_OK


def cmd_metrics(args) -> int:
    config = _config_from_args(args)
    truth = dynamics.from_csv(args.truth)
    pred = dynamics.from_csv(args.pred)
    bounded, escape = forecast.is_bounded(pred.states, config.bounded_margin)
    result = forecast.ForecastResult(
        states=pred.states,
        bounded=bounded,
        escape_index=escape,
        warmup_used=pred.states[:1],
        n_requested=len(pred),
    )
    scored = metrics.compute_metrics(
        truth.states[: len(pred)],
        result,
        truth.h,
        metrics.LYAPUNOV_EXPONENT[config.system],
        eta=config.eta,
    )
    payload = {
        "vpt": scored.vpt,
        "d_maxima": scored.d_maxima,
        "e_psd": scored.e_psd,
        "bounded": scored.bounded,
        "sentinel_applied": scored.sentinel_applied,
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = experiments.load_sweep_spec(args.spec)
    spec = experiments.apply_scale(spec, args.scale)
    records = experiments.run_sweep(spec, workers=args.workers)
    experiments.write_outputs(spec, records, args.out, scale=args.scale)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    try:
        path = experiments.packaged_spec_path(args.figure)
    except KeyError as exc:
        print(exc.args[0], file=sys.stderr)
        return EXIT_USAGE
    spec = experiments.load_sweep_spec(path)
    spec = experiments.apply_scale(spec, args.scale)
    records = experiments.run_sweep(spec, workers=args.workers)
    experiments.write_outputs(spec, records, args.out, scale=args.scale)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ngrc",
        description="Polynomial delay-embedding forecasting workbench",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="write a normalized trajectory CSV")
    _add_config_flags(p_sim)
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=cmd_simulate)

    p_train = sub.add_parser("train", help="train readouts from a trajectory CSV")
    _add_config_flags(p_train)
    p_train.add_argument("--traj", required=True)
    p_train.add_argument("--out", required=True)
    p_train.set_defaults(func=cmd_train)

    p_fc = sub.add_parser("forecast", help="roll a trained readout forward and score it")
    _add_config_flags(p_fc)
    p_fc.add_argument("--traj", required=True)
    p_fc.add_argument("--readout", required=True, help="readout CSV written by train")
    p_fc.add_argument("--out", required=True)
    p_fc.set_defaults(func=cmd_forecast)

    p_met = sub.add_parser("metrics", help="score a prediction CSV against a truth CSV")
    _add_config_flags(p_met)
    p_met.add_argument("--truth", required=True)
    p_met.add_argument("--pred", required=True)
    p_met.add_argument("--out")
    p_met.set_defaults(func=cmd_metrics)

    p_sweep = sub.add_parser("sweep", help="run an explicit sweep spec file")
    p_sweep.add_argument("--spec", required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--scale", type=float, default=1.0)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.set_defaults(func=cmd_sweep)

    p_rep = sub.add_parser("reproduce", help="run a checked-in figure spec")
    p_rep.add_argument("--figure", required=True)
    p_rep.add_argument("--out", required=True)
    p_rep.add_argument("--scale", type=float, default=1.0)
    p_rep.add_argument("--workers", type=int, default=1)
    p_rep.set_defaults(func=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (DegenerateDataError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
