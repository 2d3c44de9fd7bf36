"""Command-line front end.

Subcommands: asv-curve, optimize-omega, simulate, compare-af, fading,
robustness, hetero.  Experiment commands take either --config (a JSON file
mirroring the ExperimentSpec schema) or --preset (a bundled fig1..fig10
scenario), with optional --seed/--trials overrides.

Exit codes: 0 success, 2 configuration error, 3 numeric/domain error,
4 acceptance-check failure under --check.
"""

import argparse
import json
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import asv, harness, optimize, presets
from .errors import NUMERIC_ERRORS, CfZeroError, ConfigError
from .harness import (
    ExperimentResult,
    SweepRecord,
    check_against_analytic,
    fading_from_dict,
    noise_from_dict,
    result_to_csv,
    result_to_json,
    spec_from_dict,
    write_tracks,
)
from .noise import Cauchy, Gaussian, Laplace, Uniform

_EXIT_OK = 0
_EXIT_CONFIG = 2
_EXIT_NUMERIC = 3
_EXIT_CHECK = 4

_COMMAND_KINDS = {
    "simulate": ("asv-vs-omega", "var-vs-L"),
    "compare-af": ("af-compare",),
    "fading": ("fading-compare",),
    "robustness": ("cauchy-robustness",),
    "hetero": ("heterogeneous-consistency",),
}


def _load_json(path: str) -> dict:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc


def _add_io_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="output file; stdout when omitted")
    parser.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output format"
    )
    parser.add_argument("--threads", type=int, default=1, help="worker threads")


def _add_experiment_options(parser: argparse.ArgumentParser) -> None:
    src = parser.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="JSON experiment spec")
    src.add_argument(
        "--preset",
        help=f"bundled preset, one of: {', '.join(presets.preset_names())}",
    )
    parser.add_argument("--seed", type=int, help="override the root seed")
    parser.add_argument("--trials", type=int, help="override trials per point")
    parser.add_argument(
        "--check",
        action="store_true",
        help="compare simulation to the analytic variance and fail beyond "
        "--check-tol",
    )
    parser.add_argument(
        "--check-tol",
        type=float,
        default=0.05,
        help="relative tolerance for --check (default 0.05)",
    )
    _add_io_options(parser)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cmest",
        description="Distributed estimation over a multiple-access channel "
        "with constant-modulus signaling: analytics and Monte Carlo.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    curve = sub.add_parser("asv-curve", help="sample the analytic variance curve")
    curve.add_argument("--config", required=True, help="JSON curve config")
    _add_io_options(curve)

    opt = sub.add_parser("optimize-omega", help="solve for the optimal phase")
    opt.add_argument("--config", required=True, help="JSON optimizer config")
    _add_io_options(opt)

    for name, kinds in _COMMAND_KINDS.items():
        p = sub.add_parser(name, help=f"run a {' / '.join(kinds)} experiment")
        _add_experiment_options(p)
    return parser


def _curve_result(cfg: dict) -> ExperimentResult:
    harness._take(
        cfg,
        "curve config",
        ["noise", "theta_range"],
        optional=["snr_inv", "fading", "n_points", "omegas"],
    )
    ctx = asv.AsvContext(
        noise=noise_from_dict(cfg["noise"]),
        snr_inv=float(cfg.get("snr_inv", 0.0)),
        fading_penalty=asv.fading_penalty(
            fading_from_dict(cfg.get("fading", {"kind": "none"}))
        ),
    )
    if "omegas" in cfg:
        omegas = np.asarray(cfg["omegas"], dtype=float)
        values = asv.asv_on_grid(ctx, omegas)
        if not np.all(np.isfinite(values)):
            raise CfZeroError(
                "requested grid hits a characteristic-function zero"
            )
        curve = asv.AsvCurve(omegas=omegas, values=values)
    else:
        curve = asv.sample_curve(
            ctx, float(cfg["theta_range"]), int(cfg.get("n_points", 2000))
        )
    records = [
        SweepRecord(
            sweep_value=float(w),
            n_trials=0,
            normalized_variance=math.nan,
            std_error=math.nan,
            analytic_asv=float(v),
            bias=math.nan,
        )
        for w, v in zip(curve.omegas, curve.values)
    ]
    metadata = {"kind": "asv-curve", "config": cfg}
    return ExperimentResult(records=records, metadata=metadata)


_CLOSED_FORM_SOLVERS = {
    Gaussian: lambda n, s, tr: optimize.omega_star_gaussian(n.variance_, s, tr),
    Laplace: lambda n, s, tr: optimize.omega_star_laplace(n.variance_, s, tr),
    Uniform: lambda n, s, tr: optimize.omega_star_uniform(n.variance_, s, tr),
    Cauchy: lambda n, s, tr: optimize.omega_star_cauchy(n.scale, s, tr),
}


def _optimize_result(cfg: dict) -> dict:
    harness._take(
        cfg,
        "optimizer config",
        ["noise", "theta_range"],
        optional=["snr_inv", "method"],
    )
    noise = noise_from_dict(cfg["noise"])
    snr_inv = float(cfg.get("snr_inv", 0.0))
    theta_range = float(cfg["theta_range"])
    method = cfg.get("method", "auto")
    solver = _CLOSED_FORM_SOLVERS.get(type(noise))
    if method not in ("auto", "closed", "numeric"):
        raise ConfigError(f"unknown optimizer method {method!r}")
    if method == "closed" and solver is None:
        raise ConfigError(f"no closed-form solver for {type(noise).__name__}")
    if method == "numeric" or solver is None:
        star = optimize.omega_star_numeric(noise, snr_inv, theta_range)
    else:
        star = solver(noise, snr_inv, theta_range)
    return {
        "omega": star.omega,
        "beta": star.beta,
        "clamped": star.clamped,
        "at_origin": star.at_origin,
        "asv_at_opt": star.asv_at_opt,
        "method": star.method,
    }


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def _emit_tracks(tracks: dict, args) -> None:
    if args.out is not None:
        write_tracks(tracks, args.out, args.format)
        return
    render = result_to_csv if args.format == "csv" else result_to_json
    for label, result in tracks.items():
        if len(tracks) > 1:
            sys.stdout.write(f"# track: {label}\n")
        sys.stdout.write(render(result))


def _load_specs(args, allowed_kinds) -> list:
    """(label, spec) pairs from --config or --preset, overrides applied."""
    if args.config is not None:
        pairs = [("run", spec_from_dict(_load_json(args.config)))]
    else:
        pairs = presets.preset(args.preset)
    out = []
    for label, spec in pairs:
        if spec.kind not in allowed_kinds:
            raise ConfigError(
                f"this command runs {allowed_kinds}, but {label!r} has kind "
                f"{spec.kind!r}"
            )
        updates = {}
        if args.seed is not None:
            updates["seed"] = args.seed
        if args.trials is not None:
            updates["trials"] = args.trials
        if updates:
            spec = replace(spec, **updates)
        out.append((label, spec))
    return out


def _run_experiment_command(args, allowed_kinds) -> int:
    specs = _load_specs(args, allowed_kinds)
    all_tracks: dict = {}
    for label, spec in specs:
        tracks = harness.run_kind(spec, threads=args.threads)
        for sub_label, result in tracks.items():
            if len(specs) == 1:
                key = sub_label
            elif len(tracks) == 1:
                key = label
            else:
                key = f"{label}.{sub_label}"
            all_tracks[key] = result

    failures = {}
    if args.check:
        for key, result in all_tracks.items():
            bad = check_against_analytic(result, args.check_tol)
            if bad:
                failures[key] = bad
    _emit_tracks(all_tracks, args)
    if failures:
        sys.stderr.write(
            "acceptance check failed at tolerance "
            f"{args.check_tol}:\n{json.dumps(harness._jsonable(failures), indent=2)}\n"
        )
        return _EXIT_CHECK
    return _EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "asv-curve":
            result = _curve_result(_load_json(args.config))
            render = result_to_csv if args.format == "csv" else result_to_json
            _emit(render(result), args.out)
            return _EXIT_OK
        if args.command == "optimize-omega":
            res = _optimize_result(_load_json(args.config))
            if args.format == "json":
                text = json.dumps(harness._jsonable(res), indent=2, sort_keys=True) + "\n"
            else:
                header = "omega,beta,clamped,at_origin,asv_at_opt,method"
                beta = "" if res["beta"] is None else repr(res["beta"])
                row = (
                    f"{res['omega']!r},{beta},{int(res['clamped'])},"
                    f"{int(res['at_origin'])},{res['asv_at_opt']!r},{res['method']}"
                )
                text = header + "\n" + row + "\n"
            _emit(text, args.out)
            return _EXIT_OK
        return _run_experiment_command(args, _COMMAND_KINDS[args.command])
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return _EXIT_CONFIG
    except NUMERIC_ERRORS as exc:
        sys.stderr.write(f"numeric error: {type(exc).__name__}: {exc}\n")
        return _EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
