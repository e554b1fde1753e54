"""Command-line front end.

One experiment per invocation; every run writes its artifacts plus a
manifest (model hash, parameters, seed, version, wall time) into the output
directory.  Exit codes: 0 success, 2 input error, 3 resource cap exceeded,
4 statistical budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .arcsine import ArcsineLaw
from .errors import (
    EstimatorBudgetError,
    InvalidModelError,
    MrwError,
    ResourceCapError,
    UnsupportedModelError,
)
from .exact import (
    embedded_return_law,
    exact_law,
    occupation_law,
    spitzer_identity,
)
from .lattice import is_lattice_exact
from .model import (
    dual,
    is_null_homologous,
    load_model,
    period,
    stationary_distribution,
    validate_model,
)
from .montecarlo import (
    boundary_occupation,
    clt_check,
    embedded_spitzer_average,
    occupation_fraction_samples,
    spitzer_average,
    strong_spitzer_curve,
)
from .stats import EmpiricalDistribution, NormalLaw, RhoConfig, ks_distance, rho_report

EXPERIMENTS = (
    "exact-law",
    "occupation",
    "spitzer",
    "embedded-spitzer",
    "strong-spitzer",
    "spitzer-identity",
    "arcsine-ks",
    "boundary",
    "clt",
    "dual-check",
    "rho-report",
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_RESOURCE = 3
EXIT_BUDGET = 4


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [cell if isinstance(cell, (str, int)) else _fmt(cell) for cell in row]
            )


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _model_hash(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _load_model_or_exit(path):
    try:
        model = load_model(path)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: cannot load model {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)
    report = validate_model(model)
    if not report.ok:
        for problem in report.problems:
            print(f"invalid model: {problem}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)
    return model


def cmd_validate(args) -> int:
    try:
        model = load_model(args.model)
    except (OSError, ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        print(f"error: cannot load model {args.model}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = validate_model(model)
    if not report.ok:
        for problem in report.problems:
            print(f"FAIL: {problem}")
        return EXIT_INPUT
    pi = stationary_distribution(model)
    per = period(model)
    nh = is_null_homologous(model)
    print(f"states = {list(model.states)}")
    print("pi = [" + ", ".join(_fmt(p) for p in pi) + f"], d = {per.d}")
    if nh.is_null:
        g = [nh.potential[s] for s in model.states]
        print("null-homologous: yes, g = [" + ", ".join(_fmt(v) for v in g) + "]")
    else:
        print("null-homologous: no")
    print(f"lattice-exact: {'yes' if is_lattice_exact(model) else 'no'}")
    return EXIT_OK


def _require(args, *names):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise SystemExit_input(f"experiment {args.experiment!r} requires --{', --'.join(missing)}")


class SystemExit_input(Exception):
    pass


def _run_experiment(args, model, out_dir, tolerances):
    """Dispatch one named experiment; returns dict of summary values."""
    name = args.experiment
    state = args.state if args.state is not None else model.states[0]
    seed = args.seed
    paths = args.paths

    if name == "exact-law":
        _require(args, "n")
        law = exact_law(model, state, args.n)
        _write_csv(
            os.path.join(out_dir, "law.csv"),
            ["n", "state", "lattice_index", "value", "probability"],
            law.rows(),
        )
        return {"total_mass": law.total_mass(), "prob_positive": law.prob_positive()}

    if name == "occupation":
        _require(args, "n", "paths")
        samples = occupation_fraction_samples(model, state, args.n, paths, seed)
        _write_csv(
            os.path.join(out_dir, "samples.csv"),
            ["path_index", "n", "value"],
            ((idx, args.n, v) for idx, v in enumerate(samples)),
        )
        return {"mean_fraction": float(samples.mean()) if paths else None}

    if name == "spitzer":
        _require(args, "n", "paths")
        result = spitzer_average(model, state, args.n, paths, seed)
        _write_json(os.path.join(out_dir, "estimate.json"), result.to_json())
        return {"estimate": result.estimate}

    if name == "embedded-spitzer":
        _require(args, "n", "paths")
        result = embedded_spitzer_average(model, state, args.n, paths, seed)
        _write_json(os.path.join(out_dir, "estimate.json"), result.to_json())
        return {"estimate": result.estimate}

    if name == "strong-spitzer":
        grid = args.n_grid if args.n_grid else ([args.n] if args.n else None)
        if grid is None:
            raise SystemExit_input("strong-spitzer requires --n or --n-grid")
        results = strong_spitzer_curve(model, state, grid, paths or 1, seed)
        _write_csv(
            os.path.join(out_dir, "curve.csv"),
            ["n", "value"],
            zip(grid, (r.estimate for r in results)),
        )
        return {"points": len(results)}

    if name == "spitzer-identity":
        _require(args, "n")
        reports = [spitzer_identity(model, state, n) for n in range(1, args.n + 1)]
        _write_json(
            os.path.join(out_dir, "identity.json"),
            {
                "state": state,
                "rows": [
                    {"n": r.n, "lhs": r.lhs, "rhs": r.rhs, "difference": r.difference}
                    for r in reports
                ],
                "max_difference": max(r.difference for r in reports),
            },
        )
        return {"max_difference": max(r.difference for r in reports)}

    if name == "arcsine-ks":
        _require(args, "n", "paths")
        samples = occupation_fraction_samples(model, state, args.n, paths, seed)
        if "theta" in tolerances:
            theta = tolerances["theta"]
        elif is_lattice_exact(model):
            theta = spitzer_average(model, state, min(args.n, 2000), paths, seed).estimate
        else:
            theta = float(samples.mean())
        law = ArcsineLaw(min(max(theta, 0.0), 1.0))
        emp = EmpiricalDistribution.from_samples(samples)
        ks = ks_distance(emp, law)
        xs = np.unique(samples)
        cum = np.searchsorted(np.sort(samples), xs, side="right") / len(samples)
        _write_csv(
            os.path.join(out_dir, "cdf_compare.csv"),
            ["x", "F_empirical", "F_reference"],
            zip(xs, cum, law.cdf(xs)),
        )
        _write_json(os.path.join(out_dir, "ks.json"), {"ks": ks, "theta": law.theta})
        return {"ks": ks, "theta": law.theta}

    if name == "boundary":
        _require(args, "n", "paths")
        result = boundary_occupation(model, state, args.n, paths, seed)
        _write_json(
            os.path.join(out_dir, "boundary.json"),
            {
                "total": result.total.to_json(),
                "above": result.above.to_json(),
                "below": result.below.to_json(),
            },
        )
        return {"estimate": result.total.estimate}

    if name == "clt":
        _require(args, "n", "paths")
        samples, theta_sq = clt_check(model, state, args.n, paths, seed)
        ks = (
            ks_distance(EmpiricalDistribution.from_samples(samples), NormalLaw(0.0, theta_sq))
            if len(samples) and theta_sq > 0
            else None
        )
        _write_csv(
            os.path.join(out_dir, "samples.csv"),
            ["path_index", "n", "value"],
            ((idx, args.n, v) for idx, v in enumerate(samples)),
        )
        _write_json(os.path.join(out_dir, "clt.json"), {"theta_sq": theta_sq, "ks": ks})
        return {"theta_sq": theta_sq, "ks": ks}

    if name == "dual-check":
        d = dual(model)
        dd = dual(d)
        inv_err = float(np.abs(dd.transition - model.transition).max())
        horizon = args.n or 12
        if is_lattice_exact(model):
            rl = embedded_return_law(model, state, horizon)
            rld = embedded_return_law(d, state, horizon)
            ret_err = float(np.abs(rl.mass - rld.mass).max())
        else:
            ret_err = None
        _write_json(
            os.path.join(out_dir, "dual.json"),
            {"involution_max_err": inv_err, "return_law_max_err": ret_err},
        )
        return {"involution_max_err": inv_err, "return_law_max_err": ret_err}

    if name == "rho-report":
        config = RhoConfig(
            paths=paths or RhoConfig.paths,
            seed=seed,
            tolerance=tolerances.get("rho", RhoConfig.tolerance),
        )
        report = rho_report(model, state, config)
        _write_json(
            os.path.join(out_dir, "rho.json"),
            {
                "estimates": {k: v.to_json() for k, v in report.estimates.items()},
                "max_gap": report.max_gap,
                "stationary_gap": report.stationary_gap,
                "tolerance": report.tolerance,
                "passed": report.passed,
            },
        )
        return {"passed": report.passed, "max_gap": report.max_gap}

    raise SystemExit_input(f"unknown experiment {name!r}")


def cmd_run(args) -> int:
    if args.experiment not in EXPERIMENTS:
        print(
            f"error: unknown experiment {args.experiment!r}; "
            f"choose from {', '.join(EXPERIMENTS)}",
            file=sys.stderr,
        )
        return EXIT_INPUT
    model = _load_model_or_exit(args.model)
    try:
        args.state if args.state is None else model.state_index(args.state)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out_dir = args.out or os.environ.get("MRW_FLUCT_OUT") or "."
    os.makedirs(out_dir, exist_ok=True)
    tolerances = {}
    for item in args.tolerance or []:
        key, _, value = item.partition("=")
        try:
            tolerances[key] = float(value)
        except ValueError:
            print(f"error: bad --tolerance entry {item!r}", file=sys.stderr)
            return EXIT_INPUT

    start = time.monotonic()
    try:
        summary = _run_experiment(args, model, out_dir, tolerances)
    except SystemExit_input as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ResourceCapError, UnsupportedModelError) as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except EstimatorBudgetError as exc:
        print(f"budget error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    wall = time.monotonic() - start

    manifest = {
        "experiment": args.experiment,
        "model": os.path.abspath(args.model),
        "model_sha256": _model_hash(args.model),
        "parameters": {
            "state": args.state,
            "n": args.n,
            "n_grid": args.n_grid,
            "paths": args.paths,
            "seed": args.seed,
            "threads": args.threads,
            "tolerance": args.tolerance or [],
        },
        "version": __version__,
        "wall_time_s": wall,
        "summary": summary,
    }
    _write_json(os.path.join(out_dir, "manifest.json"), manifest)
    for key, value in sorted(summary.items()):
        print(f"{key} = {value}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mrw-fluct",
        description="Markov-random-walk fluctuation experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_val = sub.add_parser("validate", help="validate a model file and print its summary")
    p_val.add_argument("model")
    p_val.set_defaults(func=cmd_validate)

    p_run = sub.add_parser("run", help="run one named experiment")
    p_run.add_argument("--model", required=True)
    p_run.add_argument("--experiment", required=True)
    p_run.add_argument("--state", default=None)
    p_run.add_argument("--n", type=int, default=None)
    p_run.add_argument(
        "--n-grid",
        type=lambda s: [int(x) for x in s.split(",") if x],
        default=None,
    )
    p_run.add_argument("--paths", type=int, default=None)
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--threads", type=int, default=1)
    p_run.add_argument("--tolerance", action="append", metavar="KEY=VAL")
    p_run.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_INPUT
    except InvalidModelError as exc:
        print(f"invalid model: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MrwError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
