"""Command-line interface: ``toroidal <subcommand> ...``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numeric failure.
Every subcommand takes one master ``--seed``; independent tasks get child
streams from ``numpy.random.SeedSequence.spawn``, so outputs are
byte-identical across reruns. Numeric CSV values use 17 significant digits.
"""

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import cardioid, regression, svg, torus
from .circular import axial_to_circular, wrap_angle
from .data import ingest, read_angle_columns
from .dependent import PARAM_NAMES, ToroidalParams, density_grid, sample_joint
from .exceptions import DataError, DomainError, NumericError
from .inference import FitConfig, FitResult, fit_mle, recovery_study

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4
BENCH_NU = np.round(np.arange(1, 11) / 10, 1)


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return "" if x is None else str(x)


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from exc


def load_model(path) -> FitResult:
    rec = read_json(path)
    try:
        return FitResult.from_record(rec)
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"{path} is not a fit record: {exc}") from exc


def child_seeds(seed, k):
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(k)]


def out_dir(path) -> Path:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


# -- subcommands ------------------------------------------------------------

def cmd_fit(args):
    ds = ingest(args.input, unit=args.unit, axial_multiplier=args.axial_mult,
                impute=args.impute, phi_col=args.phi_col, theta_col=args.theta_col)
    if len(ds) < 2:
        raise DataError("need at least two complete observations to fit")
    (fit_seed,) = child_seeds(args.seed, 1)
    fit = fit_mle(ds.phi, ds.theta, FitConfig(n_starts=args.starts, seed=fit_seed))
    out = out_dir(args.out)
    rec = fit.to_record()
    rec["master_seed"] = args.seed
    rec["angle_unit"] = "radians"
    rec["dependence_lr"] = fit.dependence_lr
    write_json(out / "fit.json", rec)
    write_json(out / "preprocessing_log.json", ds.log)
    write_csv(out / "data.csv", ["phi", "theta"], zip(ds.phi, ds.theta))
    if args.grid:
        write_csv(out / "density_grid.csv", ["phi", "theta", "density"],
                  zip(*density_grid(fit.params, args.grid)))
    print(" ".join(f"{k}={fmt(rec[k])}" for k in (*PARAM_NAMES, "logL", "aic", "bic", "n")))
    if fit.flat_parameters:
        print("warning: weakly identified parameters: " + ",".join(fit.flat_parameters),
              file=sys.stderr)
    if fit.boundary_parameters:
        print("warning: estimate on the parameter boundary (standard errors unreliable): "
              + ",".join(fit.boundary_parameters), file=sys.stderr)
    if not fit.converged:
        print("error: optimiser did not converge; best-effort estimate written", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_sample(args):
    (seed,) = child_seeds(args.seed, 1)
    rng = np.random.default_rng(seed)
    out = out_dir(args.out)
    meta = {"n": args.n, "master_seed": args.seed, "angle_unit": "radians"}
    if args.model:
        if args.nu is not None or args.R is not None or args.r is not None:
            raise UsageError("--model cannot be combined with --nu/--R/--r")
        p = load_model(args.model).params
        phi, theta = sample_joint(p, args.n, rng)
        meta.update(mode="dependent", **p.to_dict())
        write_csv(out / "sample.csv", ["phi", "theta"], zip(phi, theta))
    else:
        g = _geometry(args)
        phi, theta = torus.sample_area_uniform(g, args.n, rng)
        meta.update(mode="area_uniform", nu=g.nu, R=g.R, r=g.r)
        xyz = torus.embed(g, phi, theta)
        write_csv(out / "sample.csv", ["phi", "theta", "x", "y", "z"],
                  (row for row in np.column_stack([phi, theta, xyz])))
    write_json(out / "sample_meta.json", meta)
    return EXIT_OK


def _geometry(args) -> torus.TorusGeometry:
    if args.R is not None and args.r is not None:
        g = torus.TorusGeometry(args.R, args.r)
        if args.nu is not None and not np.isclose(args.nu, g.nu, rtol=0, atol=1e-12):
            raise UsageError(f"--nu {args.nu} disagrees with r/R = {g.nu}")
        return g
    if args.nu is None:
        raise UsageError("give --model, --nu, or both --R and --r")
    if args.r is not None:
        raise UsageError("--r needs --R")
    return torus.TorusGeometry.from_nu(args.nu, 1.0 if args.R is None else args.R)


class _CountingRNG:
    """Forward ``random`` to a generator while counting the uniforms drawn."""

    def __init__(self, rng):
        self.rng = rng
        self.count = 0

    def random(self, size=None):
        self.count += int(np.prod(size)) if size is not None else 1
        return self.rng.random(size)


def cmd_bench_sampler(args):
    out = out_dir(args.out)
    seeds = child_seeds(args.seed, 2 * len(BENCH_NU))
    rows, timing = [], []
    for i, nu in enumerate(BENCH_NU):
        p = cardioid.CardioidParams(0.0, nu)
        t0 = time.perf_counter()
        rej = cardioid.sample_rejection_aur(p, args.n, np.random.default_rng(seeds[2 * i]))
        t1 = time.perf_counter()
        counter = _CountingRNG(np.random.default_rng(seeds[2 * i + 1]))
        cardioid.sample_exact(p, args.n, counter)
        t2 = time.perf_counter()
        # Each exact proposal costs two uniforms; any excess would be rejections.
        exact_proposals = counter.count // 2
        rows.append([nu, 100.0 * rej.acceptance_rate, rej.proposals, rej.proposals - args.n,
                     100.0 * args.n / exact_proposals, exact_proposals - args.n,
                     counter.count / args.n])
        scale = 1e4 / args.n
        timing.append([nu, (t1 - t0) * scale, (t2 - t1) * scale])
    write_csv(out / "bench_sampler.csv",
              ["nu", "aur_acceptance_percent", "aur_proposals", "aur_rejections",
               "exact_acceptance_percent", "exact_rejections", "exact_uniforms_per_draw"], rows)
    # Wall-clock times vary between runs, so they live in a separate file.
    write_csv(out / "bench_timing.csv", ["nu", "aur_seconds_per_1e4", "exact_seconds_per_1e4"],
              timing)
    for r in rows:
        print(f"nu={r[0]:.1f} aur={r[1]:.2f}% exact_rejections={r[5]}")
    return EXIT_OK


def cmd_predict(args):
    model = regression.RegressionModel.from_fit(load_model(args.model))
    theta, _ = _read_series(args.theta, args.theta_col, args.unit)
    pred = np.atleast_1d(regression.predict(model, theta))
    out = out_dir(args.out)
    write_csv(out / "predictions.csv", ["theta", "phi_pred"], zip(theta, pred))
    return EXIT_OK


def _read_series(path, column, unit):
    col, _ = read_angle_columns(path, column, column)
    if np.ma.is_masked(col):
        raise DataError(f"{path}: column {column!r} has missing values")
    vals = np.ma.getdata(col)
    vals = np.deg2rad(vals) if unit == "deg" else vals
    return np.atleast_1d(wrap_angle(vals)), col.size


def cmd_diagnose(args):
    obs, _ = _read_series(args.observed, args.observed_col, args.unit)
    pred, _ = _read_series(args.predicted, args.predicted_col, args.unit)
    unit = "degrees" if args.unit == "deg" else "radians"
    rep = regression.qq_report(obs, pred, unit)
    direction, conc = regression.residual_summary(obs, pred)
    out = out_dir(args.out)
    write_csv(out / "qq.csv", ["observed_quantile", "predicted_quantile"], rep.pairs)
    (out / "qq.svg").write_text(svg.qq_svg(rep.pairs, unit), encoding="utf-8")
    write_json(out / "qq_report.json", {
        "mean_perp_distance": rep.mean_perp_distance, "unit": unit, "n": int(obs.size),
        "residual_direction_radians": direction, "residual_concentration": conc})
    print(f"mean_perp_distance={fmt(rep.mean_perp_distance)} {unit}")
    return EXIT_OK


def cmd_simulate(args):
    spec = read_json(args.spec)
    try:
        scenarios = [(ToroidalParams.canonical(s["nu"], s["kappa"], s["lambda"],
                                               s.get("mu1", 0.0), s.get("mu2", 0.0)), int(s["n"]))
                     for s in spec["scenarios"]]
        reps = int(spec.get("replications", 1))
        starts = int(spec.get("n_starts", 32))
    except (KeyError, TypeError) as exc:
        raise DataError(f"malformed study spec: {exc}") from exc
    seed = args.seed if args.seed is not None else int(spec.get("seed", 0))
    study = recovery_study(scenarios, reps, FitConfig(n_starts=starts), seed=seed)
    out = out_dir(args.out)
    cols = list(dict.fromkeys(k for r in study.rows for k in r))
    write_csv(out / "recovery.csv", cols, ([r.get(k) for k in cols] for r in study.rows))
    scols = list(study.summary[0])
    write_csv(out / "recovery_summary.csv", scols, ([r[k] for k in scols] for r in study.summary))
    return EXIT_OK


def cmd_rose(args):
    col, _ = read_angle_columns(args.input, args.column, args.column)
    col = col[~np.ma.getmaskarray(col)]
    if col.size == 0:
        raise DataError("no observed angles to bin")
    if args.unit == "deg":
        angles = np.ma.getdata(axial_to_circular(col, args.axial_mult))
    else:
        angles = wrap_angle(args.axial_mult * np.ma.getdata(col))
    rb = svg.rose_bins(angles, args.bins)
    out = out_dir(args.out)
    write_csv(out / "rose.csv", ["sector_start", "sector_end", "count"],
              zip(rb.edges[:-1], rb.edges[1:], rb.counts))
    (out / "rose.svg").write_text(svg.rose_svg(rb), encoding="utf-8")
    return EXIT_OK


# -- parser -------------------------------------------------------------------

def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="toroidal", description="Dependent toroidal model toolkit.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out", default=".", help="output directory")
        return p

    p = add("fit", cmd_fit, "fit the dependent model to a CSV of paired angles")
    p.add_argument("--input", required=True)
    p.add_argument("--unit", choices=("deg", "rad"), default="deg")
    p.add_argument("--axial-mult", type=_positive_int, default=1)
    p.add_argument("--impute", action="store_true")
    p.add_argument("--starts", type=_positive_int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--phi-col", default="phi")
    p.add_argument("--theta-col", default="theta")
    p.add_argument("--grid", type=int, default=181, help="density grid size, 0 to skip")

    p = add("sample", cmd_sample, "draw from a fitted model or the area-uniform law")
    p.add_argument("--model")
    p.add_argument("--nu", type=float)
    p.add_argument("--R", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = add("bench-sampler", cmd_bench_sampler, "compare exact and rejection Cardioid samplers")
    p.add_argument("--n", type=_positive_int, default=10_000)
    p.add_argument("--seed", type=int, default=0)

    p = add("predict", cmd_predict, "regression predictions of phi from theta")
    p.add_argument("--model", required=True)
    p.add_argument("--theta", required=True)
    p.add_argument("--theta-col", default="theta")
    p.add_argument("--unit", choices=("deg", "rad"), default="rad")

    p = add("diagnose", cmd_diagnose, "QQ report of observed against predicted angles")
    p.add_argument("--observed", required=True)
    p.add_argument("--predicted", required=True)
    p.add_argument("--observed-col", default="phi")
    p.add_argument("--predicted-col", default="phi_pred")
    p.add_argument("--unit", choices=("deg", "rad"), default="rad")

    p = add("simulate", cmd_simulate, "parameter-recovery study from a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--seed", type=int)

    p = add("rose", cmd_rose, "binned counts and a rose diagram")
    p.add_argument("--input", required=True)
    p.add_argument("--bins", type=int, default=36)
    p.add_argument("--column", default="theta")
    p.add_argument("--unit", choices=("deg", "rad"), default="deg")
    p.add_argument("--axial-mult", type=_positive_int, default=1)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, DomainError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (NumericError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
