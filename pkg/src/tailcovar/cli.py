"""Command-line front end.

Each subcommand is a thin wrapper over one library call, so CLI output for a
given input equals the corresponding library result exactly.  stdout carries
only machine-readable payload (JSON or CSV); every diagnostic goes to
stderr.  Exit codes: 0 success, 1 runtime estimation failure, 2 usage or
input-contract error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from tailcovar.covar import covar_estimate
from tailcovar.errors import BadSpec, TailCovarError
from tailcovar.experiments import (
    ExperimentConfig,
    ForecastRecord,
    dynamic_covar,
    eta_scan,
    eta_scan_rows,
    forecast_rows,
    run_table1,
    score_series,
    write_eta_scan_csv,
    write_forecast_csv,
    write_report_csv,
    write_report_json,
)
from tailcovar.families import resolve_family
from tailcovar.models import (
    Model1Spec,
    Model2Spec,
    joint_survival,
    sample_model1,
    sample_model2,
    true_covar,
)
from tailcovar.sample import load_sample_csv, write_sample_csv
from tailcovar.serialize import dumps, format_row

__all__ = ["main", "build_parser"]


class _Usage(Exception):
    """Input-contract violation detected before any computation."""


def _fail_usage(message: str) -> "_Usage":
    return _Usage(message)


def _model_from_args(args) -> Model1Spec | Model2Spec:
    name = args.model.lower()
    try:
        if name in ("model1", "m1"):
            if args.theta1 is None or args.theta2 is None:
                raise _fail_usage("--model model1 requires --theta1 and --theta2")
            return Model1Spec(theta1=args.theta1, theta2=args.theta2)
        if name in ("model2", "m2"):
            if args.theta is None:
                raise _fail_usage("--model model2 requires --theta")
            return Model2Spec(theta=args.theta)
    except BadSpec as exc:
        raise _fail_usage(str(exc)) from exc
    raise _fail_usage(f"unknown model {args.model!r}; expected model1 or model2")


def _family_from_args(args):
    try:
        return resolve_family(args.family)
    except TailCovarError as exc:
        raise _fail_usage(str(exc)) from exc


def _load_sample(path):
    try:
        return load_sample_csv(path)
    except OSError as exc:
        raise _fail_usage(f"cannot read {path}: {exc}") from exc
    except TailCovarError as exc:
        raise _fail_usage(f"bad sample file {path}: {exc}") from exc


def _read_columns(path, expected_header: str) -> np.ndarray:
    """Read a small strict CSV: exact header, one float row per line."""
    try:
        with open(path, "r") as fh:
            lines = [ln.strip() for ln in fh if ln.strip()]
    except OSError as exc:
        raise _fail_usage(f"cannot read {path}: {exc}") from exc
    if not lines or lines[0] != expected_header:
        raise _fail_usage(
            f"{path}: expected header {expected_header!r}, got "
            f"{lines[0]!r}" if lines else f"{path}: empty file"
        )
    width = expected_header.count(",") + 1
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != width:
            raise _fail_usage(f"{path}:{i}: expected {width} fields, got {len(parts)}")
        try:
            rows.append([float(v) for v in parts])
        except ValueError as exc:
            raise _fail_usage(f"{path}:{i}: {exc}") from exc
    if not rows:
        raise _fail_usage(f"{path}: no data rows")
    return np.asarray(rows, dtype=np.float64)


def _parse_k3_grid(spec: str) -> list[int]:
    """Parse ``"200,400,600"`` and/or range tokens ``"200:1200:100"``."""
    grid: list[int] = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            continue
        if ":" in token:
            parts = token.split(":")
            if len(parts) != 3:
                raise _fail_usage(
                    f"bad k3 range {token!r}; expected start:stop:step"
                )
            try:
                start, stop, step = (int(v) for v in parts)
            except ValueError as exc:
                raise _fail_usage(f"bad k3 range {token!r}: {exc}") from exc
            if step <= 0 or stop < start:
                raise _fail_usage(f"bad k3 range {token!r}: need step > 0, stop >= start")
            grid.extend(range(start, stop + 1, step))
        else:
            try:
                grid.append(int(token))
            except ValueError as exc:
                raise _fail_usage(f"bad k3 value {token!r}") from exc
    if not grid:
        raise _fail_usage("empty k3 grid")
    return grid


def _check_ks_against_n(n: int, ks) -> None:
    for name, k in ks:
        if k < 1:
            raise _fail_usage(f"--{name}={k} must be >= 1")
        if k >= n:
            raise _fail_usage(f"--{name}={k} must be smaller than the sample size n={n}")


def _emit_csv(out_path, header: str, rows) -> None:
    if out_path is None:
        sys.stdout.write(header + "\n")
        for row in rows:
            sys.stdout.write(format_row(row) + "\n")
    else:
        from tailcovar.serialize import write_csv

        write_csv(out_path, header, rows)


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_simulate(args) -> int:
    model = _model_from_args(args)
    if args.n < 1:
        raise _fail_usage(f"--n={args.n} must be >= 1")
    if isinstance(model, Model1Spec):
        sample = sample_model1(model, args.n, args.seed)
    else:
        sample = sample_model2(model, args.n, args.seed)
    write_sample_csv(args.out, sample)
    return 0


def _cmd_estimate(args) -> int:
    family = _family_from_args(args)
    sample = _load_sample(args.input)
    _check_ks_against_n(
        sample.n, [("k1", args.k1), ("k2", args.k2), ("k3", args.k3)]
    )
    est = covar_estimate(sample, args.p, args.k1, args.k2, args.k3, family)
    sys.stdout.write(est.to_json() + "\n")
    return 0


def _cmd_oracle(args) -> int:
    model = _model_from_args(args)
    covar = true_covar(model, args.p)
    js = joint_survival(model)
    payload = {
        "model": "model1" if isinstance(model, Model1Spec) else "model2",
        "p": args.p,
        "covar": covar,
        "var_y": float(js.sy_inv(args.p)),
    }
    if isinstance(model, Model1Spec):
        payload["theta1"] = model.theta1
        payload["theta2"] = model.theta2
    else:
        payload["theta"] = model.theta
    sys.stdout.write(dumps(payload) + "\n")
    return 0


def _summary_rows(report):
    cfg = report.config
    if isinstance(cfg.model, Model1Spec):
        model_id = "model1"
        theta = f"{cfg.model.theta1:g}/{cfg.model.theta2:g}"
    else:
        model_id = "model2"
        theta = f"{cfg.model.theta:g}"
    for cell in report.cells:
        yield (
            model_id,
            theta,
            report.true_value,
            cell.k1,
            cell.k2,
            cell.k3,
            cell.mean,
            cell.sd,
            report.naive_mean,
            report.naive_sd,
        )


def _cmd_table1(args) -> int:
    try:
        with open(args.config, "r") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise _fail_usage(f"cannot read {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _fail_usage(f"{args.config} is not valid JSON: {exc}") from exc
    try:
        config = ExperimentConfig.from_json_dict(raw)
    except (BadSpec, TailCovarError, TypeError, ValueError) as exc:
        raise _fail_usage(f"bad config {args.config}: {exc}") from exc

    report = run_table1(config, threads=args.threads)

    prefix = args.out_prefix or config.output or "table1"
    write_report_json(f"{prefix}.json", report)
    write_report_csv(f"{prefix}.csv", report)
    header = "model,theta,true_value,k1,k2,k3,mean,sd,naive_mean,naive_sd"
    sys.stdout.write(header + "\n")
    for row in _summary_rows(report):
        sys.stdout.write(format_row(row) + "\n")
    return 0


def _cmd_eta_scan(args) -> int:
    family = _family_from_args(args)
    sample = _load_sample(args.input)
    grid = _parse_k3_grid(args.k3_grid)
    for k3 in grid:
        if k3 >= sample.n:
            raise _fail_usage(
                f"k3={k3} must be smaller than the sample size n={sample.n}"
            )
    points = eta_scan(sample, family, None, grid)
    if args.out is None:
        _emit_csv(None, "k3,eta_hat", eta_scan_rows(points))
    else:
        write_eta_scan_csv(args.out, points)
    return 0


def _cmd_forecast(args) -> int:
    family = _family_from_args(args)
    residuals = _load_sample(args.residuals)
    params = _read_columns(args.params, "mu,sigma")
    if params.shape[0] != residuals.n:
        raise _fail_usage(
            f"params rows ({params.shape[0]}) must match residual rows "
            f"({residuals.n})"
        )
    _check_ks_against_n(
        args.window, [("k1", args.k1), ("k2", args.k2), ("k3", args.k3)]
    )
    records = dynamic_covar(
        residuals,
        params,
        args.p,
        (args.k1, args.k2, args.k3),
        family,
        window=args.window,
        refresh_every=args.refresh_every,
    )
    if args.out is None:
        _emit_csv(None, "t,mu,sigma,covar", forecast_rows(records))
    else:
        write_forecast_csv(args.out, records)
    return 0


def _cmd_score(args) -> int:
    fc = _read_columns(args.forecasts, "t,mu,sigma,covar")
    obs = _read_columns(args.observed, "x,y")
    records = [
        ForecastRecord(
            t=int(row[0]),
            mu_y=float(row[1]),
            sigma_y=float(row[2]),
            z_x=float("nan"),
            z_y=float("nan"),
            covar=float(row[3]),
        )
        for row in fc
    ]
    series = score_series(records, obs[:, 0], obs[:, 1], args.p, args.window)
    sys.stdout.write(dumps(series.to_json_dict()) + "\n")
    return 0


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailcovar",
        description="Semi-parametric CoVaR estimation for asymptotically "
        "independent loss pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_model_flags(sp):
        sp.add_argument("--model", required=True, help="model1 or model2")
        sp.add_argument("--theta1", type=float, help="first tail parameter (model1)")
        sp.add_argument("--theta2", type=float, help="second tail parameter (model1)")
        sp.add_argument("--theta", type=float, help="dependence parameter (model2)")

    def add_k_flags(sp):
        sp.add_argument("--p", type=float, required=True, help="risk level in (0,1)")
        sp.add_argument("--k1", type=int, required=True, help="Hill fraction")
        sp.add_argument("--k2", type=int, required=True, help="quantile anchor fraction")
        sp.add_argument("--k3", type=int, required=True, help="rank-fit fraction")
        sp.add_argument(
            "--family",
            required=True,
            help="tail family: pareto_mixture (pm) or inverted_husler_reiss (ihr)",
        )

    sp = sub.add_parser("simulate", help="draw a synthetic paired-loss sample")
    add_model_flags(sp)
    sp.add_argument("--n", type=int, required=True, help="sample size")
    sp.add_argument("--seed", type=int, required=True, help="rng seed")
    sp.add_argument("--out", required=True, help="output CSV path")
    sp.set_defaults(func=_cmd_simulate)

    sp = sub.add_parser("estimate", help="estimate CoVaR from a sample CSV")
    sp.add_argument("--input", required=True, help="two-column x,y CSV")
    add_k_flags(sp)
    sp.set_defaults(func=_cmd_estimate)

    sp = sub.add_parser("oracle", help="exact CoVaR of a built-in model")
    add_model_flags(sp)
    sp.add_argument("--p", type=float, required=True, help="risk level in (0,1)")
    sp.set_defaults(func=_cmd_oracle)

    sp = sub.add_parser("table1", help="run a replication study from a JSON config")
    sp.add_argument("--config", required=True, help="experiment config JSON path")
    sp.add_argument(
        "--out-prefix",
        help="prefix for the report JSON/CSV (default: config output or 'table1')",
    )
    sp.add_argument(
        "--threads",
        type=int,
        default=None,
        help="max worker processes for repetitions (default sequential)",
    )
    sp.set_defaults(func=_cmd_table1)

    sp = sub.add_parser("eta-scan", help="scan eta_hat over a k3 grid")
    sp.add_argument("--input", required=True, help="two-column x,y CSV")
    sp.add_argument(
        "--family",
        required=True,
        help="tail family: pareto_mixture (pm) or inverted_husler_reiss (ihr)",
    )
    sp.add_argument(
        "--k3-grid",
        required=True,
        help="comma list and/or start:stop:step ranges, e.g. 200:1200:100",
    )
    sp.add_argument("--out", help="output CSV path (default stdout)")
    sp.set_defaults(func=_cmd_eta_scan)

    sp = sub.add_parser("forecast", help="dynamic CoVaR forecasts from residuals")
    sp.add_argument("--residuals", required=True, help="two-column x,y residual CSV")
    sp.add_argument("--params", required=True, help="two-column mu,sigma CSV")
    add_k_flags(sp)
    sp.add_argument("--window", type=int, default=3000, help="rolling window length")
    sp.add_argument(
        "--refresh-every",
        type=int,
        default=50,
        help="steps between static re-estimations",
    )
    sp.add_argument("--out", help="output CSV path (default stdout)")
    sp.set_defaults(func=_cmd_forecast)

    sp = sub.add_parser("score", help="quantile-score forecasts on distress days")
    sp.add_argument("--forecasts", required=True, help="t,mu,sigma,covar CSV")
    sp.add_argument("--observed", required=True, help="two-column x,y CSV")
    sp.add_argument("--p", type=float, required=True, help="risk level in (0,1)")
    sp.add_argument("--window", type=int, default=3000, help="rolling VaR window")
    sp.set_defaults(func=_cmd_score)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"tailcovar: {exc}", file=sys.stderr)
        return 2
    except TailCovarError as exc:
        print(f"tailcovar: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"tailcovar: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover - exercised via __main__
    sys.exit(main())
