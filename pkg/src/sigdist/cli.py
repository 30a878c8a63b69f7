"""Command-line front end.

Subcommands cover the whole pipeline: ``fit`` a density from CSV data,
``build`` an estimator from a model, ``score`` CSV rows against an estimator,
``threshold`` for the density cutoff at a significance level, ``sample`` to
draw from a model, and ``validate`` to run the RMSE experiment.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

import argparse
import csv
import json
import math
import sys

import numpy as np

from .errors import (
    DataError,
    NumericError,
    SigdistError,
    TooFewPoints,
    UsageError,
)
from .estimator import (
    DEFAULT_RMSE_BUDGET,
    MAX_SAMPLE_COUNT,
    SldEstimator,
    required_sample_count,
)
from .experiments import RmseExperimentConfig, export_plot_data, run_rmse_experiment
from .jsonio import format_float, read_document
from .models import GaussianModel, fit_kde, load_model

VALIDATE_GATE = 0.15


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage failures exit 1 instead of argparse's 2."""

    def error(self, message):
        raise UsageError(message)


def _all_numeric(record):
    try:
        for cell in record:
            float(cell)
    except ValueError:
        return False
    return True


def _read_matrix(path) -> np.ndarray:
    """Read a CSV of feature vectors; optional header is auto-detected by a
    non-numeric first row. Errors carry 1-based file line numbers."""
    data = []
    width = None
    with open(path, newline="", encoding="utf-8") as handle:
        for lineno, record in enumerate(csv.reader(handle), start=1):
            if not record:
                continue
            if lineno == 1 and not _all_numeric(record):
                continue
            row = []
            for cell in record:
                try:
                    value = float(cell)
                except ValueError:
                    raise DataError(f"{path}, line {lineno}: cannot parse value {cell!r}") from None
                if not math.isfinite(value):
                    raise DataError(f"{path}, line {lineno}: non-finite value {cell!r}")
                row.append(value)
            if width is None:
                width = len(row)
            elif len(row) != width:
                raise DataError(
                    f"{path}, line {lineno}: expected {width} columns, found {len(row)}"
                )
            data.append(row)
    if not data:
        raise DataError(f"{path}: no data rows")
    return np.array(data, dtype=np.float64)


def _write_matrix(matrix, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for row in matrix:
            handle.write(",".join(format_float(cell) for cell in row) + "\n")


def _parse_model_spec(spec: str):
    base, _, rest = spec.partition(":")
    if base == "gaussian":
        if rest:
            raise UsageError("model spec 'gaussian' takes no options")
        return "gaussian", None
    if base == "kde":
        if not rest:
            return "kde", None
        key, _, value = rest.partition("=")
        if key != "bandwidth" or not value:
            raise UsageError(f"unknown kde option {rest!r}; expected kde:bandwidth=<h>")
        try:
            bandwidth = float(value)
        except ValueError:
            raise UsageError(f"cannot parse bandwidth {value!r}") from None
        if not math.isfinite(bandwidth) or bandwidth <= 0:
            raise UsageError("bandwidth must be finite and > 0")
        return "kde", bandwidth
    if base == "mixture":
        raise UsageError(
            "mixture fitting is not supported (no EM); author a mixture model "
            "JSON by hand and pass it to `build`"
        )
    raise UsageError(f"unknown model spec {spec!r}; expected gaussian | kde[:bandwidth=<h>]")


def _check_cli_alpha(alpha: float) -> float:
    if math.isnan(alpha) or not 0.0 <= alpha <= 1.0:
        raise UsageError(f"--alpha must lie in [0, 1], got {alpha!r}")
    return alpha


def cmd_fit(args) -> int:
    data = _read_matrix(args.input)
    kind, bandwidth = _parse_model_spec(args.model)
    if kind == "gaussian":
        if data.shape[0] < 2:
            raise TooFewPoints("gaussian fit needs at least 2 rows")
        mean = data.mean(axis=0)
        cov = np.atleast_2d(np.cov(data, rowvar=False, ddof=1))
        model = GaussianModel(mean, cov)
    else:
        model = fit_kde(data, bandwidths=bandwidth)
    model.save(args.output)
    print(f"fit {kind} model on {data.shape[0]} rows (dimension {data.shape[1]}) -> {args.output}")
    return 0


def cmd_build(args) -> int:
    model = load_model(args.model)
    if args.n is not None and args.rmse is not None:
        raise UsageError("give at most one of --n and --rmse")
    if args.n is not None:
        if args.n < 1:
            raise UsageError("--n must be >= 1")
        n = args.n
    else:
        rmse = DEFAULT_RMSE_BUDGET if args.rmse is None else args.rmse
        if not 0.0 < rmse <= 0.5:
            raise UsageError(f"--rmse must lie in (0, 0.5], got {rmse!r}")
        n = required_sample_count(rmse)
    if n > MAX_SAMPLE_COUNT:
        raise UsageError(f"n = {n} exceeds the cap of {MAX_SAMPLE_COUNT}")
    estimator = SldEstimator.build(model, n, args.seed)
    estimator.save(args.output)
    print(f"n = {n}")
    print(f"rmse_bound = {estimator.rmse_bound:.6g}")
    return 0


def cmd_score(args) -> int:
    estimator = SldEstimator.load(args.estimator)
    alpha = _check_cli_alpha(args.alpha)
    data = _read_matrix(args.input)
    expected = estimator.model.dim
    if data.shape[1] != expected:
        raise DataError(
            f"dimension mismatch: model expects {expected} columns, found {data.shape[1]}"
        )
    z = estimator.significance_level_of(data)
    outliers = z < alpha
    with open(args.output, "w", encoding="utf-8") as handle:
        handle.write("row,z,verdict\n")
        for index, (score, flagged) in enumerate(zip(z, outliers)):
            verdict = "outlier" if flagged else "inlier"
            handle.write(f"{index},{format_float(score)},{verdict}\n")
    print(f"outliers: {int(outliers.sum())} of {z.size}")
    return 0


def cmd_threshold(args) -> int:
    estimator = SldEstimator.load(args.estimator)
    alpha = _check_cli_alpha(args.alpha)
    threshold = estimator.threshold_for(alpha)
    print(f"theta = {threshold.theta:.6g}")
    print(f"log_theta = {format_float(threshold.log_theta)}")
    return 0


def cmd_validate(args) -> int:
    config = RmseExperimentConfig.from_dict(_read_json(args.config))
    result = run_rmse_experiment(config)
    export_plot_data(result, args.output)
    deviation = result.max_relative_deviation
    if result.within(VALIDATE_GATE):
        print(f"PASS: max relative deviation {deviation:.1%} (gate {VALIDATE_GATE:.0%})")
        return 0
    print(f"FAIL: max relative deviation {deviation:.1%} (gate {VALIDATE_GATE:.0%})")
    return 3


def cmd_sample(args) -> int:
    model = load_model(args.model)
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    rng = np.random.default_rng(args.seed)
    draws = model.sample(rng, args.count)
    _write_matrix(draws, args.output)
    print(f"wrote {args.count} samples of dimension {model.dim} -> {args.output}")
    return 0


def _read_json(path) -> dict:
    try:
        return read_document(path)
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: invalid JSON: {exc}") from exc


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="sigdist",
        description="Prediction regions and significance-level outlier scores.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", help="fit a density model from CSV feature data")
    p.add_argument("input", help="CSV of feature vectors (optional header)")
    p.add_argument("model", help="model spec: gaussian | kde[:bandwidth=<h>]")
    p.add_argument("output", help="model JSON path")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("build", help="build a significance-level estimator from a model")
    p.add_argument("model", help="model JSON path")
    p.add_argument("output", help="estimator JSON path")
    p.add_argument("--rmse", type=float, default=None,
                   help=f"worst-case RMSE budget in (0, 0.5] (default {DEFAULT_RMSE_BUDGET})")
    p.add_argument("--n", type=int, default=None, help="explicit sample count (overrides --rmse)")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("score", help="score CSV rows and classify inlier/outlier")
    p.add_argument("estimator", help="estimator JSON path")
    p.add_argument("input", help="CSV of feature vectors to score")
    p.add_argument("output", help="output CSV path (columns row,z,verdict)")
    p.add_argument("--alpha", type=float, required=True, help="significance level in [0, 1]")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("threshold", help="print the density threshold for a significance level")
    p.add_argument("estimator", help="estimator JSON path")
    p.add_argument("--alpha", type=float, required=True, help="significance level in [0, 1]")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("validate", help="run the RMSE validation experiment")
    p.add_argument("config", help="experiment config JSON path")
    p.add_argument("output", help="output TSV path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("sample", help="draw samples from a model into a CSV")
    p.add_argument("model", help="model JSON path")
    p.add_argument("output", help="output CSV path")
    p.add_argument("--count", type=int, required=True, help="number of draws")
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.set_defaults(func=cmd_sample)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except SigdistError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
