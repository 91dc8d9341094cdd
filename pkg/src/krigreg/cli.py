"""Command-line interface.

Exit codes: 0 success, 1 golden check mismatch, 2 usage or parse error,
3 conditioning or numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .cases import CASE_IDS, CASES
from .checks import check_case, evaluate_case
from .dataio import parse_grid, read_data_csv
from .exceptions import ConditioningError, NumericalError, UsageError
from .gpcore import PI, Exact, Nugget, fit
from .kernels import KernelSpec, covariance_matrix
from .likelihood import (
    NUGGET_FLOOR,
    TuningResult,
    estimate_lengthscales,
    estimate_nugget_cv,
    estimate_nugget_ml,
    pi_tolerance_for_condition,
    smallest_nugget_for_condition,
)
from .redundancy import PAIR_TOL, diagnose
from .spectral import DEFAULT_KAPPA_MAX, eigendecompose

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read_text(path):
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def load_kernel(arg) -> KernelSpec:
    """Kernel from inline JSON (starting with ``{``) or from a JSON file."""
    text = arg if arg.lstrip().startswith("{") else _read_text(arg)
    try:
        return KernelSpec.from_json(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"kernel JSON, line {exc.lineno}: {exc.msg}") from None


def _load_data(args):
    kernel = load_kernel(args.kernel)
    X, y = read_data_csv(_read_text(args.data))
    if X.shape[1] != kernel.dim:
        raise UsageError(f"data has {X.shape[1]} input columns, kernel expects {kernel.dim}")
    return X, y, kernel


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (np.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be positive and finite: {text!r}")
    return v


def _nonnegative(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (np.isfinite(v) and v >= 0):
        raise argparse.ArgumentTypeError(f"must be non-negative and finite: {text!r}")
    return v


def _range(text):
    parts = text.split(":")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi, got {text!r}") from None


def _policy(args, X, kernel):
    if args.policy == "exact":
        if args.eta is not None or args.tau2 is not None:
            raise UsageError("--eta and --tau2 do not apply to --policy exact")
        return Exact()
    if args.policy == "pi":
        if args.tau2 is not None:
            raise UsageError("--tau2 only applies to --policy nugget")
        eta = args.eta
        if eta is None and args.kappa_max is not None:
            lam1 = eigendecompose(covariance_matrix(kernel, X)).eigenvalues[0]
            eta = pi_tolerance_for_condition(lam1, args.kappa_max)
        return PI(eta)
    if args.eta is not None:
        raise UsageError("--eta only applies to --policy pi")
    tau2 = args.tau2
    if tau2 is None:
        if args.kappa_max is None:
            raise UsageError("--policy nugget needs --tau2 or --kappa-max")
        lam = eigendecompose(covariance_matrix(kernel, X)).eigenvalues
        tau2 = smallest_nugget_for_condition(lam[0], lam[-1], args.kappa_max)
    return Nugget(tau2)


def _conditioning_hint(X, kernel, kappa_max):
    lam = eigendecompose(covariance_matrix(kernel, X)).eigenvalues
    kmax = DEFAULT_KAPPA_MAX if kappa_max is None else kappa_max
    tau2 = smallest_nugget_for_condition(lam[0], lam[-1], kmax)
    return f"retry with --policy pi, or --policy nugget --tau2 {tau2!r} (condition number {kmax:g})"


def _emit_table(columns, rows, fmt, out):
    if fmt == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])
    else:
        json.dump({"columns": columns, "rows": [[float(v) for v in row] for row in rows]}, out)
        out.write("\n")


def cmd_fit_predict(args, out):
    X, y, kernel = _load_data(args)
    policy = _policy(args, X, kernel)
    try:
        model = fit(X, y, kernel, policy)
    except ConditioningError as exc:
        raise ConditioningError(f"{exc}; {_conditioning_hint(X, kernel, args.kappa_max)}") from None
    grid = parse_grid(args.grid, kernel.dim) if args.grid else X
    mean = np.atleast_1d(model.predict_mean(grid)) if len(grid) else np.empty(0)
    var = np.atleast_1d(model.predict_var(grid)) if len(grid) else np.empty(0)
    columns = [f"x{i + 1}" for i in range(kernel.dim)] + ["mean", "variance"]
    rows = np.column_stack([grid, mean, var]) if len(grid) else []
    _emit_table(columns, rows, args.format, out)
    if args.model_out:
        with open(args.model_out, "w", encoding="utf-8") as fh:
            fh.write(model.to_json())
    return EXIT_OK


def cmd_diagnose(args, out):
    X, y, kernel = _load_data(args)
    with_y = None if not np.any(y) else y
    report = diagnose(X, kernel, y=with_y, eta=args.eta, pair_tol=args.pair_tol)
    out.write(report.to_json() + "\n")
    return EXIT_OK


def cmd_tune(args, out):
    X, y, kernel = _load_data(args)
    run_ml = args.ml or not (args.cv or args.lengthscales or args.kappa_max is not None)
    res = TuningResult()
    upper = args.nugget_max
    if run_ml:
        s = estimate_nugget_ml(X, y, kernel, floor=args.nugget_min, upper=upper, full_output=True)
        res.tau2_ml, res.evaluations = s.x, res.evaluations + s.evaluations
        res.extra["objective_ml"] = s.objective
    if args.cv:
        s = estimate_nugget_cv(X, y, kernel, floor=args.nugget_min, upper=upper, full_output=True)
        res.tau2_cv, res.evaluations = s.x, res.evaluations + s.evaluations
        res.extra["objective_cv"] = s.objective
    if args.lengthscales:
        hp = estimate_lengthscales(X, y, kernel, args.lengthscales, nugget_bounds=args.nugget_ratio)
        res.theta, res.sigma2, res.objective = list(hp.theta), hp.sigma2, hp.objective
        res.evaluations += hp.evaluations
        if args.nugget_ratio is not None:
            res.extra["nugget"] = hp.nugget
    if args.kappa_max is not None:
        lam = eigendecompose(covariance_matrix(kernel, X)).eigenvalues
        res.extra["kappa_max"] = args.kappa_max
        res.extra["smallest_nugget"] = smallest_nugget_for_condition(lam[0], lam[-1], args.kappa_max)
        res.extra["eta"] = pi_tolerance_for_condition(lam[0], args.kappa_max)
    out.write(json.dumps(res.to_dict(), indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def cmd_example(args, out):
    if args.id not in CASES:
        raise UsageError(f"unknown example {args.id!r}; valid ids: {', '.join(CASE_IDS)}")
    case = CASES[args.id]
    result = evaluate_case(case)
    if args.check:
        checks = check_case(case, result)
        for c in checks:
            out.write(c.line() + "\n")
        failed = sum(not c.ok for c in checks)
        out.write(f"{args.id}: {len(checks) - failed}/{len(checks)} checks passed\n")
        return EXIT_CHECK if failed else EXIT_OK
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in result["projector"]:
            w.writerow([format(v, ".15g") for v in row])
        out.write(buf.getvalue())
    else:
        out.write(json.dumps(_jsonable(result), indent=2) + "\n")
    return EXIT_OK


def _data_args(p):
    p.add_argument("data", help="CSV file with header x1,...,xd,y ('-' for stdin)")
    p.add_argument("--kernel", required=True, help="kernel JSON, inline or as a file path")


def build_parser():
    parser = _Parser(prog="krigreg", description="Kriging with singular and ill-conditioned covariance matrices.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit-predict", help="fit a model and predict over a grid")
    _data_args(p)
    p.add_argument("--policy", choices=("pi", "nugget", "exact"), default="pi")
    p.add_argument("--eta", type=_positive, help="pseudoinverse eigenvalue cut-off")
    p.add_argument("--tau2", type=_nonnegative, help="nugget")
    p.add_argument("--kappa-max", type=_positive, help="target condition number; sets eta or tau2 when omitted")
    p.add_argument("--grid", help="lo:hi:n per dimension, comma separated (default: the design points)")
    p.add_argument("--format", choices=("json", "csv"), default="csv")
    p.add_argument("--model-out", help="write the fitted model as JSON")
    p.set_defaults(func=cmd_fit_predict)

    p = sub.add_parser("diagnose", help="redundant points and model-data discrepancy")
    _data_args(p)
    p.add_argument("--eta", type=_positive)
    p.add_argument("--pair-tol", type=_positive, default=PAIR_TOL)
    p.add_argument("--format", choices=("json",), default="json")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("tune", help="estimate the nugget and/or length-scales")
    _data_args(p)
    p.add_argument("--ml", action="store_true", help="maximum-likelihood nugget (default)")
    p.add_argument("--cv", action="store_true", help="leave-one-out cross-validation nugget")
    p.add_argument("--lengthscales", type=_range, metavar="LO:HI", help="search length-scales in this box")
    p.add_argument("--nugget-ratio", type=_range, metavar="LO:HI",
                   help="also search a nugget-to-variance ratio in this box with --lengthscales")
    p.add_argument("--nugget-min", type=_positive, default=NUGGET_FLOOR)
    p.add_argument("--nugget-max", type=_positive)
    p.add_argument("--kappa-max", type=_positive, help="report the smallest nugget and eta reaching this condition number")
    p.add_argument("--format", choices=("json",), default="json")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("paper-example", help="reproduce a reference example")
    p.add_argument("id", help=f"one of: {', '.join(CASE_IDS)}")
    p.add_argument("--check", action="store_true", help="compare with stored reference values")
    p.add_argument("--format", choices=("json", "csv"), default="json",
                   help="csv prints the image projector with 15 significant digits")
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None, out=None, err=None):
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        err.write(f"krigreg: error: {exc}\n")
        return EXIT_USAGE
    except (ConditioningError, NumericalError) as exc:
        err.write(f"krigreg: numerical error: {exc}\n")
        return EXIT_NUMERIC


def run():
    sys.exit(main())
