"""Command-line interface: ``catglm <subcommand> [options]``."""

from __future__ import annotations

import argparse
import sys
import warnings

import numpy as np

from . import diagnostics, experiments
from .data import Dataset, load_csv
from .errors import CatGLMError, ConstraintViolation, ConvergenceWarning, ModelUndefinedError
from .fit import Controls, fisher_scoring, predict_proba
from .model import make_spec
from .results import FORMATS, emit_result, parse_result
from .transforms import PLANS, default_plan_spec, run_equality_trials

EXIT_OK, EXIT_ERROR, EXIT_UNDEFINED = 0, 1, 2


def _labels(text: str | None):
    return None if text is None else [t.strip() for t in text.split(",") if t.strip()]


def _add_data_args(parser: argparse.ArgumentParser, required: bool = True) -> None:
    g = parser.add_argument_group("data")
    g.add_argument("--data", required=required, help="CSV file")
    g.add_argument("--response", help="response column (default: first column)")
    g.add_argument("--covariates", help="comma-separated covariate columns (default: all others)")
    g.add_argument("--order", help="comma-separated category labels, fixing the category order")
    g.add_argument("--reference", help="label moved to the last (reference) position")
    g.add_argument("--delimiter", default=",")
    g.add_argument("--no-header", action="store_true")
    g.add_argument("--standardize", action="store_true", help="z-score numeric covariates")
    g.add_argument("--weights", help="weight column (a column named 'count' is used automatically)")
    g.add_argument("--folds", help="column holding predefined CV fold ids")


def _add_model_args(parser: argparse.ArgumentParser, ratio: str | None = "reference", cdf: str = "logistic", design: str = "complete") -> None:
    if ratio is not None:
        parser.add_argument("--ratio", default=ratio, choices=("reference", "adjacent", "cumulative", "sequential"))
    parser.add_argument("--cdf", default=cdf)
    parser.add_argument("--design", default=design)


def _load(args) -> Dataset:
    response = args.response
    if response is None:
        with open(args.data) as fh:
            response = fh.readline().split(args.delimiter)[0].strip()
    return load_csv(
        args.data,
        response,
        _labels(args.covariates),
        delimiter=args.delimiter,
        header=not args.no_header,
        category_order=_labels(args.order),
        reference=args.reference,
        standardize=args.standardize,
        weight_column=args.weights,
        fold_column=args.folds,
    )


def _controls(args) -> Controls:
    return Controls(max_iter=args.max_iter, tol=args.tol)


def cmd_fit(args):
    data = _load(args)
    spec = make_spec(args.ratio, args.cdf, args.design, data.J, data.p, labels=data.labels)
    return fisher_scoring(spec, data, _controls(args))


def cmd_predict(args):
    with open(args.model) as fh:
        fitted = parse_result(fh.read())
    if args.x is not None:
        X = np.array([[float(v) for v in args.x.split(",")]])
    else:
        X = _load(args).X
    probs = predict_proba(fitted, X)
    labels = fitted.spec.labels
    if args.format == "csv":
        lines = [",".join(list(labels) + ["predicted"])]
        for row in probs:
            lines.append(",".join([repr(float(v)) for v in row] + [labels[int(np.argmax(row))]]))
        return "\n".join(lines) + "\n"
    import json

    return json.dumps({"labels": list(labels), "probabilities": probs.tolist(), "predicted": [labels[int(k)] for k in np.argmax(probs, axis=1)]}, indent=2)


def cmd_jac_check(args):
    out = diagnostics.run_jacobian_suite(range(2, args.j_max + 1), args.trials, args.seed)
    if not args.skip_score:
        out += diagnostics.run_score_suite(seed=args.seed)
    return out


def cmd_equiv_check(args):
    spec = None
    if args.ratio or args.cdf or args.design:
        base = default_plan_spec(args.plan, args.j)
        spec = make_spec(args.ratio or base.ratio, args.cdf or base.cdf, args.design or base.design, args.j, 1)
    return run_equality_trials(args.plan, args.j, args.trials, np.random.default_rng(args.seed), spec)


def _surrogate(name: str, seed: int) -> Dataset:
    if name == "grouped":
        return experiments.dreams_surrogate(seed)
    if name == "pear":
        return experiments.pear_tree_surrogate(seed=seed)
    raise ValueError(f"unknown surrogate {name!r}")


def _data_or_surrogate(args) -> Dataset:
    if args.data:
        return _load(args)
    if args.surrogate:
        return _surrogate(args.surrogate, args.seed)
    raise ValueError("pass --data or --surrogate")


def cmd_perm_scan(args):
    data = _data_or_surrogate(args)
    spec = make_spec(args.ratio, args.cdf, args.design, data.J, data.p, labels=data.labels)
    return experiments.permutation_scan(spec, data, controls=_controls(args))


def cmd_order_search(args):
    data = _data_or_surrogate(args)
    cdfs = _labels(args.cdfs)
    return experiments.ordering_search(data, args.constraints, cdfs, args.design, _controls(args))


def cmd_cv(args):
    data = _load(args)
    classifiers, groups = experiments.classifier_grid(data)
    if args.grid == "baseline":
        classifiers, groups = classifiers[:1], {"baseline": groups["baseline"]}
    elif args.grid == "fixed":
        keep = set(groups["baseline"] + groups["fixed_reference"])
        classifiers = [c for c in classifiers if c[0] in keep]
        groups.pop("all_references")
    return experiments.kfold_cv(classifiers, data, args.k, args.seed, _controls(args), groups)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for folds and parameter draws")
    common.add_argument("--tol", type=float, default=1e-8, help="score tolerance, relative to n")
    common.add_argument("--max-iter", type=int, default=100)
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--output", "-o", help="write to this file instead of stdout")

    parser = argparse.ArgumentParser(prog="catglm", description="Categorical GLMs specified by (ratio, cdf, design).")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", parents=[common], help="fit one model by Fisher scoring")
    _add_model_args(p)
    _add_data_args(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("predict", parents=[common], help="category probabilities from a fitted model")
    p.add_argument("--model", required=True, help="JSON written by 'fit'")
    p.add_argument("--x", help="comma-separated covariate vector")
    _add_data_args(p, required=False)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("jac-check", parents=[common], help="finite-difference checks of Jacobians and scores")
    p.add_argument("--j-max", type=int, default=8)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--skip-score", action="store_true")
    p.set_defaults(func=cmd_jac_check)

    p = sub.add_parser("equiv-check", parents=[common], help="verify an equality or invariance plan")
    p.add_argument("--plan", required=True, choices=PLANS)
    p.add_argument("--j", type=int, default=4)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--ratio", choices=("reference", "adjacent", "cumulative", "sequential"))
    p.add_argument("--cdf")
    p.add_argument("--design")
    p.set_defaults(func=cmd_equiv_check)

    p = sub.add_parser("perm-scan", parents=[common], help="fit every category permutation")
    _add_model_args(p)
    _add_data_args(p, required=False)
    p.add_argument("--surrogate", choices=("grouped", "pear"), help="use a built-in synthetic dataset")
    p.set_defaults(func=cmd_perm_scan)

    p = sub.add_parser("order-search", parents=[common], help="rank orders consistent with a partial order")
    p.add_argument("--constraints", required=True, help='e.g. "l<u<U, l<s<S"')
    p.add_argument("--cdfs", default="logistic,gumbelmax")
    p.add_argument("--design", default="complete")
    _add_data_args(p, required=False)
    p.add_argument("--surrogate", choices=("grouped", "pear"))
    p.set_defaults(func=cmd_order_search)

    p = sub.add_parser("cv", parents=[common], help="k-fold cross-validated error of reference classifiers")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--grid", choices=("baseline", "fixed", "all"), default="all")
    _add_data_args(p)
    p.set_defaults(func=cmd_cv)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always", ConvergenceWarning)
            result = args.func(args)
        text = result if isinstance(result, str) else emit_result(result, args.format)
    except (ModelUndefinedError, ConstraintViolation) as exc:
        print(f"catglm: model undefined: {exc}", file=sys.stderr)
        return EXIT_UNDEFINED
    except (CatGLMError, ValueError, OSError) as exc:
        print(f"catglm: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
