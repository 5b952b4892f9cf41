"""JSON and CSV serialization of fitted models and experiment results.

JSON floats are written with ``repr``, the shortest string that parses back
to the same double, so every record round-trips exactly. Non-finite values
are encoded as the strings "nan", "inf" and "-inf".
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict

import numpy as np

from .design import DesignKind
from .diagnostics import CheckResult
from .distributions import CdfSpec
from .experiments import CvResult, OrderSearchResult, PermEntry, PermScanResult, Plateau
from .fit import FittedModel
from .model import ModelSpec
from .transforms import EqualityReport

SCHEMA = "catglm-result"
SCHEMA_VERSION = 1
FORMATS = ("json", "csv")


def _num(v):
    if v is None:
        return None
    v = float(v)
    if math.isfinite(v):
        return v
    return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")


def _unnum(v):
    if v is None:
        return None
    return float(v)


def _array(a) -> list:
    a = np.asarray(a, dtype=float)
    if a.ndim == 0:
        return _num(a)
    return [_array(x) for x in a]


def spec_to_dict(spec: ModelSpec) -> dict:
    return {
        "ratio": spec.ratio,
        "cdf": asdict(spec.cdf),
        "design": {
            "kind": spec.design.kind,
            "covariates": [[mode, None if rows is None else list(rows)] for mode, rows in spec.design.covariates],
            "left": None if spec.design.left is None else [list(r) for r in spec.design.left],
        },
        "J": spec.J,
        "p": spec.p,
        "labels": list(spec.labels),
        "order": list(spec.order),
        "name": str(spec),
    }


def spec_from_dict(d: dict) -> ModelSpec:
    des = d["design"]
    design = DesignKind(
        des["kind"],
        tuple((mode, None if rows is None else tuple(rows)) for mode, rows in des["covariates"]),
        None if des["left"] is None else tuple(tuple(float(v) for v in r) for r in des["left"]),
    )
    return ModelSpec(d["ratio"], CdfSpec(**d["cdf"]), design, d["J"], d["p"], tuple(d["labels"]), tuple(d["order"]))


def parameter_names(spec: ModelSpec, covariate_names=None) -> list[str]:
    """Readable names for the columns of the design matrix."""
    J, p = spec.J, spec.p
    cov = list(covariate_names or [f"x{k + 1}" for k in range(p)])
    names = [f"alpha_{j + 1}" for j in range(J - 1)]
    kind = spec.design.kind
    if kind == "complete":
        names += [f"delta_{j + 1}[{c}]" for j in range(J - 1) for c in cov]
    elif kind in ("proportional", "z0"):
        names += [f"delta[{c}]" for c in cov]
    elif kind == "custom":
        modes = spec.design._custom_modes(J, p)
        names += [f"delta_{j + 1}[{cov[c]}]" for j in range(J - 1) for c, (mode, rows) in enumerate(modes) if mode == "c" and j in rows]
        names += [f"delta[{cov[c]}]" for c, (mode, _) in enumerate(modes) if mode == "p"]
    return names


# ---------------------------------------------------------------------------
# record <-> dict


def to_dict(record) -> dict:
    if isinstance(record, FittedModel):
        body = {
            "spec": spec_to_dict(record.spec),
            "beta": _array(record.beta),
            "log_lik": _num(record.log_lik),
            "aic": _num(record.aic),
            "bic": _num(record.bic),
            "converged": bool(record.converged),
            "iterations": int(record.iterations),
            "n_effective": _num(record.n_effective),
            "score_norm": _num(record.score_norm),
            "fisher_information": _array(record.fisher_information),
            "history": [_num(v) for v in record.history],
        }
        kind = "fitted_model"
    elif isinstance(record, PermScanResult):
        body = {
            "spec": spec_to_dict(record.spec),
            "entries": [
                {"order": list(e.order), "labels": list(e.labels), "log_lik": _num(e.log_lik), "converged": e.converged, "error": e.error}
                for e in record.entries
            ],
            "plateaus": [{"members": list(p.members), "log_lik": _num(p.log_lik)} for p in record.plateaus],
            "orbit_spread": _num(record.orbit_spread),
        }
        kind = "perm_scan"
    elif isinstance(record, CvResult):
        body = {
            "names": list(record.names),
            "fold_errors": _array(record.fold_errors),
            "mean_error": {k: _num(v) for k, v in record.mean_error.items()},
            "failures": record.failures,
            "groups": record.groups,
        }
        kind = "cv"
    elif isinstance(record, OrderSearchResult):
        body = {
            "labels": list(record.labels),
            "rankings": {c: [[list(o), _num(v)] for o, v in rows] for c, rows in record.rankings.items()},
            "ties": {c: [[list(a), list(b)] for a, b in pairs] for c, pairs in record.ties.items()},
        }
        kind = "order_search"
    elif isinstance(record, EqualityReport):
        body = {"max_deviation": _num(record.max_deviation), "eta_deviation": _num(record.eta_deviation), "undefined_points": list(record.undefined_points)}
        kind = "equality_report"
    elif isinstance(record, CheckResult):
        body = {"suite": record.suite, "case": record.case, "max_error": _num(record.max_error), "tolerance": _num(record.tolerance), "passed": record.passed}
        kind = "check"
    elif isinstance(record, list):
        body = {"items": [to_dict(r) for r in record]}
        kind = "list"
    else:
        raise TypeError(f"cannot serialize {type(record).__name__}")
    return {"schema": SCHEMA, "version": SCHEMA_VERSION, "type": kind, **body}


def from_dict(d: dict):
    if d.get("schema") != SCHEMA:
        raise ValueError("not a catglm result record")
    if d.get("version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema version {d.get('version')}")
    kind = d["type"]
    if kind == "fitted_model":
        return FittedModel(
            spec=spec_from_dict(d["spec"]),
            beta=np.array(d["beta"], dtype=float),
            log_lik=_unnum(d["log_lik"]),
            iterations=d["iterations"],
            converged=d["converged"],
            aic=_unnum(d["aic"]),
            bic=_unnum(d["bic"]),
            fisher_information=np.array(d["fisher_information"], dtype=float),
            n_effective=_unnum(d["n_effective"]),
            score_norm=_unnum(d["score_norm"]),
            history=[_unnum(v) for v in d["history"]],
        )
    if kind == "perm_scan":
        entries = [PermEntry(tuple(e["order"]), tuple(e["labels"]), _unnum(e["log_lik"]), e["converged"], e["error"]) for e in d["entries"]]
        plateaus = [Plateau(list(p["members"]), _unnum(p["log_lik"])) for p in d["plateaus"]]
        return PermScanResult(spec_from_dict(d["spec"]), entries, plateaus, _unnum(d["orbit_spread"]))
    if kind == "cv":
        errors = np.array(d["fold_errors"], dtype=float).reshape(len(d["names"]), -1)
        return CvResult(list(d["names"]), errors, {k: list(v) for k, v in d["failures"].items()}, {k: list(v) for k, v in d["groups"].items()})
    if kind == "order_search":
        rankings = {c: [(tuple(o), _unnum(v)) for o, v in rows] for c, rows in d["rankings"].items()}
        ties = {c: [(tuple(a), tuple(b)) for a, b in pairs] for c, pairs in d["ties"].items()}
        return OrderSearchResult(tuple(d["labels"]), rankings, ties)
    if kind == "equality_report":
        return EqualityReport(_unnum(d["max_deviation"]), _unnum(d["eta_deviation"]), list(d["undefined_points"]))
    if kind == "check":
        return CheckResult(d["suite"], d["case"], _unnum(d["max_error"]), _unnum(d["tolerance"]))
    if kind == "list":
        return [from_dict(x) for x in d["items"]]
    raise ValueError(f"unknown record type {kind!r}")


# ---------------------------------------------------------------------------
# text


def _rows(record) -> tuple[list[str], list[list]]:
    if isinstance(record, FittedModel):
        se, _ = record.standard_errors()
        names = parameter_names(record.spec)
        return ["parameter", "estimate", "std_error"], [[n, repr(float(b)), repr(float(s))] for n, b, s in zip(names, record.beta, se)]
    if isinstance(record, PermScanResult):
        pid = record.plateau_of()
        rows = [
            [" ".join(e.labels), "" if e.diverged else repr(e.log_lik), pid.get(i, ""), int(e.diverged)]
            for i, e in enumerate(record.entries)
        ]
        return ["permutation", "log_lik", "plateau_id", "diverged"], rows
    if isinstance(record, CvResult):
        k = record.fold_errors.shape[1]
        means = record.mean_error
        rows = [[n, repr(means[n])] + [repr(float(v)) for v in row] for n, row in zip(record.names, record.fold_errors)]
        return ["classifier", "mean_error"] + [f"fold_{f + 1}" for f in range(k)], rows
    if isinstance(record, OrderSearchResult):
        rows = [[c, r + 1, " ".join(o), "" if v is None else repr(v)] for c, ranked in record.rankings.items() for r, (o, v) in enumerate(ranked)]
        return ["cdf", "rank", "order", "log_lik"], rows
    if isinstance(record, EqualityReport):
        return ["max_deviation", "eta_deviation", "n_undefined"], [[repr(record.max_deviation), repr(record.eta_deviation), len(record.undefined_points)]]
    if isinstance(record, CheckResult):
        return ["suite", "case", "max_error", "tolerance", "passed"], [[record.suite, record.case, repr(record.max_error), repr(record.tolerance), int(record.passed)]]
    if isinstance(record, list) and record:
        header, _ = _rows(record[0])
        rows = [[i + 1] + row for i, r in enumerate(record) for row in _rows(r)[1]]
        return ["item"] + header, rows
    raise TypeError(f"no tabular form for {type(record).__name__}")


def emit_result(record, fmt: str = "json") -> str:
    """Serialize a result record as JSON (round-trippable) or CSV (tabular view)."""
    if fmt == "json":
        return json.dumps(to_dict(record), indent=2, allow_nan=False)
    if fmt == "csv":
        header, rows = _rows(record)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def parse_result(text: str):
    """Inverse of ``emit_result(record, "json")``."""
    return from_dict(json.loads(text))
