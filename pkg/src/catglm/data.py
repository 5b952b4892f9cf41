"""Encoded datasets: CSV ingestion and synthetic generators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .likelihood import Observation
from .model import ModelSpec, category_probabilities, covariate_rows


@dataclass(frozen=True, eq=False)
class Dataset:
    """Category codes (0-based, dataset order), covariates and positive weights."""

    codes: np.ndarray
    X: np.ndarray
    weights: np.ndarray
    labels: tuple[str, ...]
    covariate_names: tuple[str, ...] = ()
    provenance: dict = field(default_factory=dict, compare=False)
    folds: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=int)
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(len(codes), -1)
        weights = np.ones(len(codes)) if self.weights is None else np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "labels", tuple(str(l) for l in self.labels))
        if not self.covariate_names:
            object.__setattr__(self, "covariate_names", tuple(f"x{k + 1}" for k in range(X.shape[1])))
        if len(X) != len(codes) or len(weights) != len(codes):
            raise ValueError("codes, X and weights must have the same number of rows")
        if codes.size and (codes.min() < 0 or codes.max() >= len(self.labels)):
            raise ValueError("category codes out of range")
        if np.any(weights <= 0):
            raise ValueError("weights must be positive")

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.labels == other.labels
            and self.covariate_names == other.covariate_names
            and np.array_equal(self.codes, other.codes)
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.weights, other.weights)
        )

    __hash__ = None

    @property
    def n(self) -> int:
        return len(self.codes)

    @property
    def J(self) -> int:
        return len(self.labels)

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def n_effective(self) -> float:
        return float(self.weights.sum())

    @property
    def category_dictionary(self) -> dict[str, int]:
        return {label: k for k, label in enumerate(self.labels)}

    def observations(self, order=None) -> list[Observation]:
        """Observations with indicators in the given category order (identity by default)."""
        order = list(range(self.J)) if order is None else list(order)
        position = {cat: k for k, cat in enumerate(order)}
        out = []
        for c, x, w in zip(self.codes, self.X, self.weights):
            y = [0] * (self.J - 1)
            if position[c] < self.J - 1:
                y[position[c]] = 1
            out.append(Observation(tuple(y), tuple(x), float(w)))
        return out

    def subset(self, rows) -> "Dataset":
        rows = np.asarray(rows)
        return Dataset(
            self.codes[rows],
            self.X[rows],
            self.weights[rows],
            self.labels,
            self.covariate_names,
            self.provenance,
            None if self.folds is None else self.folds[rows],
        )

    def counts(self) -> np.ndarray:
        return np.bincount(self.codes, weights=self.weights, minlength=self.J)


def load_csv(
    path,
    response: str,
    covariates=None,
    *,
    delimiter: str = ",",
    header: bool = True,
    category_order=None,
    reference: str | None = None,
    standardize: bool = False,
    weight_column: str | None = None,
    fold_column: str | None = None,
) -> Dataset:
    """Read a CSV file into a :class:`Dataset`.

    Non-numeric covariates are expanded to C-1 indicator columns (first level
    dropped). Without ``category_order``, categories follow first appearance;
    ``reference`` moves one label to the last position. A column named
    ``count`` is used as weights unless ``weight_column`` says otherwise.
    """
    frame = pd.read_csv(path, sep=delimiter, header=0 if header else None, dtype=str, skipinitialspace=True)
    frame.columns = [str(c).strip() for c in frame.columns]
    if response not in frame.columns:
        raise ValueError(f"response column {response!r} not found")
    if weight_column is None and "count" in frame.columns and response != "count":
        weight_column = "count"
    reserved = {response, weight_column, fold_column} - {None}
    if covariates is None:
        covariates = [c for c in frame.columns if c not in reserved]
    covariates = list(covariates)
    for c in covariates:
        if c not in frame.columns:
            raise ValueError(f"covariate column {c!r} not found")
    if frame[[response] + covariates].isna().any().any():
        raise ValueError("missing or ragged cells in the selected columns")

    y = frame[response].str.strip()
    seen = list(dict.fromkeys(y))
    if category_order is not None:
        labels = [str(l).strip() for l in category_order]
        unknown = set(labels) - set(seen)
        if unknown:
            raise ValueError(f"unknown labels in category order: {sorted(unknown)}")
        missing = set(seen) - set(labels)
        if missing:
            raise ValueError(f"category order misses observed labels: {sorted(missing)}")
    else:
        labels = seen
    if reference is not None:
        if reference not in labels:
            raise ValueError(f"unknown reference label {reference!r}")
        labels = [l for l in labels if l != reference] + [reference]
    index = {l: k for k, l in enumerate(labels)}
    codes = y.map(index).to_numpy(dtype=int)

    columns, names, scaling = [], [], {}
    for c in covariates:
        raw = frame[c].str.strip()
        numeric = pd.to_numeric(raw, errors="coerce")
        if numeric.notna().all():
            values = numeric.to_numpy(dtype=float)
            if standardize:
                mu, sd = values.mean(), values.std()
                scaling[c] = (float(mu), float(sd))
                values = (values - mu) / (sd if sd > 0 else 1.0)
            columns.append(values)
            names.append(c)
        elif numeric.notna().any():
            bad = raw[numeric.isna()].iloc[0]
            raise ValueError(f"non-numeric cell {bad!r} in numeric covariate {c!r}")
        else:
            levels = list(dict.fromkeys(raw))
            for level in levels[1:]:
                columns.append((raw == level).to_numpy(dtype=float))
                names.append(f"{c}={level}")
    X = np.column_stack(columns) if columns else np.zeros((len(frame), 0))

    if weight_column is not None:
        weights = pd.to_numeric(frame[weight_column], errors="raise").to_numpy(dtype=float)
    else:
        weights = np.ones(len(frame))
    folds = None
    if fold_column is not None:
        folds = pd.to_numeric(frame[fold_column], errors="raise").to_numpy(dtype=int)
    provenance = {
        "path": str(path),
        "response": response,
        "covariates": covariates,
        "delimiter": delimiter,
        "standardize": scaling if standardize else False,
        "weight_column": weight_column,
    }
    return Dataset(codes, X, weights, tuple(labels), tuple(names), provenance, folds)


def simulate(spec: ModelSpec, beta, X, rng: np.random.Generator, labels=None) -> Dataset:
    """Draw one category per row of ``X`` from the model at ``beta``."""
    X = covariate_rows(X, spec.p)
    probs = category_probabilities(spec, beta, X)
    cum = np.cumsum(probs, axis=1)
    u = rng.random(len(X))[:, None]
    codes = np.minimum((u > cum).sum(axis=1), spec.J - 1)
    return Dataset(codes, X, np.ones(len(X)), tuple(labels or spec.labels))


def grouped(data: Dataset) -> Dataset:
    """Collapse identical (category, covariate) rows into weighted rows."""
    keys = np.column_stack([data.codes, data.X])
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    weights = np.bincount(inverse.ravel(), weights=data.weights)
    return Dataset(uniq[:, 0].astype(int), uniq[:, 1:], weights, data.labels, data.covariate_names, dict(data.provenance))


def contingency_table(spec: ModelSpec, beta, levels, n_per_level: int, rng: np.random.Generator) -> Dataset:
    """Grouped J x C table: multinomial counts at each covariate level."""
    levels = covariate_rows(levels, spec.p)
    probs = category_probabilities(spec, beta, levels)
    codes, X, w = [], [], []
    for x, pr in zip(levels, probs):
        counts = rng.multinomial(n_per_level, pr)
        for c, k in enumerate(counts):
            if k > 0:
                codes.append(c)
                X.append(x)
                w.append(k)
    return Dataset(np.array(codes), np.array(X), np.array(w, dtype=float), spec.labels)
