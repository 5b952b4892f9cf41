"""The (r, F, Z) model specification and the x -> eta -> p -> pi pipeline."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .design import DesignKind, build_design_batch, parse_design
from .distributions import CdfSpec, clipped_cdf, parse_cdf
from .errors import ConstraintViolation, NumericalFailure
from .ratios import check_kind, expand, ratio_invert


@dataclass(frozen=True)
class ModelSpec:
    """An (r, F, Z) triplet for J categories and p covariates.

    ``order`` is the category permutation sigma, 0-based: model position k
    holds dataset category ``order[k]``, so the last entry is the reference /
    final category of the model. ``labels`` are in dataset order.
    """

    ratio: str
    cdf: CdfSpec
    design: DesignKind
    J: int
    p: int = 0
    labels: tuple[str, ...] = ()
    order: tuple[int, ...] = ()

    def __post_init__(self):
        check_kind(self.ratio)
        if self.J < 2:
            raise ValueError("need at least two categories")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(j + 1) for j in range(self.J)))
        if not self.order:
            object.__setattr__(self, "order", tuple(range(self.J)))
        if len(self.labels) != self.J or len(set(self.labels)) != self.J:
            raise ValueError("labels must be J distinct names")
        if sorted(self.order) != list(range(self.J)):
            raise ValueError("order must be a permutation of range(J)")

    @property
    def n_params(self) -> int:
        return self.design.n_params(self.J, self.p)

    @property
    def ordered_labels(self) -> tuple[str, ...]:
        return tuple(self.labels[k] for k in self.order)

    @property
    def is_permuted(self) -> bool:
        return self.order != tuple(range(self.J))

    def with_order(self, order) -> "ModelSpec":
        return replace(self, order=tuple(int(k) for k in order))

    def __str__(self) -> str:
        text = f"({self.ratio}, {self.cdf.name}, {self.design.name})"
        if self.is_permuted:
            text += "_[" + ",".join(self.ordered_labels) + "]"
        return text


def make_spec(ratio: str, cdf, design, J: int, p: int = 0, labels=None, order=None) -> ModelSpec:
    """Build a :class:`ModelSpec` from config strings or objects."""
    return ModelSpec(
        ratio=ratio,
        cdf=parse_cdf(cdf),
        design=parse_design(design),
        J=int(J),
        p=int(p),
        labels=tuple(str(l) for l in labels) if labels is not None else (),
        order=tuple(int(k) for k in order) if order is not None else (),
    )


def covariate_rows(X, p: int) -> np.ndarray:
    """Covariates as an (n, p) array; a single vector becomes one row."""
    X = np.asarray(X, dtype=float)
    if p == 0:
        return np.zeros((len(X) if X.ndim == 2 else 1, 0))
    return X.reshape(-1, p)


def design_stack(spec: ModelSpec, X) -> np.ndarray:
    return build_design_batch(spec.design, covariate_rows(X, spec.p), spec.J)


def check_predictors(spec: ModelSpec, eta: np.ndarray) -> None:
    """Raise :class:`ConstraintViolation` where eta leaves the admissible set."""
    lower = spec.cdf.support[0]
    bad = np.zeros(eta.shape[0], dtype=bool)
    reasons = []
    if np.isfinite(lower):
        out = np.any(eta <= lower, axis=1)
        if out.any():
            reasons.append(f"predictor outside the {spec.cdf.family} support (> {lower:g})")
        bad |= out
    if spec.ratio == "cumulative" and spec.J > 2:
        unordered = np.any(np.diff(eta, axis=1) <= 0, axis=1)
        if unordered.any():
            reasons.append("cumulative predictors not strictly increasing")
        bad |= unordered
    if bad.any():
        raise ConstraintViolation("; ".join(reasons), np.flatnonzero(bad))


def probabilities_from_eta(spec: ModelSpec, eta: np.ndarray):
    """Return (p, pi) for predictors of shape (n, J-1); pi is truncated, model order."""
    check_predictors(spec, eta)
    p = clipped_cdf(spec.cdf, eta)
    pi = ratio_invert(spec.ratio, p)
    if not np.all(np.isfinite(pi)):
        raise NumericalFailure("non-finite probabilities")
    full = expand(pi)
    degenerate = np.any(full <= 0, axis=1)
    if degenerate.any():
        raise ConstraintViolation("degenerate probabilities", np.flatnonzero(degenerate))
    return p, pi


def model_probabilities(spec: ModelSpec, beta, X) -> np.ndarray:
    """Full length-J probabilities in model order, shape (n, J)."""
    Z = design_stack(spec, X)
    eta = Z @ np.asarray(beta, dtype=float)
    return expand(probabilities_from_eta(spec, eta)[1])


def category_probabilities(spec: ModelSpec, beta, X) -> np.ndarray:
    """Full probabilities mapped back to dataset category order, shape (n, J)."""
    in_model = model_probabilities(spec, beta, X)
    out = np.empty_like(in_model)
    out[:, list(spec.order)] = in_model
    return out


def indicator_matrix(spec: ModelSpec, codes) -> np.ndarray:
    """Truncated indicators (n, J-1) in model order for dataset category codes."""
    codes = np.asarray(codes, dtype=int)
    position = np.empty(spec.J, dtype=int)
    position[list(spec.order)] = np.arange(spec.J)
    pos = position[codes]
    Y = np.zeros((codes.size, spec.J - 1))
    rows = np.flatnonzero(pos < spec.J - 1)
    Y[rows, pos[rows]] = 1.0
    return Y
