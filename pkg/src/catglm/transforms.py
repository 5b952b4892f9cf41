"""Constructive equalities and equivalences between (r, F, Z) models.

A :class:`TransformPlan` pairs a source model with a target model and the
map carrying source predictors (or parameters) to target ones. Verifying a
plan means evaluating both models on a covariate grid and comparing the
category probabilities.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .design import make_transform
from .distributions import reflect
from .errors import ConstraintViolation, DomainError, HypothesisError, UnsupportedReflectionError
from .model import ModelSpec, category_probabilities, covariate_rows, design_stack, probabilities_from_eta
from .ratios import expand

PLANS = (
    "laara_gumbel",
    "pareto_z0",
    "cum_seq_exponential",
    "ref_adj_logistic",
    "reference_permutation",
    "canonical_transposition",
    "reversal",
    "sequential_last_transposition",
)


@dataclass(frozen=True)
class TransformPlan:
    """Source and target models with the predictor map and parameter map.

    ``eta_matrix`` is set for linear plans (eta' = M eta, same beta).
    ``eta_map`` always maps source predictors (n, J-1) to target predictors.
    ``beta_map`` maps source parameters to target parameters.
    """

    name: str
    source: ModelSpec
    target: ModelSpec
    eta_map: Callable
    beta_map: Callable
    eta_matrix: np.ndarray | None = None

    @property
    def linear(self) -> bool:
        return self.eta_matrix is not None


def permute_model(spec: ModelSpec, sigma) -> ModelSpec:
    """The permuted model (r, F, Z)_sigma: model position k now holds position sigma[k]."""
    sigma = [int(s) for s in sigma]
    if sorted(sigma) != list(range(spec.J)):
        raise ValueError("sigma must be a permutation of range(J)")
    return spec.with_order(spec.order[s] for s in sigma)


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise HypothesisError(message)


def _plain_design(spec: ModelSpec, kinds, label: str) -> None:
    _require(spec.design.kind in kinds and spec.design.left is None, f"{label} requires a {' or '.join(kinds)} design")


def _identity(beta):
    return np.asarray(beta, dtype=float)


def _logcumsumexp(v, axis=-1):
    return np.logaddexp.accumulate(np.asarray(v, dtype=float), axis=axis)


def _linear(name, source, target, M):
    M = np.asarray(M, dtype=float)
    return TransformPlan(name, source, target, lambda eta: eta @ M.T, _identity, M)


def make_plan(name: str, spec: ModelSpec, aux=None) -> TransformPlan:
    """Build the plan ``name`` for the model ``spec``.

    Permutation plans (``reference_permutation``, ``canonical_transposition``,
    ``reversal``, ``sequential_last_transposition``) take ``spec`` as the
    unpermuted model: the source is the permuted model and the target is the
    unpermuted model with a transformed design. ``aux`` is the 0-based
    permutation for ``reference_permutation`` and the 0-based category
    swapped with the reference for ``canonical_transposition``.
    """
    J = spec.J
    cdf = spec.cdf
    if name == "laara_gumbel":
        _require(spec.ratio == "sequential", "Laara equivalence starts from a sequential model")
        _require(cdf.family == "gumbel_min" and cdf.loc == 0 and cdf.scale == 1, "Laara equivalence requires the standard Gumbel min cdf")
        _plain_design(spec, ("proportional",), "Laara equivalence")
        target = replace(spec, ratio="cumulative")

        def beta_map(beta):
            beta = np.array(beta, dtype=float)
            beta[: J - 1] = _logcumsumexp(beta[: J - 1])
            return beta

        return TransformPlan(name, spec, target, _logcumsumexp, beta_map)

    if name == "pareto_z0":
        _require(spec.ratio == "cumulative", "Pareto equivalence starts from a cumulative model")
        _require(cdf.family == "pareto" and cdf.loc == 0 and cdf.scale == 1, "Pareto equivalence requires a standard Pareto cdf")
        _plain_design(spec, ("z0",), "Pareto equivalence")
        target = replace(spec, ratio="sequential")

        def eta_map(eta):
            eta = np.asarray(eta, dtype=float)
            out = eta.copy()
            out[..., 1:] = eta[..., 1:] / eta[..., :-1]
            return out

        def beta_map(beta):
            beta = np.array(beta, dtype=float)
            if J <= 2:
                return beta
            alpha = beta[: J - 1].copy()
            out = beta.copy()
            out[1 : J - 1] = alpha[1:] / alpha[:-1]
            out[J - 1 :] = beta[J - 1 :] / alpha[J - 3]
            return out

        return TransformPlan(name, spec, target, eta_map, beta_map)

    if name == "cum_seq_exponential":
        _require(spec.ratio == "cumulative", "this equality starts from a cumulative model")
        _require(cdf.family == "exponential" and cdf.loc == 0, "this equality requires an exponential cdf with zero location")
        A = make_transform("A", J).matrix
        return _linear(name, spec, replace(spec, ratio="sequential", design=spec.design.premultiply(A)), A)

    if name == "ref_adj_logistic":
        _require(spec.ratio == "reference", "this equality starts from a reference model")
        _require(cdf.family == "logistic" and cdf.loc == 0, "this equality requires a logistic cdf with zero location")
        At = make_transform("A_transpose", J).matrix
        return _linear(name, spec, replace(spec, ratio="adjacent", design=spec.design.premultiply(At)), At)

    if name == "reference_permutation":
        _require(spec.ratio == "reference", "reference permutation invariance needs the reference ratio")
        sigma = list(aux) if aux is not None else list(range(J))
        if len(sigma) == J - 1:
            sigma.append(J - 1)
        _require(sorted(sigma) == list(range(J)) and sigma[-1] == J - 1, "the permutation must fix the reference category")
        P = make_transform("P_sigma", J, sigma).matrix
        return _linear(name, permute_model(spec, sigma), replace(spec, design=spec.design.premultiply(P)), P)

    if name == "canonical_transposition":
        _require(spec.ratio == "reference", "the canonical transposition needs the reference ratio")
        _require(cdf.family == "logistic" and cdf.loc == 0, "the canonical transposition needs a logistic cdf with zero location")
        t = 0 if aux is None else int(aux)
        _require(0 <= t < J - 1, "the transposed category must differ from the reference")
        tau = list(range(J))
        tau[t], tau[J - 1] = J - 1, t
        B = make_transform("B_tau", J, t).matrix
        return _linear(name, permute_model(spec, tau), replace(spec, design=spec.design.premultiply(B)), B)

    if name == "reversal":
        _require(spec.ratio in ("adjacent", "cumulative"), "reversal holds for adjacent and cumulative ratios only")
        try:
            reflected = reflect(cdf)
        except UnsupportedReflectionError as exc:
            raise HypothesisError(f"reversal needs a reflectable cdf: {exc}") from exc
        M = -make_transform("P_reverse", J).matrix
        source = permute_model(spec, list(range(J))[::-1])
        return _linear(name, source, replace(spec, cdf=reflected, design=spec.design.premultiply(M)), M)

    if name == "sequential_last_transposition":
        _require(spec.ratio == "sequential", "this invariance needs the sequential ratio")
        _require(cdf.symmetric and cdf.loc == 0, "this invariance needs a cdf symmetric about zero")
        tau = list(range(J))
        tau[-2], tau[-1] = tau[-1], tau[-2]
        M = make_transform("A_tilde_tau", J).matrix
        return _linear(name, permute_model(spec, tau), replace(spec, design=spec.design.premultiply(M)), M)

    raise ValueError(f"unknown plan {name!r}; expected one of {PLANS}")


@dataclass
class EqualityReport:
    max_deviation: float
    eta_deviation: float
    undefined_points: list[int]


def verify_pointwise_equality(plan: TransformPlan, beta, x_grid) -> EqualityReport:
    """Largest |pi_source - pi_target| over the grid and all J categories.

    The target is evaluated at ``beta_map(beta)``; ``eta_deviation`` compares
    against the target evaluated directly at ``eta_map(eta_source)``. Grid
    points where either model is undefined are listed and skipped.
    """
    src, tgt = plan.source, plan.target
    X = covariate_rows(x_grid, src.p)
    beta = np.asarray(beta, dtype=float)
    beta_t = plan.beta_map(beta)
    worst, worst_eta, undefined = 0.0, 0.0, []
    for i, x in enumerate(X):
        x = x[None, :]
        try:
            ps = category_probabilities(src, beta, x)
            pt = category_probabilities(tgt, beta_t, x)
            eta_t = plan.eta_map(design_stack(src, x) @ beta)
            in_model = expand(probabilities_from_eta(tgt, eta_t)[1])
        except (ConstraintViolation, DomainError):
            undefined.append(i)
            continue
        pe = np.empty_like(in_model)
        pe[:, list(tgt.order)] = in_model
        worst = max(worst, float(np.max(np.abs(ps - pt))))
        worst_eta = max(worst_eta, float(np.max(np.abs(ps - pe))))
    return EqualityReport(worst, worst_eta, undefined)


def sample_feasible_beta(spec: ModelSpec, X, rng: np.random.Generator, slope_scale: float = 1.0) -> np.ndarray:
    """Random parameters admissible for ``spec`` at every row of ``X``.

    Unconstrained models draw intercepts from N(0, 1) and slopes from
    N(0, slope_scale^2 / 4). Cumulative models get strictly increasing
    intercepts and supports bounded below (exponential, Pareto) get
    intercepts above the bound; slopes are then shrunk until the slope
    contribution stays within a third of the smallest intercept gap on X.
    """
    J, q = spec.J, spec.n_params
    beta = np.zeros(q)
    beta[J - 1 :] = rng.normal(0.0, 0.5 * slope_scale, q - (J - 1))
    lower = spec.cdf.support[0]
    ordered = spec.ratio == "cumulative"
    if not ordered and not np.isfinite(lower):
        beta[: J - 1] = rng.normal(0.0, 1.0, J - 1)
        return beta
    start = (lower if np.isfinite(lower) else -1.5) + rng.uniform(0.5, 1.0)
    if ordered:
        alpha = start + np.concatenate([[0.0], np.cumsum(rng.uniform(0.5, 1.2, J - 2))])
    else:
        alpha = start + rng.uniform(0.0, 1.0, J - 1)
    # alpha is the predictor at x = 0, so undo any left factor on the intercept block
    Z = design_stack(spec, X)
    Z0 = design_stack(spec, np.zeros((1, spec.p)))[0]
    beta[: J - 1] = np.linalg.solve(Z0[:, : J - 1], alpha)
    gaps = [alpha[0] - lower] if np.isfinite(lower) else []
    if ordered and J > 2:
        gaps.append(np.min(np.diff(alpha)))
    margin = min(gaps) / 3.0
    slope_part = Z[:, :, J - 1 :] @ beta[J - 1 :]
    biggest = np.max(np.abs(slope_part)) if slope_part.size else 0.0
    if biggest > margin:
        beta[J - 1 :] *= margin / biggest
    return beta


# source model used by each plan when none is given
DEFAULT_SOURCES = {
    "laara_gumbel": ("sequential", "gumbelmin", "proportional"),
    "pareto_z0": ("cumulative", "pareto:2", "z0"),
    "cum_seq_exponential": ("cumulative", "exponential", "proportional"),
    "ref_adj_logistic": ("reference", "logistic", "complete"),
    "reference_permutation": ("reference", "cauchy", "complete"),
    "canonical_transposition": ("reference", "logistic", "complete"),
    "reversal": ("cumulative", "normal", "proportional"),
    "sequential_last_transposition": ("sequential", "normal", "complete"),
}


def default_plan_spec(name: str, J: int, p: int = 1) -> ModelSpec:
    from .model import make_spec

    if name not in DEFAULT_SOURCES:
        raise ValueError(f"unknown plan {name!r}; expected one of {PLANS}")
    ratio, cdf, design = DEFAULT_SOURCES[name]
    return make_spec(ratio, cdf, design, J, p)


def run_equality_trials(
    name: str,
    J: int,
    trials: int,
    rng: np.random.Generator,
    spec: ModelSpec | None = None,
    n_points: int = 50,
) -> list[EqualityReport]:
    """Verify plan ``name`` at ``trials`` random admissible parameters.

    Each trial draws a covariate grid from N(0, 1), a random auxiliary
    permutation (or transposed index) where the plan takes one, and a
    parameter vector admissible on the grid.
    """
    spec = spec or default_plan_spec(name, J)
    reports = []
    for _ in range(trials):
        aux = None
        if name == "reference_permutation":
            aux = list(rng.permutation(J - 1)) + [J - 1]
        elif name == "canonical_transposition":
            aux = int(rng.integers(J - 1))
        plan = make_plan(name, spec, aux)
        X = rng.normal(size=(n_points, spec.p))
        beta = sample_feasible_beta(plan.source, X, rng)
        reports.append(verify_pointwise_equality(plan, beta, X))
    return reports
