"""Fisher-scoring maximum likelihood for any (r, F, Z) triplet."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from .data import Dataset
from .distributions import quantile
from .errors import (
    ConstraintViolation,
    ConvergenceWarning,
    DomainError,
    ModelUndefinedError,
    NumericalFailure,
    SingularInformationError,
)
from .likelihood import evaluate
from .model import ModelSpec, category_probabilities, covariate_rows, design_stack, indicator_matrix, probabilities_from_eta
from .ratios import expand, ratio_apply

# smallest marginal frequency used when initialising the intercepts
_MIN_FREQ = 1e-3
_REL_LL_TOL = 1e-10


@dataclass(frozen=True)
class Controls:
    max_iter: int = 100
    tol: float = 1e-8
    ridge: float = 0.0
    max_halvings: int = 30


@dataclass
class FittedModel:
    spec: ModelSpec
    beta: np.ndarray
    log_lik: float
    iterations: int
    converged: bool
    aic: float
    bic: float
    fisher_information: np.ndarray
    n_effective: float
    score_norm: float
    history: list[float] = field(default_factory=list, repr=False)

    def standard_errors(self, rtol: float = 1e-10) -> tuple[np.ndarray, np.ndarray]:
        """Standard errors from the inverse information and a mask of identifiable directions.

        Directions with eigenvalues below ``rtol * max`` are treated as
        non-identifiable; their standard errors are reported as ``inf``.
        """
        vals, vecs = np.linalg.eigh(self.fisher_information)
        keep = vals > rtol * max(vals.max(), 0.0)
        inv = (vecs[:, keep] / vals[keep]) @ vecs[:, keep].T
        se = np.sqrt(np.clip(np.diag(inv), 0.0, None))
        loose = np.abs(vecs[:, ~keep]).max(axis=1) > 1e-8 if (~keep).any() else np.zeros(len(vals), bool)
        se[loose] = np.inf
        return se, ~loose


def initial_beta(spec: ModelSpec, data: Dataset, Z: np.ndarray) -> np.ndarray:
    """Intercepts from the ratio-transformed marginal frequencies; slopes at zero.

    For designs without a plain identity intercept block the constant target
    predictor is matched by least squares.
    """
    freq = data.counts()[list(spec.order)] / data.n_effective
    freq = np.maximum(freq, _MIN_FREQ)
    freq /= freq.sum()
    target = quantile(spec.cdf, ratio_apply(spec.ratio, freq[:-1]))
    if spec.design.left is None:
        beta = np.zeros(spec.n_params)
        beta[: spec.J - 1] = target
        return beta
    A = Z.reshape(-1, Z.shape[2])
    rhs = np.tile(target, Z.shape[0])
    return np.linalg.lstsq(A, rhs, rcond=None)[0]


def _solve(info: np.ndarray, score: np.ndarray, ridge: float) -> np.ndarray:
    attempts = [ridge] if ridge > 0 else [0.0, 1e-8 * max(np.trace(info), 1e-300)]
    for r in attempts:
        try:
            factor = linalg.cho_factor(info + r * np.eye(len(info)), check_finite=True)
            step = linalg.cho_solve(factor, score)
            if np.all(np.isfinite(step)):
                return step
        except (linalg.LinAlgError, ValueError):
            continue
    raise SingularInformationError(
        "Fisher information is singular; pass a positive ridge or check the design for redundant columns"
    )


def fisher_scoring(spec: ModelSpec, data: Dataset, controls: Controls | None = None, beta0=None) -> FittedModel:
    """Maximise the log-likelihood of ``spec`` on ``data``.

    Each iteration solves I(beta) step = score(beta) and halves the step
    (at most ``max_halvings`` times) while the log-likelihood decreases, the
    predictors leave the admissible set, or values become non-finite.
    Convergence needs both a relative log-likelihood change below 1e-10 and
    a max-abs score below ``tol * n``.
    """
    controls = controls or Controls()
    if data.n == 0:
        raise ValueError("empty dataset")
    if data.J != spec.J or data.p != spec.p:
        raise ValueError(f"spec expects J={spec.J}, p={spec.p}; data has J={data.J}, p={data.p}")
    Z = design_stack(spec, data.X)
    Y = indicator_matrix(spec, data.codes)
    w = data.weights
    n_eff = data.n_effective
    score_tol = controls.tol * n_eff

    beta = np.asarray(beta0, dtype=float) if beta0 is not None else initial_beta(spec, data, Z)
    try:
        current = evaluate(spec, beta, Z, Y, w)
    except (ConstraintViolation, DomainError) as exc:
        raise ModelUndefinedError(f"{spec}: starting values infeasible (support infeasible): {exc}") from exc
    history = [current.log_lik]
    converged = False
    rel_change = math.inf
    it = 0
    for it in range(1, controls.max_iter + 1):
        score_norm = float(np.max(np.abs(current.score)))
        if score_norm <= score_tol and rel_change <= _REL_LL_TOL:
            converged = True
            break
        step = _solve(current.information, current.score, controls.ridge)
        t = 1.0
        accepted = None
        reason = None
        for _ in range(controls.max_halvings + 1):
            cand = beta + t * step
            try:
                ev = evaluate(spec, cand, Z, Y, w)
                if not (np.isfinite(ev.log_lik) and np.all(np.isfinite(ev.score))):
                    raise NumericalFailure("non-finite log-likelihood")
                if ev.log_lik >= current.log_lik:
                    accepted = ev
                    break
                reason = "decrease"
            except (ConstraintViolation, DomainError):
                reason = "constraint"
            except (NumericalFailure, FloatingPointError):
                reason = "numerical"
            t *= 0.5
        if accepted is None:
            if reason == "constraint" and score_norm > score_tol:
                raise ModelUndefinedError(
                    f"{spec}: model undefined on data, no admissible step after "
                    f"{controls.max_halvings} halvings (log-likelihood diverges)"
                )
            # no ascent direction left at working precision
            converged = score_norm <= score_tol
            break
        rel_change = abs(accepted.log_lik - current.log_lik) / max(abs(current.log_lik), 1.0)
        beta = beta + t * step
        current = accepted
        history.append(current.log_lik)
    else:
        score_norm = float(np.max(np.abs(current.score)))
        converged = score_norm <= score_tol and rel_change <= _REL_LL_TOL

    score_norm = float(np.max(np.abs(current.score)))
    if not converged:
        warnings.warn(
            f"{spec}: Fisher scoring did not converge after {it} iterations (max |score| = {score_norm:.3g})",
            ConvergenceWarning,
            stacklevel=2,
        )
    k = len(beta)
    return FittedModel(
        spec=spec,
        beta=beta,
        log_lik=current.log_lik,
        iterations=len(history) - 1,
        converged=converged,
        aic=-2.0 * current.log_lik + 2.0 * k,
        bic=-2.0 * current.log_lik + math.log(n_eff) * k,
        fisher_information=current.information,
        n_effective=n_eff,
        score_norm=score_norm,
        history=history,
    )


def predict_probabilities(fitted: FittedModel, x, full: bool = False) -> np.ndarray:
    """Truncated probability vector (model order) at one covariate vector.

    With ``full=True`` the J-vector including the last category is returned.
    Raises :class:`ModelUndefinedError` when the predictors are inadmissible at x.
    """
    spec = fitted.spec
    x = covariate_rows(x, spec.p)[:1]
    eta = design_stack(spec, x) @ fitted.beta
    try:
        _, pi = probabilities_from_eta(spec, eta)
    except (ConstraintViolation, DomainError) as exc:
        raise ModelUndefinedError(f"prediction undefined at x={x.ravel().tolist()}: {exc}") from exc
    return expand(pi)[0] if full else pi[0]


def predict_proba(fitted: FittedModel, X) -> np.ndarray:
    """Probabilities in dataset category order, shape (n, J)."""
    spec = fitted.spec
    X = covariate_rows(X, spec.p)
    try:
        return category_probabilities(spec, fitted.beta, X)
    except (ConstraintViolation, DomainError) as exc:
        raise ModelUndefinedError(f"prediction undefined: {exc}") from exc


def classify(fitted: FittedModel, X) -> np.ndarray:
    """Category codes (dataset order) maximising the predicted probability.

    Ties go to the smallest category index.
    """
    return np.argmax(predict_proba(fitted, X), axis=1)


def classify_labels(fitted: FittedModel, X) -> list[str]:
    return [fitted.spec.labels[k] for k in classify(fitted, X)]
