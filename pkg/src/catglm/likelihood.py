"""Truncated multinomial log-likelihood, score and Fisher information.

The score and information follow the chain-rule decomposition through the
(r, F, Z) components::

    score = sum_i w_i Z_i' D_i P_i C_i^{-1} (y_i - pi_i)
    info  = sum_i w_i Z_i' D_i P_i C_i^{-1} P_i' D_i Z_i

with D the diagonal of densities f(eta_j), P = d(pi)/d(r) and C the
multinomial covariance diag(pi) - pi pi'.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import pdf_eval
from .model import ModelSpec, design_stack, probabilities_from_eta
from .ratios import expand, ratio_jacobian


@dataclass(frozen=True)
class Observation:
    """One response indicator (model order; all zeros is the last category)."""

    y: tuple
    x: tuple = ()
    weight: float = 1.0

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if np.any((y != 0) & (y != 1)) or y.sum() > 1:
            raise ValueError("y must be an indicator vector with at most one 1")
        if not self.weight > 0:
            raise ValueError("weight must be positive")


def natural_parameter(pi) -> np.ndarray:
    """theta_j = ln(pi_j / pi_J)."""
    pi = np.asarray(pi, dtype=float)
    return np.log(pi) - np.log1p(-pi.sum(axis=-1, keepdims=True))


def cumulant(theta) -> np.ndarray:
    """b(theta) = ln(1 + sum exp(theta_j))."""
    theta = np.asarray(theta, dtype=float)
    top = np.maximum(theta.max(axis=-1), 0.0)
    return top + np.log(np.exp(-top) + np.exp(theta - top[..., None]).sum(axis=-1))


def log_likelihood(pi, y):
    """sum_j y_j ln pi_j + (1 - sum_j y_j) ln pi_J, vectorised over leading axes."""
    full = expand(pi)
    y = np.asarray(y, dtype=float)
    yfull = np.concatenate([y, 1.0 - y.sum(axis=-1, keepdims=True)], axis=-1)
    out = np.sum(np.where(yfull > 0, yfull * np.log(full), 0.0), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def exponential_form_log_likelihood(pi, y):
    """The same quantity written as y' theta - b(theta)."""
    theta = natural_parameter(pi)
    out = np.sum(np.asarray(y, dtype=float) * theta, axis=-1) - cumulant(theta)
    return float(out) if np.ndim(out) == 0 else out


def covariance(pi) -> np.ndarray:
    """Multinomial covariance diag(pi) - pi pi' of the truncated indicator."""
    pi = np.asarray(pi, dtype=float)
    return pi[..., :, None] * (np.eye(pi.shape[-1]) - pi[..., None, :])


def _solve_covariance(pi, v):
    """Apply C^{-1} through its Sherman-Morrison form diag(1/pi) + 11'/pi_J.

    ``v`` has shape (n, m) or (n, m, k); the last category probability is
    recomputed from pi.
    """
    last = 1.0 - pi.sum(axis=1)
    if v.ndim == 2:
        return v / pi + (v.sum(axis=1) / last)[:, None]
    return v / pi[:, :, None] + (v.sum(axis=1) / last[:, None])[:, None, :]


@dataclass
class Evaluation:
    """Log-likelihood, score and information at one parameter value."""

    log_lik: float
    score: np.ndarray
    information: np.ndarray
    eta: np.ndarray
    pi: np.ndarray


def evaluate(spec: ModelSpec, beta, Z, Y, w, need_information: bool = True) -> Evaluation:
    """Evaluate the weighted log-likelihood and its derivatives for stacked designs.

    ``Z`` has shape (n, J-1, q), ``Y`` (n, J-1) in model order, ``w`` (n,).
    Raises :class:`ConstraintViolation` when the predictors are inadmissible.
    """
    beta = np.asarray(beta, dtype=float)
    eta = Z @ beta
    p, pi = probabilities_from_eta(spec, eta)
    ll = float(np.dot(w, log_likelihood(pi, Y)))
    dens = pdf_eval(spec.cdf, eta)
    G = dens[:, :, None] * ratio_jacobian(spec.ratio, p, pi)
    resid = _solve_covariance(pi, Y - pi)
    per_eta = np.einsum("nij,nj->ni", G, resid)
    score = np.einsum("niq,ni->q", Z, w[:, None] * per_eta)
    info = None
    if need_information:
        # G C^{-1} G' per observation
        GCG = G @ _solve_covariance(pi, np.swapaxes(G, 1, 2))
        ZtW = np.swapaxes(Z, 1, 2) @ (w[:, None, None] * GCG)
        info = (ZtW @ Z).sum(axis=0)
        info = 0.5 * (info + info.T)
    return Evaluation(ll, score, info, eta, pi)


def score_and_information(spec: ModelSpec, beta, observations) -> tuple[np.ndarray, np.ndarray]:
    """Score vector and Fisher information for a list of :class:`Observation`."""
    X = np.array([o.x for o in observations], dtype=float).reshape(len(observations), spec.p)
    Y = np.array([o.y for o in observations], dtype=float)
    w = np.array([o.weight for o in observations], dtype=float)
    ev = evaluate(spec, beta, design_stack(spec, X), Y, w)
    return ev.score, ev.information


def total_log_likelihood(spec: ModelSpec, beta, observations) -> float:
    X = np.array([o.x for o in observations], dtype=float).reshape(len(observations), spec.p)
    Y = np.array([o.y for o in observations], dtype=float)
    w = np.array([o.weight for o in observations], dtype=float)
    eta = design_stack(spec, X) @ np.asarray(beta, dtype=float)
    _, pi = probabilities_from_eta(spec, eta)
    return float(np.dot(w, log_likelihood(pi, Y)))
