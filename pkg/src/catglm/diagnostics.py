"""Finite-difference checks of the ratio Jacobians and of the score."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset, simulate
from .errors import CatGLMError, NumericalFailure
from .likelihood import evaluate
from .model import ModelSpec, design_stack, indicator_matrix, make_spec
from .ratios import KINDS, ratio_invert, ratio_jacobian
from .transforms import sample_feasible_beta

JACOBIAN_TOL = 1e-6
SCORE_RTOL = 1e-5


@dataclass
class CheckResult:
    suite: str
    case: str
    max_error: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tolerance)


def sample_ratios(kind: str, J: int, rng: np.random.Generator, size: int, low: float = 0.05, high: float = 0.95) -> np.ndarray:
    """Valid ratio vectors drawn away from the boundary; sorted for cumulative."""
    r = rng.uniform(low, high, (size, J - 1))
    if kind == "cumulative":
        r.sort(axis=1)
    return r


def numeric_jacobian(kind: str, r: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central differences of ratio_invert; entry [i, j] = d pi_j / d r_i."""
    m = r.shape[-1]
    out = np.empty(r.shape[:-1] + (m, m))
    for i in range(m):
        step = np.zeros(m)
        step[i] = h
        out[..., i, :] = (ratio_invert(kind, r + step) - ratio_invert(kind, r - step)) / (2 * h)
    return out


def jacobian_check(kind: str, J: int, trials: int = 200, rng: np.random.Generator | None = None) -> CheckResult:
    rng = rng or np.random.default_rng(0)
    r = sample_ratios(kind, J, rng, trials)
    err = float(np.max(np.abs(ratio_jacobian(kind, r) - numeric_jacobian(kind, r))))
    return CheckResult("jacobian", f"{kind}, J={J}", err, JACOBIAN_TOL)


def numeric_score(spec: ModelSpec, beta, Z, Y, w, h: float = 1e-5) -> np.ndarray:
    beta = np.asarray(beta, dtype=float)
    out = np.empty_like(beta)
    for k in range(len(beta)):
        e = np.zeros_like(beta)
        e[k] = h
        out[k] = (evaluate(spec, beta + e, Z, Y, w, False).log_lik - evaluate(spec, beta - e, Z, Y, w, False).log_lik) / (2 * h)
    return out


def score_check(spec: ModelSpec, data: Dataset, beta) -> CheckResult:
    """Relative error max|analytic - numeric| / max(1, max|numeric|)."""
    Z = design_stack(spec, data.X)
    Y = indicator_matrix(spec, data.codes)
    analytic = evaluate(spec, beta, Z, Y, data.weights).score
    numeric = numeric_score(spec, beta, Z, Y, data.weights)
    err = float(np.max(np.abs(analytic - numeric)) / max(1.0, np.max(np.abs(numeric))))
    return CheckResult("score", str(spec), err, SCORE_RTOL)


def _draw(spec: ModelSpec, X, rng, attempts: int = 20):
    # light-tailed cdfs can push pi_J below double precision; redraw those
    for _ in range(attempts):
        beta = sample_feasible_beta(spec, X, rng, slope_scale=0.5)
        try:
            return beta, simulate(spec, beta, X, rng)
        except CatGLMError:
            continue
    raise NumericalFailure(f"{spec}: no numerically representable parameter draw")


def run_jacobian_suite(J_values=range(2, 9), trials: int = 200, seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [jacobian_check(kind, J, trials, rng) for kind in KINDS for J in J_values]


def run_score_suite(
    cdfs=("logistic", "normal", "gumbelmin", "student:3"),
    designs=("complete", "proportional"),
    J_values=(3, 4),
    n: int = 200,
    seed: int = 0,
) -> list[CheckResult]:
    """Score check on a synthetic dataset for every ratio x cdf x design x J."""
    rng = np.random.default_rng(seed)
    out = []
    for J in J_values:
        X = rng.normal(size=(n, 2))
        for kind in KINDS:
            for cdf in cdfs:
                for design in designs:
                    spec = make_spec(kind, cdf, design, J, 2)
                    beta, data = _draw(spec, X, rng)
                    out.append(score_check(spec, data, beta))
    return out
