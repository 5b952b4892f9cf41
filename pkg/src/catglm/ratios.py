"""The four probability ratios r: M -> P, their inverses and Jacobians d(pi)/d(r).

All functions operate on the last axis, so a batch of shape ``(n, J-1)`` is
handled in one call. ``pi`` is always the truncated vector (pi_1..pi_{J-1}).
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidRatioError

KINDS = ("reference", "adjacent", "cumulative", "sequential")


def check_kind(kind: str) -> str:
    if kind not in KINDS:
        raise ValueError(f"unknown ratio {kind!r}; expected one of {KINDS}")
    return kind


def validate_probabilities(pi) -> np.ndarray:
    """Check pi_j > 0 and sum < 1 on every row; return pi as an array."""
    pi = np.asarray(pi, dtype=float)
    if np.any(pi <= 0) or np.any(pi.sum(axis=-1) >= 1):
        raise ValueError("probability vector needs pi_j > 0 and sum(pi) < 1")
    return pi


def expand(pi) -> np.ndarray:
    """Append pi_J = 1 - sum(pi) to the truncated vector."""
    pi = np.asarray(pi, dtype=float)
    last = 1.0 - pi.sum(axis=-1, keepdims=True)
    return np.concatenate([pi, last], axis=-1)


def ratio_apply(kind: str, pi) -> np.ndarray:
    """Map truncated probabilities to ratio space."""
    full = expand(pi)
    if kind == "reference":
        return full[..., :-1] / (full[..., :-1] + full[..., -1:])
    if kind == "adjacent":
        return full[..., :-1] / (full[..., :-1] + full[..., 1:])
    if kind == "cumulative":
        return np.cumsum(full[..., :-1], axis=-1)
    if kind == "sequential":
        # pi_j + ... + pi_J, computed from the tail to avoid cancellation
        tail = np.cumsum(full[..., ::-1], axis=-1)[..., ::-1]
        return full[..., :-1] / tail[..., :-1]
    check_kind(kind)


def ratio_invert(kind: str, p) -> np.ndarray:
    """Recover truncated probabilities from ratio values in (0, 1)."""
    p = np.asarray(p, dtype=float)
    if kind == "reference":
        odds = p / (1.0 - p)
        last = 1.0 / (1.0 + odds.sum(axis=-1, keepdims=True))
        return odds * last
    if kind == "adjacent":
        log_odds = np.log(p) - np.log1p(-p)
        # log prod_{k=j}^{J-1} r_k / (1 - r_k)
        tail = np.cumsum(log_odds[..., ::-1], axis=-1)[..., ::-1]
        shift = np.maximum(tail.max(axis=-1, keepdims=True), 0.0)
        scaled = np.exp(tail - shift)
        return scaled / (np.exp(-shift) + scaled.sum(axis=-1, keepdims=True))
    if kind == "cumulative":
        diffs = np.diff(p, axis=-1, prepend=0.0)
        bad = np.any(diffs[..., 1:] <= 0, axis=-1)
        if np.any(bad):
            rows = np.flatnonzero(np.atleast_1d(bad))
            raise InvalidRatioError("cumulative ratios must be strictly increasing", rows)
        return diffs
    if kind == "sequential":
        survive = np.cumprod(1.0 - p, axis=-1)
        before = np.concatenate([np.ones_like(p[..., :1]), survive[..., :-1]], axis=-1)
        return p * before
    check_kind(kind)


def ratio_jacobian(kind: str, p, pi=None) -> np.ndarray:
    """Closed-form Jacobian with entry ``[..., i, j] = d pi_j / d r_i``.

    ``p`` holds the ratio values F(eta). ``pi`` may be passed when already
    computed from ``p``; otherwise it is recovered with :func:`ratio_invert`.
    """
    p = np.asarray(p, dtype=float)
    m = p.shape[-1]
    if kind == "cumulative":
        jac = np.eye(m) - np.eye(m, k=1)
        return np.broadcast_to(jac, p.shape[:-1] + (m, m)).copy()
    if pi is None:
        pi = ratio_invert(kind, p)
    scale = 1.0 / (p * (1.0 - p))
    if kind == "reference":
        cov = pi[..., :, None] * (np.eye(m) - pi[..., None, :])
        return scale[..., :, None] * cov
    if kind == "adjacent":
        gamma = np.cumsum(pi, axis=-1)
        rows = np.arange(m)[:, None]
        cols = np.arange(m)[None, :]
        upper = rows >= cols
        body = np.where(upper, 1.0 - gamma[..., :, None], -gamma[..., :, None]) * pi[..., None, :]
        return scale[..., :, None] * body
    if kind == "sequential":
        one_minus = 1.0 - p
        jac = np.zeros(p.shape[:-1] + (m, m))
        for j in range(m):
            jac[..., j, j] = np.prod(one_minus[..., :j], axis=-1)
            for i in range(j):
                others = np.delete(one_minus[..., :j], i, axis=-1)
                jac[..., i, j] = -p[..., j] * np.prod(others, axis=-1)
        return jac
    check_kind(kind)
