"""Design matrices Z(x) and the constant matrices used by equality propositions.

Parameter layout is shared by every module: the J-1 intercepts come first,
followed by the slope columns (one block per category for the complete
design, a single shared block for the proportional design).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

DESIGN_KINDS = ("complete", "proportional", "z0", "minimal", "custom")
TRANSFORM_NAMES = ("A", "A_transpose", "A_inverse", "P_sigma", "P_reverse", "B_tau", "A_tilde_tau", "identity")


@dataclass(frozen=True)
class DesignKind:
    """A design family plus an optional constant left factor M (Z -> M Z).

    ``covariates`` is only used by custom designs: one entry per covariate,
    ``(mode, rows)`` with mode in {"p", "c", "0"} (shared slope, one slope per
    row, excluded) and ``rows`` the 0-based rows where the covariate enters
    (``None`` for all rows).
    """

    kind: str = "complete"
    covariates: tuple = ()
    left: tuple | None = None

    def __post_init__(self):
        if self.kind not in DESIGN_KINDS:
            raise ValueError(f"unknown design {self.kind!r}")
        if self.kind == "custom":
            for mode, _ in self.covariates:
                if mode not in ("p", "c", "0"):
                    raise ValueError(f"custom design mode must be p, c or 0, got {mode!r}")

    @property
    def left_matrix(self) -> np.ndarray | None:
        return None if self.left is None else np.array(self.left, dtype=float)

    def premultiply(self, matrix) -> "DesignKind":
        """Return the design M Z (composing with any existing left factor)."""
        matrix = np.asarray(matrix, dtype=float)
        if self.left is not None:
            matrix = matrix @ self.left_matrix
        return replace(self, left=tuple(tuple(float(v) for v in row) for row in matrix))

    def n_params(self, J: int, p: int) -> int:
        m = J - 1
        if self.kind == "complete":
            return m * (1 + p)
        if self.kind in ("proportional", "z0"):
            return m + p
        if self.kind == "minimal":
            return m
        total = m
        for mode, rows in self._custom_modes(J, p):
            if mode == "p":
                total += 1
            elif mode == "c":
                total += len(rows)
        return total

    def _custom_modes(self, J, p):
        modes = list(self.covariates) + [("0", None)] * (p - len(self.covariates))
        if len(modes) != p:
            raise ValueError(f"custom design describes {len(self.covariates)} covariates, data has {p}")
        return [(mode, tuple(range(J - 1)) if rows is None else tuple(rows)) for mode, rows in modes]

    @property
    def name(self) -> str:
        base = self.kind
        if self.kind == "custom":
            tokens = []
            for mode, rows in self.covariates:
                tok = mode
                if rows is not None:
                    tok += "@" + "+".join(str(r + 1) for r in rows)
                tokens.append(tok)
            base = "custom:" + ",".join(tokens)
        return base if self.left is None else base + "*M"


def parse_design(text: str | DesignKind) -> DesignKind:
    """Parse ``complete``, ``proportional``, ``z0``, ``minimal`` or ``custom:<mask-spec>``.

    The mask spec has one comma-separated token per covariate: ``p`` (shared
    slope), ``c`` (category-specific slopes) or ``0`` (excluded), optionally
    followed by ``@`` and a ``+``-separated list of 1-based rows, e.g.
    ``custom:p,c@2+3``.
    """
    if isinstance(text, DesignKind):
        return text
    name, _, spec = text.strip().partition(":")
    if name != "custom":
        if spec:
            raise ValueError(f"design {name!r} takes no argument")
        return DesignKind(name)
    covs = []
    for tok in filter(None, (t.strip() for t in spec.split(","))):
        mode, _, rows = tok.partition("@")
        covs.append((mode, tuple(int(r) - 1 for r in rows.split("+")) if rows else None))
    return DesignKind("custom", covariates=tuple(covs))


def build_design_batch(design: DesignKind, X, J: int) -> np.ndarray:
    """Stack Z(x_i) for every row of ``X``: shape ``(n, J-1, n_params)``."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None] if X.size else np.zeros((0, 0))
    n, p = X.shape
    m = J - 1
    blocks = [np.broadcast_to(np.eye(m), (n, m, m))]
    kind = design.kind
    if kind == "complete":
        slopes = np.zeros((n, m, m * p))
        for j in range(m):
            slopes[:, j, j * p:(j + 1) * p] = X
        blocks.append(slopes)
    elif kind == "proportional":
        blocks.append(np.broadcast_to(X[:, None, :], (n, m, p)))
    elif kind == "z0":
        slopes = np.zeros((n, m, p))
        slopes[:, m - 1, :] = X
        blocks.append(slopes)
    elif kind == "custom":
        modes = design._custom_modes(J, p)
        indep = []
        for j in range(m):
            for c, (mode, rows) in enumerate(modes):
                if mode == "c" and j in rows:
                    col = np.zeros((n, m, 1))
                    col[:, j, 0] = X[:, c]
                    indep.append(col)
        shared = []
        for c, (mode, rows) in enumerate(modes):
            if mode == "p":
                col = np.zeros((n, m, 1))
                col[:, list(rows), 0] = X[:, c:c + 1]
                shared.append(col)
        blocks.extend(indep + shared)
    Z = np.concatenate(blocks, axis=2) if len(blocks) > 1 else np.array(blocks[0])
    if design.left is not None:
        Z = np.einsum("ab,nbq->naq", design.left_matrix, Z)
    return Z


def build_design(design: DesignKind | str, x, J: int) -> np.ndarray:
    """Design matrix Z(x) of shape ``(J-1, n_params)`` for one covariate vector."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return build_design_batch(parse_design(design), x[None, :], J)[0]


@dataclass(frozen=True)
class TransformMatrix:
    name: str
    matrix: np.ndarray = field(compare=False)

    def __eq__(self, other):
        return (
            isinstance(other, TransformMatrix)
            and self.name == other.name
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self):
        return hash((self.name, self.matrix.tobytes()))


def make_transform(name: str, J: int, aux=None) -> TransformMatrix:
    """Integer matrices of dimension J-1 used by the equality propositions.

    ``aux`` is the 0-based permutation of all J categories fixing the last
    one for ``P_sigma``, and the 0-based category swapped with the reference
    for ``B_tau``.
    """
    m = J - 1
    eye = np.eye(m, dtype=int)
    if name == "identity":
        M = eye
    elif name == "A":
        M = eye - np.eye(m, k=-1, dtype=int)
    elif name == "A_transpose":
        M = (eye - np.eye(m, k=-1, dtype=int)).T
    elif name == "A_inverse":
        M = np.tril(np.ones((m, m), dtype=int))
    elif name == "P_reverse":
        M = eye[::-1].copy()
    elif name == "A_tilde_tau":
        M = eye.copy()
        M[-1, -1] = -1
    elif name == "P_sigma":
        if aux is None:
            raise ValueError("P_sigma needs a permutation")
        sigma = [int(s) for s in aux]
        if len(sigma) == m:
            sigma = sigma + [m]
        if sorted(sigma) != list(range(J)) or sigma[-1] != m:
            raise ValueError("P_sigma needs a permutation of the J categories fixing the last one")
        M = np.zeros((m, m), dtype=int)
        for j in range(m):
            M[sigma[j], j] = 1
    elif name == "B_tau":
        if aux is None or not 0 <= int(aux) < m:
            raise ValueError(f"B_tau needs a category index in [0, {m - 1}]")
        M = eye.copy()
        M[:, int(aux)] = -1
    else:
        raise ValueError(f"unknown transform {name!r}; expected one of {TRANSFORM_NAMES}")
    return TransformMatrix(name, M)


def _as_callable(Z, J: int) -> Callable:
    if callable(Z):
        return Z
    design = parse_design(Z)
    return lambda x: build_design(design, x, J)


def design_equivalent(Z1, Z2, J: int, p: int, n_points: int | None = None, seed: int = 0) -> bool:
    """True when both designs span the same set of predictor maps x -> Z(x) beta.

    Designs are given as :class:`DesignKind` / config strings or callables
    ``x -> matrix``. Each is evaluated at random covariate values and stacked;
    the designs are equivalent when both stacks and their concatenation have
    the same numerical rank (singular values below ``1e-9 * s_max`` are zero).
    """
    n_points = n_points or (p + J + 3)
    rng = np.random.default_rng(seed)
    xs = rng.normal(size=(n_points, p))
    f1, f2 = _as_callable(Z1, J), _as_callable(Z2, J)
    S1 = np.vstack([f1(x) for x in xs])
    S2 = np.vstack([f2(x) for x in xs])
    r1, r2 = _rank(S1), _rank(S2)
    return r1 == r2 == _rank(np.hstack([S1, S2]))


def _rank(M: np.ndarray, rtol: float = 1e-9) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0


@dataclass(frozen=True)
class CovariateDomain:
    """Domain of the covariates: ``categorical``, ``real``, ``positive`` or ``interval``."""

    kind: str
    bounds: tuple[float, float] | None = None
    n_grid: int = 100


@dataclass
class ConstraintReport:
    valid: bool
    failures: list[str]


def validate_cumulative_constraints(design: DesignKind | str, beta, domain: CovariateDomain, J: int, p: int) -> ConstraintReport:
    """Check eta_1(x) < ... < eta_{J-1}(x) over a covariate domain.

    Predictors are affine in x, eta(x) = c + sum_k x_k g_k, so the real-line
    case requires identical slopes and ordered intercepts, and the positive
    orthant requires ordered intercepts with non-decreasing slopes. The
    categorical case enumerates the C points (0 and each unit vector). The
    interval case checks the box corners plus a grid along the diagonal.
    """
    design = parse_design(design)
    beta = np.asarray(beta, dtype=float)

    def eta(x):
        return build_design(design, x, J) @ beta

    base = eta(np.zeros(p))
    slopes = np.array([eta(np.eye(p)[k]) - base for k in range(p)]).reshape(p, J - 1)
    failures = []

    def check_points(points, label):
        for x in points:
            d = np.diff(eta(x))
            for j in np.flatnonzero(d <= 0):
                failures.append(f"eta_{j + 1} >= eta_{j + 2} at {label} x={np.round(x, 6).tolist()}")

    if domain.kind == "categorical":
        check_points([np.zeros(p)] + [np.eye(p)[k] for k in range(p)], "level")
    elif domain.kind in ("real", "positive"):
        for j in np.flatnonzero(np.diff(base) <= 0):
            failures.append(f"intercepts not increasing: alpha_{j + 1} >= alpha_{j + 2}")
        dslope = np.diff(slopes, axis=1)
        for k in range(p):
            for j in range(J - 2):
                if domain.kind == "real" and abs(dslope[k, j]) > 1e-12:
                    failures.append(f"slopes differ on the real line: delta_{j + 1} != delta_{j + 2} (covariate {k + 1})")
                if domain.kind == "positive" and dslope[k, j] < -1e-12:
                    failures.append(f"slopes decrease on R+: delta_{j + 1} > delta_{j + 2} (covariate {k + 1})")
    elif domain.kind == "interval":
        if domain.bounds is None:
            raise ValueError("interval domain needs bounds (a, b)")
        a, b = domain.bounds
        corners = [np.array(c, dtype=float) for c in np.array(np.meshgrid(*[[a, b]] * p)).reshape(p, -1).T] if p else [np.zeros(0)]
        grid = [np.full(p, t) for t in np.linspace(a, b, domain.n_grid)]
        check_points(corners, "endpoint")
        check_points(grid, "grid")
    else:
        raise ValueError(f"unknown domain {domain.kind!r}")
    return ConstraintReport(valid=not failures, failures=failures)


__all__ = [
    "DESIGN_KINDS",
    "DesignKind",
    "parse_design",
    "build_design",
    "build_design_batch",
    "TransformMatrix",
    "make_transform",
    "design_equivalent",
    "CovariateDomain",
    "ConstraintReport",
    "validate_cumulative_constraints",
]
