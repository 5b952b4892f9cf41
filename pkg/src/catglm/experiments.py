"""Permutation scans, order recovery under partial orders, cross-validated classifiers."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .data import Dataset, contingency_table, simulate
from .errors import CatGLMError, ConvergenceWarning, CyclicConstraintError
from .fit import Controls, classify, fisher_scoring
from .model import ModelSpec, make_spec

PLATEAU_TOL = 1e-6
MAX_SCAN_J = 6

# cdf grid of the reference classifiers, logistic excluded (it is the baseline)
F0 = ("normal", "laplace", "gumbelmin", "gumbelmax") + tuple(f"student:{k}" for k in range(1, 7))


# --------------------------------------------------------------------------
# permutation scans


@dataclass
class PermEntry:
    order: tuple[int, ...]
    labels: tuple[str, ...]
    log_lik: float | None
    converged: bool = False
    error: str | None = None

    @property
    def diverged(self) -> bool:
        return self.log_lik is None


@dataclass
class Plateau:
    members: list[int]
    log_lik: float


@dataclass
class PermScanResult:
    spec: ModelSpec
    entries: list[PermEntry]
    plateaus: list[Plateau]
    orbit_spread: float

    def plateau_of(self) -> dict[int, int]:
        return {m: pid for pid, pl in enumerate(self.plateaus) for m in pl.members}

    @property
    def plateau_sizes(self) -> list[int]:
        return [len(p.members) for p in self.plateaus]


def guaranteed_orbit(spec: ModelSpec, order) -> tuple:
    """Key shared by permutations whose fits are equal by a proven invariance.

    Reference models with complete/proportional designs only depend on the
    reference category, and (reference|adjacent, logistic, complete) on
    nothing. Adjacent and cumulative models with a symmetric cdf pair each
    order with its reverse; sequential models with a symmetric cdf and
    complete design pair each order with its last-two transposition.
    """
    order = tuple(order)
    plain = spec.design.left is None and spec.design.kind in ("complete", "proportional")
    complete = spec.design.left is None and spec.design.kind == "complete"
    logistic = spec.cdf.family == "logistic"
    if spec.ratio in ("reference", "adjacent") and logistic and complete:
        return ("all",)
    if spec.ratio == "reference" and plain:
        return ("reference", order[-1])
    if spec.ratio in ("adjacent", "cumulative") and spec.cdf.symmetric and plain:
        return min(order, order[::-1])
    if spec.ratio == "sequential" and spec.cdf.symmetric and complete:
        swapped = order[:-2] + (order[-1], order[-2])
        return min(order, swapped)
    return order


def _fit_entry(spec: ModelSpec, data: Dataset, order, controls) -> PermEntry:
    s = spec.with_order(order)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConvergenceWarning)
            f = fisher_scoring(s, data, controls)
        return PermEntry(tuple(order), s.ordered_labels, f.log_lik, f.converged)
    except CatGLMError as exc:
        return PermEntry(tuple(order), s.ordered_labels, None, False, str(exc))


def group_plateaus(spec: ModelSpec, entries: list[PermEntry], tol: float = PLATEAU_TOL) -> tuple[list[Plateau], float]:
    """Group by guaranteed orbits, then merge orbits whose log-likelihoods lie within ``tol``.

    Returns the plateaus (sorted by decreasing log-likelihood) and the largest
    log-likelihood spread observed inside one orbit.
    """
    orbits: dict[tuple, list[int]] = {}
    for i, e in enumerate(entries):
        if not e.diverged:
            orbits.setdefault(guaranteed_orbit(spec, e.order), []).append(i)
    spread = 0.0
    values = []
    for members in orbits.values():
        lls = [entries[i].log_lik for i in members]
        spread = max(spread, max(lls) - min(lls))
        values.append((max(lls), members))
    values.sort(key=lambda v: -v[0])
    plateaus: list[Plateau] = []
    for ll, members in values:
        if plateaus and plateaus[-1].log_lik - ll <= tol:
            plateaus[-1].members.extend(members)
        else:
            plateaus.append(Plateau(list(members), ll))
    return plateaus, spread


def permutation_scan(spec: ModelSpec, data: Dataset, perms="all", controls: Controls | None = None) -> PermScanResult:
    """Fit the permuted model for each category order in ``perms``.

    ``perms`` is ``"all"`` (J <= 6 only) or a list of 0-based orders over the
    dataset categories. Fits that fail are kept as diverged entries.
    """
    if perms == "all":
        if spec.J > MAX_SCAN_J:
            raise ValueError(f"enumerating all {math.factorial(spec.J)} permutations is limited to J <= {MAX_SCAN_J}")
        perms = list(itertools.permutations(range(spec.J)))
    entries = [_fit_entry(spec, data, order, controls) for order in perms]
    plateaus, spread = group_plateaus(spec, entries)
    return PermScanResult(spec, entries, plateaus, spread)


# --------------------------------------------------------------------------
# partial orders


def parse_constraints(text: str) -> list[tuple[str, str]]:
    """``"l<u<U, l<s<S"`` -> [(l, u), (u, U), (l, s), (s, S)]."""
    pairs = []
    for chain in filter(None, (c.strip() for c in text.split(","))):
        items = [t.strip() for t in chain.split("<")]
        pairs.extend(zip(items, items[1:]))
    return pairs


def hasse_consistent_permutations(labels, constraints) -> list[tuple[str, ...]]:
    """All total orders of ``labels`` extending the ``(a, b)`` meaning a < b constraints."""
    labels = [str(l) for l in labels]
    preds: dict[str, set[str]] = {l: set() for l in labels}
    for a, b in constraints:
        if a not in preds or b not in preds:
            raise ValueError(f"constraint {a}<{b} uses an unknown label")
        preds[b].add(a)
    out: list[tuple[str, ...]] = []

    def extend(prefix, remaining):
        if not remaining:
            out.append(tuple(prefix))
            return
        placed = set(prefix)
        for l in labels:
            if l in remaining and preds[l] <= placed:
                extend(prefix + [l], remaining - {l})

    extend([], set(labels))
    if not out:
        raise CyclicConstraintError("order constraints contain a cycle")
    return out


@dataclass
class OrderSearchResult:
    labels: tuple[str, ...]
    rankings: dict[str, list[tuple[tuple[str, ...], float | None]]]
    ties: dict[str, list[tuple[tuple[str, ...], tuple[str, ...]]]] = field(default_factory=dict)

    def best(self, cdf: str) -> tuple[str, ...]:
        return self.rankings[cdf][0][0]


def ordering_search(
    data: Dataset,
    constraints,
    cdfs=("logistic", "gumbelmax"),
    design: str = "complete",
    controls: Controls | None = None,
    tol: float = PLATEAU_TOL,
) -> OrderSearchResult:
    """Rank the orders consistent with ``constraints`` by sequential-model log-likelihood.

    For every cdf, each consistent order is fitted as (sequential, F, design)
    and orders are sorted by decreasing log-likelihood. Orders whose fits
    agree within ``tol`` are reported as ties; with a symmetric cdf and the
    complete design these include the last-two transpositions.
    """
    if isinstance(constraints, str):
        constraints = parse_constraints(constraints)
    orders = hasse_consistent_permutations(data.labels, constraints)
    index = data.category_dictionary
    rankings, ties = {}, {}
    for cdf in cdfs:
        spec = make_spec("sequential", cdf, design, data.J, data.p, labels=data.labels)
        rows = []
        for labels in orders:
            e = _fit_entry(spec, data, [index[l] for l in labels], controls)
            rows.append((labels, e.log_lik))
        rows.sort(key=lambda r: -math.inf if r[1] is None else -r[1])
        rankings[spec.cdf.name] = rows
        found = []
        for (a, la), (b, lb) in itertools.combinations(rows, 2):
            if la is not None and lb is not None and abs(la - lb) <= tol:
                found.append((a, b))
        ties[spec.cdf.name] = found
    return OrderSearchResult(data.labels, rankings, ties)


def pear_tree_surrogate(
    n: int = 3000,
    seed: int = 0,
    true_order=("l", "u", "U", "s", "S"),
    cdf: str = "gumbelmax",
    beta=None,
) -> Dataset:
    """Synthetic axillary-production data from a planted sequential order.

    Five categories with l < u < U and l < s < S; the single covariate stands
    in for internode length (standardised, uniform on [-2, 2]). Categories
    are stored in alphabetical label order so the planted order is not
    visible in the coding.
    """
    rng = np.random.default_rng(seed)
    labels = tuple(sorted(true_order))
    spec = make_spec("sequential", cdf, "complete", 5, 1, labels=labels, order=[labels.index(l) for l in true_order])
    if beta is None:
        beta = np.array([-0.5, 0.0, 0.5, 0.0, 2.0, 1.0, -2.0, -1.0])
    X = rng.uniform(-2.0, 2.0, (n, 1))
    data = simulate(spec, beta, X, rng, labels=labels)
    return Dataset(data.codes, data.X, data.weights, labels, ("internode_length",), {"generator": "pear_tree_surrogate", "seed": seed})


def dreams_surrogate(seed: int = 0, per_level: int = 60) -> Dataset:
    """Grouped J=4 severity x 5 age-group table from a planted non-canonical model."""
    rng = np.random.default_rng(seed)
    ages = np.array([6.0, 8.5, 10.5, 12.5, 14.5])
    x = ((ages - ages.mean()) / ages.std())[:, None]
    spec = make_spec("sequential", "gumbelmin", "complete", 4, 1, labels=("1", "2", "3", "4"))
    beta = np.array([-1.0, -0.5, 0.0, -0.8, 0.5, 0.9])
    table = contingency_table(spec, beta, x, per_level, rng)
    return Dataset(table.codes, table.X, table.weights, table.labels, ("age",), {"generator": "dreams_surrogate", "seed": seed})


# --------------------------------------------------------------------------
# classification


@dataclass
class CvResult:
    names: list[str]
    fold_errors: np.ndarray  # (n_classifiers, k), nan where the fit failed
    failures: dict[str, list[str]]
    groups: dict[str, list[str]] = field(default_factory=dict)

    @property
    def mean_error(self) -> dict[str, float]:
        return {n: float(np.nanmean(row)) if np.isfinite(row).any() else math.nan for n, row in zip(self.names, self.fold_errors)}

    def best(self, names=None) -> str:
        names = list(names) if names is not None else self.names
        errs = self.mean_error
        return min(names, key=lambda n: (math.inf if math.isnan(errs[n]) else errs[n], self.names.index(n)))


def reference_classifiers(data: Dataset, transpositions: bool = False, cdfs=F0) -> list[tuple[str, ModelSpec]]:
    """(reference, F, complete) classifiers, optionally for every reference category.

    Without transpositions this is one classifier per cdf; with them, J per
    cdf (the identity plus the J-1 transpositions of the reference).
    """
    J = data.J
    out = []
    for cdf in cdfs:
        spec = make_spec("reference", cdf, "complete", J, data.p, labels=data.labels)
        if not transpositions:
            out.append((f"{spec.cdf.name}", spec))
            continue
        for t in range(J):
            order = list(range(J))
            order[t], order[J - 1] = order[J - 1], order[t]
            name = spec.cdf.name if t == J - 1 else f"{spec.cdf.name}|ref={data.labels[t]}"
            out.append((name, spec.with_order(order)))
    return out


def classifier_grid(data: Dataset, cdfs=F0) -> tuple[list[tuple[str, ModelSpec]], dict[str, list[str]]]:
    """The logistic baseline, the reference classifiers and their transposed versions.

    Groups: ``baseline`` (reference, logistic, complete); ``fixed_reference``
    (one classifier per cdf); ``all_references`` (every cdf with every
    choice of reference category).
    """
    base = make_spec("reference", "logistic", "complete", data.J, data.p, labels=data.labels)
    full = reference_classifiers(data, transpositions=True, cdfs=cdfs)
    fixed = [name for name, _ in full if "|" not in name]
    groups = {"baseline": ["logistic"], "fixed_reference": fixed, "all_references": [name for name, _ in full]}
    return [("logistic", base)] + full, groups


def stratified_folds(codes, k: int, seed: int) -> np.ndarray:
    """Fold index per row, stratified by class."""
    from sklearn.model_selection import StratifiedKFold

    folds = np.empty(len(codes), dtype=int)
    splitter = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
    for f, (_, test) in enumerate(splitter.split(np.zeros(len(codes)), codes)):
        folds[test] = f
    return folds


def kfold_cv(classifiers, data: Dataset, k: int = 10, seed: int = 0, controls: Controls | None = None, groups=None) -> CvResult:
    """Weighted misclassification rate of each classifier on identical folds.

    ``classifiers`` is a list of ModelSpec or (name, ModelSpec) pairs. Folds
    come from ``data.folds`` when present, otherwise stratified with ``seed``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    named = [(c if isinstance(c, tuple) else (str(c), c)) for c in classifiers]
    folds = data.folds if data.folds is not None else stratified_folds(data.codes, k, seed)
    fold_ids = np.unique(folds)
    errors = np.full((len(named), len(fold_ids)), np.nan)
    failures: dict[str, list[str]] = {}
    for f, fid in enumerate(fold_ids):
        train, test = data.subset(folds != fid), data.subset(folds == fid)
        for c, (name, spec) in enumerate(named):
            try:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", ConvergenceWarning)
                    with np.errstate(all="ignore"):
                        fitted = fisher_scoring(spec, train, controls)
                    pred = classify(fitted, test.X)
            except CatGLMError as exc:
                failures.setdefault(name, []).append(f"fold {fid}: {exc}")
                continue
            wrong = pred != test.codes
            errors[c, f] = float(np.dot(test.weights, wrong) / test.weights.sum())
    return CvResult([n for n, _ in named], errors, failures, dict(groups or {}))
