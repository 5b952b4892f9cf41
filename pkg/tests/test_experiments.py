import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catglm.data import Dataset
from catglm.errors import CyclicConstraintError
from catglm.experiments import (
    F0,
    classifier_grid,
    dreams_surrogate,
    guaranteed_orbit,
    hasse_consistent_permutations,
    kfold_cv,
    ordering_search,
    parse_constraints,
    pear_tree_surrogate,
    permutation_scan,
    reference_classifiers,
)
from catglm.model import make_spec


@pytest.fixture(scope="module")
def table():
    return dreams_surrogate(0)


def scan(table, ratio, cdf, design):
    return permutation_scan(make_spec(ratio, cdf, design, table.J, table.p, labels=table.labels), table)


def by_order(res):
    return {e.order: e.log_lik for e in res.entries}


class TestPermutationScan:
    def test_canonical_single_plateau(self, table):
        res = scan(table, "reference", "logistic", "complete")
        assert res.plateau_sizes == [24]
        lls = [e.log_lik for e in res.entries]
        assert max(lls) - min(lls) <= 1e-6

    def test_reference_cauchy_four_plateaus(self, table):
        res = scan(table, "reference", "cauchy", "complete")
        assert res.plateau_sizes == [6, 6, 6, 6]
        for pl in res.plateaus:
            assert len({res.entries[i].order[-1] for i in pl.members}) == 1

    def test_sequential_symmetric_pairs(self, table):
        res = scan(table, "sequential", "normal", "complete")
        ll = by_order(res)
        for order, v in ll.items():
            assert abs(v - ll[order[:-2] + (order[-1], order[-2])]) <= 1e-6
        assert len(res.plateaus) == 12

    @pytest.mark.parametrize("ratio", ["adjacent", "cumulative"])
    def test_reverse_pairs(self, table, ratio):
        res = scan(table, ratio, "normal", "proportional")
        ll = by_order(res)
        for order, v in ll.items():
            if v is not None:
                assert abs(v - ll[order[::-1]]) <= 1e-6

    def test_asymmetric_cdf_breaks_pairs(self, table):
        res = scan(table, "sequential", "gumbelmin", "complete")
        assert len(res.plateaus) == 24

    def test_explicit_permutations(self, table):
        spec = make_spec("reference", "cauchy", "complete", 4, 1, labels=table.labels)
        res = permutation_scan(spec, table, perms=[(0, 1, 2, 3), (1, 0, 2, 3)])
        assert res.plateau_sizes == [2]

    def test_large_J_guard(self):
        spec = make_spec("reference", "logistic", "minimal", 7, 0)
        data = Dataset(np.arange(7), np.zeros((7, 0)), None, spec.labels)
        with pytest.raises(ValueError):
            permutation_scan(spec, data)

    def test_orbit_keys(self):
        spec = make_spec("sequential", "normal", "complete", 4, 1)
        assert guaranteed_orbit(spec, (0, 1, 2, 3)) == guaranteed_orbit(spec, (0, 1, 3, 2))
        spec = make_spec("cumulative", "logistic", "proportional", 4, 1)
        assert guaranteed_orbit(spec, (0, 1, 2, 3)) == guaranteed_orbit(spec, (3, 2, 1, 0))
        spec = make_spec("sequential", "gumbelmin", "complete", 4, 1)
        assert guaranteed_orbit(spec, (0, 1, 2, 3)) != guaranteed_orbit(spec, (0, 1, 3, 2))


class TestHasse:
    def test_pear_tree_structure(self):
        orders = hasse_consistent_permutations("luUsS", parse_constraints("l<u<U, l<s<S"))
        assert len(orders) == 6
        assert ("l", "u", "U", "s", "S") in orders

    def test_no_constraints(self):
        assert len(hasse_consistent_permutations("abc", [])) == 6

    def test_total_order(self):
        assert hasse_consistent_permutations("abc", parse_constraints("c<a<b")) == [("c", "a", "b")]

    def test_cycle(self):
        with pytest.raises(CyclicConstraintError):
            hasse_consistent_permutations("abc", parse_constraints("a<b<c, c<a"))

    def test_unknown_label(self):
        with pytest.raises(ValueError):
            hasse_consistent_permutations("abc", [("a", "z")])

    @given(st.integers(2, 6), st.integers(0, 2**32 - 1))
    def test_matches_brute_force(self, n, seed):
        rng = np.random.default_rng(seed)
        labels = [f"c{k}" for k in range(n)]
        # random DAG: edges only from lower to higher index of a hidden order
        hidden = rng.permutation(labels)
        pairs = [(hidden[i], hidden[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.3]
        brute = [p for p in itertools.permutations(labels) if all(p.index(a) < p.index(b) for a, b in pairs)]
        assert sorted(hasse_consistent_permutations(labels, pairs)) == sorted(brute)


class TestOrderingSearch:
    def test_planted_order_first_and_symmetric_ties(self):
        data = pear_tree_surrogate(seed=3)
        res = ordering_search(data, "l<u<U, l<s<S", cdfs=("gumbelmax", "normal"))
        assert res.best("gumbelmax") == ("l", "u", "U", "s", "S")
        assert len(res.rankings["normal"]) == 6
        ll = dict(res.rankings["normal"])
        for order, v in ll.items():
            swapped = order[:-2] + (order[-1], order[-2])
            if swapped in ll:
                assert abs(v - ll[swapped]) <= 1e-6
                assert (order, swapped) in res.ties["normal"] or (swapped, order) in res.ties["normal"]

    def test_single_consistent_order(self):
        data = pear_tree_surrogate(n=300, seed=0)
        res = ordering_search(data, "l<u<U<s<S", cdfs=("logistic",))
        assert res.rankings["logistic"][0][0] == ("l", "u", "U", "s", "S")
        assert len(res.rankings["logistic"]) == 1


class TestCrossValidation:
    def test_grid_sizes(self):
        data = pear_tree_surrogate(n=100)
        assert len(F0) == 10
        assert len(reference_classifiers(data)) == 10
        assert len(reference_classifiers(data, transpositions=True)) == 10 * data.J
        classifiers, groups = classifier_grid(data)
        assert len(groups["fixed_reference"]) == 10 and len(groups["all_references"]) == 10 * data.J
        assert len({name for name, _ in classifiers}) == len(classifiers)

    def test_separable_data(self):
        x = np.r_[np.linspace(-3, -1, 50), np.linspace(1, 3, 50)]
        codes = (x > 0).astype(int)
        data = Dataset(codes, x[:, None], None, ("neg", "pos"))
        spec = make_spec("reference", "logistic", "complete", 2, 1, labels=data.labels)
        import warnings

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            res = kfold_cv([spec], data, k=5, seed=0)
        assert res.mean_error[str(spec)] == 0.0

    def test_deterministic(self):
        data = pear_tree_surrogate(n=300, seed=1)
        grid = reference_classifiers(data, cdfs=("normal", "cauchy"))
        a, b = kfold_cv(grid, data, 5, seed=4), kfold_cv(grid, data, 5, seed=4)
        np.testing.assert_array_equal(a.fold_errors, b.fold_errors)
        assert a.best() in a.names

    def test_predefined_folds(self):
        data = pear_tree_surrogate(n=200, seed=1)
        folds = np.arange(200) % 4
        data = Dataset(data.codes, data.X, data.weights, data.labels, folds=folds)
        res = kfold_cv(reference_classifiers(data, cdfs=("normal",)), data, k=10, seed=0)
        assert res.fold_errors.shape == (1, 4)

    def test_k_must_be_at_least_two(self):
        with pytest.raises(ValueError):
            kfold_cv([], pear_tree_surrogate(n=50), k=1)
