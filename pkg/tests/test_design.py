import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catglm.design import (
    CovariateDomain,
    build_design,
    build_design_batch,
    design_equivalent,
    make_transform,
    parse_design,
    validate_cumulative_constraints,
)


class TestBuild:
    def test_proportional(self):
        np.testing.assert_array_equal(build_design("proportional", [2.0], 3), [[1, 0, 2], [0, 1, 2]])

    def test_complete(self):
        np.testing.assert_array_equal(build_design("complete", [2.0], 3), [[1, 0, 2, 0], [0, 1, 0, 2]])

    def test_z0(self):
        np.testing.assert_array_equal(build_design("z0", [2.0], 3), [[1, 0, 0], [0, 1, 2]])

    def test_minimal(self):
        np.testing.assert_array_equal(build_design("minimal", [2.0], 3), np.eye(2))

    def test_custom_between_proportional_and_complete(self):
        # first covariate shared, second only in rows 2 and 3
        Z = build_design("custom:p,c@2+3", [2.0, 5.0], 4)
        expected = [[1, 0, 0, 0, 0, 2], [0, 1, 0, 5, 0, 2], [0, 0, 1, 0, 5, 2]]
        np.testing.assert_array_equal(Z, expected)

    @given(st.integers(2, 7), st.integers(0, 4), st.sampled_from(["complete", "proportional", "z0", "minimal"]))
    def test_column_counts(self, J, p, kind):
        Z = build_design_batch(parse_design(kind), np.ones((3, p)), J)
        assert Z.shape == (3, J - 1, parse_design(kind).n_params(J, p))
        if kind in ("complete", "proportional"):
            assert J - 1 + p <= Z.shape[2] <= (J - 1) * (1 + p)

    def test_batch_matches_single(self, rng):
        X = rng.normal(size=(5, 2))
        for kind in ("complete", "proportional", "z0", "custom:c,p@1"):
            batch = build_design_batch(parse_design(kind), X, 4)
            for i in range(5):
                np.testing.assert_array_equal(batch[i], build_design(kind, X[i], 4))

    def test_left_factor(self):
        A = make_transform("A", 3).matrix
        np.testing.assert_array_equal(build_design(parse_design("complete").premultiply(A), [2.0], 3), A @ build_design("complete", [2.0], 3))

    def test_bad_names(self):
        with pytest.raises(ValueError):
            parse_design("diagonal")
        with pytest.raises(ValueError):
            parse_design("custom:q")


class TestTransforms:
    def test_examples(self):
        np.testing.assert_array_equal(make_transform("A", 3).matrix, [[1, 0], [-1, 1]])
        np.testing.assert_array_equal(make_transform("A_tilde_tau", 3).matrix, [[1, 0], [0, -1]])
        np.testing.assert_array_equal(make_transform("B_tau", 3, 0).matrix, [[-1, 0], [-1, 1]])

    @pytest.mark.parametrize("J", range(2, 9))
    def test_exact_inverses(self, J):
        eye = np.eye(J - 1, dtype=int)
        A, Ainv = make_transform("A", J).matrix, make_transform("A_inverse", J).matrix
        assert A.dtype.kind == "i"
        np.testing.assert_array_equal(A @ Ainv, eye)
        for t in range(J - 1):
            B = make_transform("B_tau", J, t).matrix
            np.testing.assert_array_equal(B @ B, eye)
        P = make_transform("P_reverse", J).matrix
        np.testing.assert_array_equal(P @ P, eye)
        At = make_transform("A_tilde_tau", J).matrix
        np.testing.assert_array_equal(At @ At, eye)
        np.testing.assert_array_equal(make_transform("A_transpose", J).matrix, A.T)

    def test_permutation_matrix(self):
        P = make_transform("P_sigma", 4, [2, 0, 1, 3]).matrix
        v = np.array([10, 20, 30])
        # column j carries entry j to row sigma(j)
        np.testing.assert_array_equal(P @ v, [20, 30, 10])
        with pytest.raises(ValueError):
            make_transform("P_sigma", 4, [3, 0, 1, 2])


class TestEquivalence:
    def test_negated_covariates(self):
        def zp_neg(x):
            return np.hstack([np.eye(3), -np.tile(x, (3, 1))])

        assert design_equivalent("proportional", zp_neg, 4, 2)

    def test_permuted_complete(self):
        P = make_transform("P_sigma", 4, [1, 2, 0, 3]).matrix
        assert design_equivalent("complete", parse_design("complete").premultiply(P), 4, 2)

    def test_a_times_proportional_is_not(self):
        A = make_transform("A", 4).matrix
        assert not design_equivalent("proportional", parse_design("proportional").premultiply(A), 4, 2)

    def test_a_transpose_complete(self):
        At = make_transform("A_transpose", 5).matrix
        assert design_equivalent("complete", parse_design("complete").premultiply(At), 5, 1)

    def test_nested_designs_differ(self):
        assert not design_equivalent("proportional", "complete", 3, 1)


class TestCumulativeConstraints:
    def test_parallel_lines(self):
        assert validate_cumulative_constraints("proportional", [0, 1, 1], CovariateDomain("real"), 3, 1).valid

    def test_crossing_lines(self):
        rep = validate_cumulative_constraints("complete", [0, 1, 2, 1], CovariateDomain("real"), 3, 1)
        assert not rep.valid and rep.failures

    def test_positive_orthant(self):
        assert validate_cumulative_constraints("complete", [0, 1, 1, 2], CovariateDomain("positive"), 3, 1).valid
        assert not validate_cumulative_constraints("complete", [0, 1, 2, 1], CovariateDomain("positive"), 3, 1).valid

    def test_interval(self):
        # lines cross at x = 1
        beta = [0, 1, 2, 1]
        assert validate_cumulative_constraints("complete", beta, CovariateDomain("interval", (-3, 0.9)), 3, 1).valid
        assert not validate_cumulative_constraints("complete", beta, CovariateDomain("interval", (-3, 1.5)), 3, 1).valid

    def test_categorical(self):
        # two indicator covariates: eta at the three levels
        beta = [0, 1, 0.5, 0.5, 0.0, 2.0]
        assert validate_cumulative_constraints("complete", beta, CovariateDomain("categorical"), 3, 2).valid
        bad = [0, 1, 2.0, 0.5, 0.0, 0.0]
        assert not validate_cumulative_constraints("complete", bad, CovariateDomain("categorical"), 3, 2).valid

    def test_interval_needs_bounds(self):
        with pytest.raises(ValueError):
            validate_cumulative_constraints("complete", [0, 1, 1, 1], CovariateDomain("interval"), 3, 1)
