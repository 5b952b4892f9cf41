import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from catglm.diagnostics import numeric_jacobian, sample_ratios
from catglm.errors import InvalidRatioError
from catglm.ratios import KINDS, ratio_apply, ratio_invert, ratio_jacobian
from conftest import random_pi

PI = np.array([0.2, 0.3])


class TestExamples:
    def test_apply(self):
        np.testing.assert_allclose(ratio_apply("reference", PI), [0.2 / 0.7, 0.375], atol=1e-15)
        np.testing.assert_allclose(ratio_apply("cumulative", PI), [0.2, 0.5], atol=1e-15)
        np.testing.assert_allclose(ratio_apply("adjacent", PI), [0.4, 0.375], atol=1e-15)
        np.testing.assert_allclose(ratio_apply("sequential", PI), [0.2, 0.375], atol=1e-15)

    def test_invert(self):
        np.testing.assert_allclose(ratio_invert("cumulative", [0.2, 0.5]), [0.2, 0.3], atol=1e-15)
        np.testing.assert_allclose(ratio_invert("reference", [0.5, 0.5]), [1 / 3, 1 / 3], atol=1e-15)
        np.testing.assert_allclose(ratio_invert("sequential", [0.2, 0.375]), [0.2, 0.3], atol=1e-15)

    def test_cumulative_jacobian(self):
        np.testing.assert_array_equal(ratio_jacobian("cumulative", [0.3, 0.6]), [[1, -1], [0, 1]])

    def test_reference_jacobian_at_half(self):
        r = np.array([0.5, 0.5])
        np.testing.assert_allclose(ratio_jacobian("reference", r), numeric_jacobian("reference", r), atol=1e-6)

    def test_sequential_jacobian_j4(self, rng):
        r = rng.uniform(0.05, 0.95, 3)
        np.testing.assert_allclose(ratio_jacobian("sequential", r), numeric_jacobian("sequential", r), atol=1e-6)

    def test_unordered_cumulative_is_typed_error(self):
        with pytest.raises(InvalidRatioError):
            ratio_invert("cumulative", [0.6, 0.4])

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            ratio_apply("baseline", PI)


class TestProperties:
    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("J", range(2, 9))
    def test_round_trip(self, kind, J, rng):
        pi = random_pi(rng, J, 1000)
        np.testing.assert_allclose(ratio_invert(kind, ratio_apply(kind, pi)), pi, atol=1e-12, rtol=0)

    @pytest.mark.parametrize("kind", KINDS)
    @pytest.mark.parametrize("J", range(2, 9))
    def test_jacobian_matches_finite_differences(self, kind, J, rng):
        r = sample_ratios(kind, J, rng, 50)
        assert np.max(np.abs(ratio_jacobian(kind, r) - numeric_jacobian(kind, r))) <= 1e-6

    @pytest.mark.parametrize("kind", KINDS)
    def test_jacobian_accepts_precomputed_pi(self, kind, rng):
        r = sample_ratios(kind, 5, rng, 10)
        np.testing.assert_array_equal(ratio_jacobian(kind, r), ratio_jacobian(kind, r, ratio_invert(kind, r)))

    @given(st.floats(0.001, 0.999))
    def test_all_ratios_coincide_at_two_categories(self, p):
        values = {float(ratio_apply(k, np.array([p]))[0]) for k in KINDS}
        assert max(values) - min(values) <= 1e-15

    @given(st.integers(2, 8), st.integers(0, 2**32 - 1))
    def test_cumulative_image_increasing(self, J, seed):
        pi = random_pi(np.random.default_rng(seed), J)
        assert np.all(np.diff(ratio_apply("cumulative", pi)) > 0)

    @pytest.mark.parametrize("kind", KINDS)
    def test_ratios_in_unit_interval(self, kind, rng):
        r = ratio_apply(kind, random_pi(rng, 6, 500))
        assert np.all((r > 0) & (r < 1))
