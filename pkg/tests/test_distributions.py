import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import optimize

from catglm.distributions import CDF_CLIP, CdfSpec, cdf_eval, clipped_cdf, parse_cdf, pdf_eval, quantile, reflect
from catglm.errors import DomainError, UnsupportedReflectionError

ALL = ["logistic", "normal", "laplace", "cauchy", "student:3", "gumbelmin", "gumbelmax", "exponential", "pareto:2"]


def support_grid(spec, n=100):
    lo = spec.support[0]
    if math.isfinite(lo):
        return np.linspace(lo + 0.05, lo + 6.0, n)
    return np.linspace(-6.0, 6.0, n)


class TestValues:
    def test_logistic_half(self):
        assert cdf_eval(parse_cdf("logistic"), 0.0) == 0.5

    def test_gumbel_min_at_zero(self):
        assert cdf_eval(parse_cdf("gumbelmin"), 0.0) == pytest.approx(1 - math.exp(-1), abs=1e-12)
        assert cdf_eval(parse_cdf("gumbelmin"), 0.0) == pytest.approx(0.632121, abs=1e-6)

    def test_pareto_median(self):
        assert cdf_eval(parse_cdf("pareto:1"), 2.0) == pytest.approx(0.5, abs=1e-15)

    def test_logistic_density(self):
        assert pdf_eval(parse_cdf("logistic"), 0.0) == pytest.approx(0.25, abs=1e-15)

    def test_normal_density(self):
        assert pdf_eval(parse_cdf("normal"), 0.0) == pytest.approx(1 / math.sqrt(2 * math.pi), abs=1e-15)

    def test_gumbel_min_density_against_difference_quotient(self):
        spec = parse_cdf("gumbelmin")
        h = 1e-6
        fd = (cdf_eval(spec, 1 + h) - cdf_eval(spec, 1 - h)) / (2 * h)
        assert pdf_eval(spec, 1.0) == pytest.approx(fd, abs=1e-8)
        assert pdf_eval(spec, 1.0) == pytest.approx(0.179374, abs=1e-6)

    def test_quantiles(self):
        assert quantile(parse_cdf("logistic"), 0.5) == pytest.approx(0.0, abs=1e-15)
        assert quantile(parse_cdf("pareto:2"), 0.75) == pytest.approx(2.0, abs=1e-12)

    def test_student_quantile_against_bisection(self):
        spec = parse_cdf("student:3")
        root = optimize.bisect(lambda v: cdf_eval(spec, v) - 0.9, 0.0, 10.0, xtol=1e-14)
        assert quantile(spec, 0.9) == pytest.approx(root, abs=1e-10)
        assert root == pytest.approx(1.6377443536962102, abs=1e-9)

    def test_cauchy_is_student_one(self):
        w = np.linspace(-30, 30, 601)
        np.testing.assert_allclose(cdf_eval(parse_cdf("cauchy"), w), cdf_eval(parse_cdf("student:1"), w), atol=1e-12)
        np.testing.assert_allclose(pdf_eval(parse_cdf("cauchy"), w), pdf_eval(parse_cdf("student:1"), w), atol=1e-12)


class TestProperties:
    @pytest.mark.parametrize("name", ALL)
    def test_density_matches_difference_quotient(self, name):
        spec = parse_cdf(name)
        w = support_grid(spec)
        h = 1e-5
        fd = (cdf_eval(spec, w + h) - cdf_eval(spec, w - h)) / (2 * h)
        assert np.max(np.abs(pdf_eval(spec, w) - fd)) <= 1e-6

    @pytest.mark.parametrize("name", ALL)
    def test_quantile_round_trip(self, name):
        spec = parse_cdf(name)
        p = np.linspace(0.01, 0.99, 99)
        assert np.max(np.abs(cdf_eval(spec, quantile(spec, p)) - p)) <= 1e-10

    @pytest.mark.parametrize("name", ALL)
    def test_monotone(self, name):
        spec = parse_cdf(name)
        v = cdf_eval(spec, support_grid(spec, 400))
        assert np.all(np.diff(v) >= 0)
        interior = (v > 1e-15) & (v < 1 - 1e-15)
        assert np.all(np.diff(v)[interior[1:] & interior[:-1]] > 0)

    @given(st.sampled_from(ALL), st.floats(-8, 8), st.floats(-8, 8))
    def test_monotone_pairs(self, name, a, b):
        spec = parse_cdf(name)
        lo = spec.support[0]
        a, b = sorted((a, b))
        if math.isfinite(lo):
            a, b = lo + abs(a) + 1e-3, lo + abs(a) + 1e-3 + (b - a)
        assert cdf_eval(spec, a) <= cdf_eval(spec, b)

    @pytest.mark.parametrize("name", ["logistic", "normal", "laplace", "cauchy", "student:4", "gumbelmin", "gumbelmax"])
    def test_reflection_identity_and_involution(self, name):
        spec = parse_cdf(name)
        ref = reflect(spec)
        w = np.linspace(-4, 4, 81)
        np.testing.assert_allclose(cdf_eval(ref, w), 1 - cdf_eval(spec, -w), atol=1e-15)
        assert reflect(ref) == spec


class TestReflectionAndErrors:
    def test_gumbel_pair(self):
        assert reflect(parse_cdf("gumbelmin")).family == "gumbel_max"
        assert reflect(parse_cdf("gumbelmax")).family == "gumbel_min"

    def test_symmetric_families_are_fixed(self):
        assert reflect(parse_cdf("logistic")) == parse_cdf("logistic")
        spec = parse_cdf("normal")
        assert cdf_eval(reflect(spec), 1.3) == pytest.approx(1 - cdf_eval(spec, -1.3), abs=1e-15)

    @pytest.mark.parametrize("name", ["exponential", "pareto:2"])
    def test_unsupported_reflections(self, name):
        with pytest.raises(UnsupportedReflectionError):
            reflect(parse_cdf(name))

    def test_support_is_a_hard_error(self):
        with pytest.raises(DomainError):
            cdf_eval(parse_cdf("exponential"), -0.5)
        with pytest.raises(DomainError):
            cdf_eval(parse_cdf("pareto:2"), 0.5)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            quantile(parse_cdf("normal"), p)

    def test_clip(self):
        spec = parse_cdf("logistic")
        assert clipped_cdf(spec, 100.0) == 1 - CDF_CLIP
        assert clipped_cdf(spec, -100.0) == CDF_CLIP

    def test_location_scale(self):
        spec = parse_cdf("normal@0.7,2.0")
        assert spec == CdfSpec("normal", loc=0.7, scale=2.0)
        assert cdf_eval(spec, 0.7) == pytest.approx(0.5)
        assert parse_cdf(spec.name) == spec

    @pytest.mark.parametrize("name", ALL)
    def test_name_round_trip(self, name):
        spec = parse_cdf(name)
        assert parse_cdf(spec.name) == spec

    def test_bad_names(self):
        with pytest.raises(ValueError):
            parse_cdf("weibull")
        with pytest.raises(ValueError):
            parse_cdf("student:0")
