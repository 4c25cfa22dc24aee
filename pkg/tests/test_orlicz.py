"""Tests for the Young-function family and the Luxemburg-norm machinery."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hslog import bliss
from hslog.analysis import maximize_F, random_smooth_profile
from hslog.functionals import LogParams
from hslog.orlicz import (
    EmbeddingReport,
    GammaSpec,
    convexity_check,
    embedding_check,
    gamma_value,
    h_tau,
    luxemburg_norm,
    modular,
)
from hslog.params import ValidationError, derived_constants, validate_params
from hslog.radial import Profile, dirichlet_norm, make_grid

P0 = validate_params(2, 2, 2, 2)
LP = LogParams(1.0, 0.5)


@pytest.fixture(scope="module")
def grid():
    return make_grid(1000, 3.0)


class TestGammaValue:
    def test_zero_by_convention(self):
        assert gamma_value(0.0, GammaSpec(6, 1, 1.0)) == 0.0
        assert gamma_value(0.0, GammaSpec(2, 0, 1.0)) == 0.0

    def test_unit_log_point(self):
        # t = e-1, tau = 1: ln(e) = 1, so the value is just t^6
        val = gamma_value(math.e - 1.0, GammaSpec(6, 1, 1.0))
        assert val == pytest.approx((math.e - 1.0) ** 6, rel=1e-14)

    def test_pure_power_when_b_zero(self):
        spec = GammaSpec(3.5, 0, 2.0)
        t = np.array([0.1, 1.0, 7.0])
        assert np.allclose(gamma_value(t, spec), t**3.5, rtol=1e-14)

    def test_invalid_specs(self):
        with pytest.raises(ValidationError):
            GammaSpec(1.0, 0.5, 1.0)
        with pytest.raises(ValidationError):
            GammaSpec(2.0, 1.5, 1.0)
        with pytest.raises(ValidationError):
            GammaSpec(2.0, 0.5, 0.5)


class TestConvexity:
    @pytest.mark.parametrize("spec,expected_bound", [
        (GammaSpec(6, 1, 1.0), 36.0),
        (GammaSpec(7.5, 0.5, 2.0), 7.5 * 6.5 + 0.5 * 7.0),
    ])
    def test_certificates(self, spec, expected_bound):
        report = convexity_check(spec)
        assert report.convex
        assert report.phi_lower_bound == pytest.approx(expected_bound)
        assert report.min_phi >= expected_bound - 1e-9

    def test_h_tau_at_least_one(self):
        t = np.exp(np.linspace(-12, 12, 200))
        for tau in (1.0, 2.0, 10.0):
            assert np.all(h_tau(t, GammaSpec(2, 1, tau)) >= 1.0)

    def test_narrow_grid_rejected(self):
        with pytest.raises(ValidationError, match="decades"):
            convexity_check(GammaSpec(6, 1, 1.0), t_lo=1e-2, t_hi=1e2)


@settings(max_examples=80, deadline=None)
@given(st.floats(min_value=1.01, max_value=8.0),
       st.floats(min_value=0.0, max_value=1.0),
       st.floats(min_value=1.0, max_value=5.0),
       st.floats(min_value=1.0, max_value=1e5))
def test_doubling_superadditivity(a, b, tau, t):
    # convexity with Gamma(0) = 0 forces Gamma(2 t) >= 2 Gamma(t)
    spec = GammaSpec(a, b, tau)
    assert gamma_value(2 * t, spec) >= 2 * gamma_value(t, spec) - 1e-9


class TestLuxemburgNorm:
    def test_zero_profile(self, grid):
        assert luxemburg_norm(Profile(grid, np.zeros(grid.m)), LP, P0) == 0.0

    def test_modular_contract(self, grid):
        rng = np.random.default_rng(4)
        u = random_smooth_profile(grid, rng)
        lam = luxemburg_norm(u, LP, P0)
        assert abs(modular(u, lam, LP, P0) - 1.0) < 1e-8

    def test_homogeneity(self, grid):
        rng = np.random.default_rng(5)
        u = random_smooth_profile(grid, rng)
        lam = luxemburg_norm(u, LP, P0)
        for c in (0.25, 3.0, 11.0):
            assert abs(luxemburg_norm(u.scaled(c), LP, P0) - c * lam) < 1e-10

    def test_modular_strictly_decreasing(self, grid):
        rng = np.random.default_rng(6)
        u = random_smooth_profile(grid, rng)
        lams = np.array([0.05, 0.1, 0.5, 1.0, 5.0])
        vals = [modular(u, lam, LP, P0) for lam in lams]
        assert all(vals[i + 1] < vals[i] for i in range(len(vals) - 1))

    def test_triangle_inequality_sampled(self, grid):
        rng = np.random.default_rng(7)
        for _ in range(50):
            u = random_smooth_profile(grid, rng)
            v = random_smooth_profile(grid, rng)
            w = Profile(grid, u.values + v.values)
            lhs = luxemburg_norm(w, LP, P0)
            rhs = luxemburg_norm(u, LP, P0) + luxemburg_norm(v, LP, P0)
            assert lhs <= rhs + 1e-9

    def test_tau_below_one_rejected(self, grid):
        u = Profile(grid, np.ones(grid.m))
        with pytest.raises(ValidationError, match="tau >= 1"):
            luxemburg_norm(u, LogParams(0.7, 0.5), P0)


class TestEmbedding:
    def test_random_and_bubble_profiles_pass(self, grid):
        dc = derived_constants(P0)
        rep = bliss.compute_S(dc)
        res = maximize_F(P0, LP, grid, eps_seeds=(1e-2, 1e-3, 1e-4), report=rep)
        lambda0 = (1.06 * res.value) ** (1.0 / 6.0)
        rng = np.random.default_rng(8)
        profiles = [random_smooth_profile(grid, rng) for _ in range(30)]
        a_hat = bliss.unit_norm_a_hat(rep, dc)
        profiles += [bliss.bubble_profile(bliss.BubbleSpec(e, a_hat, 0.2), grid, dc)
                     for e in (1e-2, 1e-3, 1e-4)]
        report = embedding_check(profiles, LP, P0, lambda0, f_hat=res.value)
        assert isinstance(report, EmbeddingReport)
        assert report.all_passed

    def test_zero_profile_passes_trivially(self, grid):
        report = embedding_check([Profile(grid, np.zeros(grid.m))], LP, P0, 1.5)
        assert report.all_passed
        assert report.rows[0].luxemburg == 0.0

    def test_undersized_lambda0_rejected(self, grid):
        with pytest.raises(ValidationError, match="1.05"):
            embedding_check([], LP, P0, lambda0=0.9, f_hat=1.0)
