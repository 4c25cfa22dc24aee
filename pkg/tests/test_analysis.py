"""Tests for rate fitting, the sphere maximizer, and concentration checks."""

import math

import numpy as np
import pytest

from hslog import bliss
from hslog.analysis import (
    BubbleBound,
    beta_sweep,
    bubble_lower_bound,
    concentration_level_check,
    energy_sphere_scan,
    maximize_F,
    mountain_pass_gap,
    ncs_check,
    random_smooth_profile,
    rate_fit,
    solve_t_eps,
)
from hslog.functionals import LogParams, J, sobolev_J0
from hslog.params import (
    NumericalError,
    ValidationError,
    derived_constants,
    validate_params,
)
from hslog.radial import Profile, dirichlet_norm, make_grid, normalize

P0 = validate_params(2, 2, 2, 2)
DC0 = derived_constants(P0)


@pytest.fixture(scope="module")
def report():
    return bliss.compute_S(DC0)


@pytest.fixture(scope="module")
def grid():
    return make_grid(2000, 3.0)


class TestRateFit:
    def test_power_times_loglog_recovers_planted_exponent(self):
        eps = np.array([1e-2, 1e-3, 1e-4, 1e-5])
        vals = 2.0 * eps**0.5 * np.log(np.abs(np.log(eps)))
        table = rate_fit(zip(eps, vals), model="power-times-loglog")
        assert table.fitted_exponent == pytest.approx(0.5, abs=1e-6)
        assert table.fit_residual < 1e-10

    def test_pure_power_recovers_planted_exponent(self):
        eps = np.array([1e-1, 1e-2, 1e-3, 1e-4, 1e-5])
        table = rate_fit(zip(eps, 3.0 * eps), model="pure-power")
        assert table.fitted_exponent == pytest.approx(1.0, abs=1e-10)

    def test_needs_four_points(self):
        with pytest.raises(ValidationError, match="4 points"):
            rate_fit([(1e-1, 1.0), (1e-2, 0.1), (1e-3, 0.01)])

    def test_rejects_nonpositive_values(self):
        with pytest.raises(ValidationError, match="positive"):
            rate_fit([(1e-1, 1.0), (1e-2, -0.1), (1e-3, 0.01), (1e-4, 0.001)])

    def test_unknown_model(self):
        with pytest.raises(ValidationError, match="model"):
            rate_fit([(1e-1, 1.0)] * 4, model="cubic")


class TestMaximizer:
    LP = LogParams(1.0, 0.5)

    def test_exceeds_unperturbed_constant(self, grid, report):
        res = maximize_F(P0, self.LP, grid, report=report)
        assert res.value >= report.sigma_p + 1e-3
        assert dirichlet_norm(res.profile, P0) == pytest.approx(1.0, abs=1e-10)
        assert res.value == pytest.approx(J(res.profile, self.LP, P0), rel=1e-12)

    def test_seed_order_invariance(self, grid, report):
        seeds = (1e-2, 1e-3, 1e-4)
        a = maximize_F(P0, self.LP, grid, eps_seeds=seeds, report=report)
        b = maximize_F(P0, self.LP, grid, eps_seeds=seeds[::-1], report=report)
        assert a.value == b.value
        assert a.seed_epsilon == b.seed_epsilon

    def test_monotone_in_tau(self, grid, report):
        values = [maximize_F(P0, LogParams(tau, 0.5), grid, report=report,
                             max_iters=500).value
                  for tau in (1.0, math.e, 10.0)]
        assert values[0] <= values[1] <= values[2]

    def test_large_beta_approaches_unperturbed_constant(self, grid, report):
        res = maximize_F(P0, LogParams(1.0, 16.0), grid, report=report)
        assert abs(res.value - report.sigma_p) < 0.01

    def test_unresolvable_seeds_rejected(self, report):
        tiny = make_grid(16, 1.0)
        with pytest.raises(ValidationError, match="seed"):
            maximize_F(P0, self.LP, tiny, eps_seeds=(1e-5,), report=report)

    def test_unperturbed_variant_approaches_sigma_from_below(self, report):
        # seeds widen with the mesh so each bubble stays well resolved;
        # within that window the discrete supremum sits under sigma_p
        couplings = [(1000, (1e-2, 3e-3, 1e-3)),
                     (2000, (1e-2, 3e-3, 1e-3, 3e-4)),
                     (4000, (1e-2, 3e-3, 1e-3, 3e-4, 1e-4))]
        values = [maximize_F(P0, None, make_grid(m, 3.0), eps_seeds=seeds,
                             report=report).value
                  for m, seeds in couplings]
        assert all(values[i] < values[i + 1] for i in range(len(values) - 1))
        assert all(v < report.sigma_p for v in values)
        assert report.sigma_p - values[-1] < 5e-3


class TestBubbleLowerBound:
    LP = LogParams(1.0, 0.5)

    def test_within_slack_of_constant(self, grid, report):
        bb = bubble_lower_bound(P0, self.LP, (1e-2, 1e-3, 1e-4, 1e-5), grid,
                                report=report)
        assert isinstance(bb, BubbleBound)
        assert bb.best_value >= report.sigma_p - 1e-3

    def test_never_beats_the_maximizer(self, grid, report):
        seeds = (1e-2, 1e-3, 1e-4)
        bb = bubble_lower_bound(P0, self.LP, seeds, grid, report=report)
        res = maximize_F(P0, self.LP, grid, eps_seeds=seeds, report=report)
        assert bb.best_value <= res.value + 1e-9

    def test_random_unit_profiles_stay_below_computed_bound(self, grid, report):
        res = maximize_F(P0, self.LP, grid, report=report)
        rng = np.random.default_rng(31)
        for _ in range(20):
            u = normalize(random_smooth_profile(grid, rng), P0)
            assert J(u, self.LP, P0) <= res.value + 1e-9


class TestBetaSweep:
    def test_gap_collapses_monotonically(self, grid, report):
        rows, sigma_p = beta_sweep(P0, 1.0, (1.0, 4.0, 16.0), grid, report=report)
        gaps = [gap for _, _, gap in rows]
        assert all(gaps[i + 1] <= gaps[i] + 1e-9 for i in range(len(gaps) - 1))
        assert gaps[-1] < 0.01
        assert sigma_p == pytest.approx(report.sigma_p)


def _bubble_family(grid, eps_values, r0=0.2):
    rep = bliss.compute_S(DC0)
    a_hat = bliss.unit_norm_a_hat(rep, DC0)
    return [normalize(bliss.bubble_profile(bliss.BubbleSpec(e, a_hat, r0), grid, DC0), P0)
            for e in eps_values]


class TestNcsCheck:
    def test_bubble_family_is_ncs(self, grid):
        family = _bubble_family(grid, (1e-2, 1e-3, 1e-4))
        report = ncs_check(family, P0)
        assert report.is_ncs

    def test_constant_family_is_not(self, grid):
        u = _bubble_family(grid, (1e-2,))[0]
        report = ncs_check([u, u, u], P0)
        assert not report.is_ncs             # tail energy stuck
        assert report.normalized_ok

    def test_wrong_normalization_detected(self, grid):
        family = [u.scaled(2.0) for u in _bubble_family(grid, (1e-2, 1e-3, 1e-4))]
        report = ncs_check(family, P0)
        assert not report.normalized_ok

    def test_needs_three_profiles(self, grid):
        family = _bubble_family(grid, (1e-2, 1e-3))
        with pytest.raises(ValidationError, match="3 profiles"):
            ncs_check(family, P0)


class TestConcentrationLevel:
    def test_tau_e_family_below_bound(self, grid, report):
        family = _bubble_family(grid, (1e-2, 1e-3, 1e-4, 1e-5))
        ncs = ncs_check(family, P0)
        level = concentration_level_check(family, LogParams(math.e, 1.0), P0,
                                          report.sigma_p, tolerance=5e-3,
                                          tail_start=1, ncs_report=ncs)
        assert not level.skipped
        assert level.passed

    def test_non_concentrating_family_skipped(self, grid, report):
        u = _bubble_family(grid, (1e-2,))[0]
        ncs = ncs_check([u, u, u], P0)
        level = concentration_level_check([u, u, u], LogParams(1.0, 0.5), P0,
                                          report.sigma_p, ncs_report=ncs)
        assert level.skipped


class TestScalarStationarity:
    LP = LogParams(1.0, 0.5)

    def test_closed_form_when_factor_is_state_independent(self, grid):
        # at huge tau the factor barely sees t (variation O(|u|/(tau ln tau))),
        # so the root must match the explicit (||u||^p / K)^(1/(p*-p)) with K
        # evaluated at t = 1
        u = _bubble_family(grid, (1e-3,))[0].scaled(0.9)
        lp = LogParams(1e8, 0.5)
        n_p = dirichlet_norm(u, P0) ** 2
        t_star = solve_t_eps(u, lp, P0, bracket=(0.05, 2.0))
        t_pred = (n_p / J(u, lp, P0)) ** (1.0 / 4.0)
        assert t_star == pytest.approx(t_pred, rel=1e-6)

    def test_root_tends_to_one(self, grid):
        t_values = []
        for eps in (1e-3, 1e-4, 1e-5):
            u = _bubble_family(grid, (eps,))[0]
            t_values.append(solve_t_eps(u, self.LP, P0))
        assert abs(t_values[-1] - 1.0) < abs(t_values[0] - 1.0)
        assert abs(t_values[-1] - 1.0) < 0.05

    def test_residual_contract(self, grid):
        u = _bubble_family(grid, (1e-4,))[0]
        t_star = solve_t_eps(u, self.LP, P0)
        n_p = dirichlet_norm(u, P0) ** 2
        from hslog.functionals import log_factor_nodes
        from hslog.radial import weighted_integral

        k = weighted_integral(u.grid, np.abs(u.values) ** 6
                              * log_factor_nodes(u.grid.nodes, t_star * u.values, self.LP),
                              2.0)
        assert abs(t_star * n_p - t_star**5 * k) < 1e-10

    def test_no_sign_change_reported(self, grid):
        u = _bubble_family(grid, (1e-3,))[0]
        with pytest.raises(NumericalError, match="sign change"):
            solve_t_eps(u, self.LP, P0, bracket=(1e3, 2e3))


class TestMountainPass:
    LP = LogParams(1.0, 0.5)

    def test_gap_positive_and_ray_shape(self, grid, report):
        mp = mountain_pass_gap(bliss.BubbleSpec(1e-4, 1.0, 0.2), self.LP, P0, grid,
                               report=report)
        assert mp.threshold == pytest.approx(math.sqrt(3) * math.pi / 16, rel=1e-9)
        assert mp.max_energy < mp.threshold
        assert mp.gap > 0
        assert mp.energy_at_t_max_scan < 0     # far end of the ray is negative


class TestSphereScan:
    def test_small_spheres_have_positive_energy(self, grid):
        out = energy_sphere_scan(P0, LogParams(1.0, 0.5), grid,
                                 rho_list=(0.1, 0.2, 0.4), n_profiles=15)
        for rho, min_i in out.items():
            assert min_i > 0
