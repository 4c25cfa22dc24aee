"""Constrained maximization, rate fitting, and concentration diagnostics.

The maximizer runs projected gradient ascent on the unit Dirichlet sphere:
the search direction is the L^2_theta representative of dJ (pointwise
values, well scaled on graded meshes), steps are clipped to nonnegative
values with the boundary node pinned at zero, renormalized, and accepted
under Armijo backtracking.  Multi-start over bubble seeds keeps the best
result with a deterministic tie-break, so permuting the seed order cannot
change the answer.

Rate fits are least squares in log-log coordinates, optionally dividing
out a ln|ln eps| factor first ("power-times-loglog"), which is the model
family behind every asymptotic acceptance check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from hslog import bliss
from hslog.functionals import LogParams, J, log_factor_nodes
from hslog.params import (
    DerivedConstants,
    NumericalError,
    ParamSet,
    ValidationError,
    critical_exponent,
    derived_constants,
)
from hslog.radial import Grid, Profile, dirichlet_norm, lq_norm, weighted_integral

RATE_MODELS = ("pure-power", "power-times-loglog")


@dataclass(frozen=True)
class RateTable:
    abscissae: tuple[float, ...]
    ordinates: tuple[float, ...]
    fitted_exponent: float
    fit_residual: float
    model: str


def rate_fit(pairs, model: str = "power-times-loglog") -> RateTable:
    """Least-squares exponent of value ~ C eps^e (optionally * ln|ln eps|)."""
    if model not in RATE_MODELS:
        raise ValidationError(f"unknown rate model {model!r}, expected one of {RATE_MODELS}")
    pts = sorted(((float(e), float(v)) for e, v in pairs), key=lambda t: -t[0])
    if len(pts) < 4:
        raise ValidationError(f"rate fit needs at least 4 points, got {len(pts)}")
    eps = np.array([e for e, _ in pts])
    val = np.array([v for _, v in pts])
    if np.any(val <= 0):
        raise ValidationError("rate fit needs strictly positive values")
    x = np.log(eps)
    y = np.log(val)
    if model == "power-times-loglog":
        y = y - np.log(np.log(np.abs(np.log(eps))))
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return RateTable(
        abscissae=tuple(eps),
        ordinates=tuple(val),
        fitted_exponent=float(slope),
        fit_residual=resid,
        model=model,
    )


# --- constrained maximization ----------------------------------------------


@dataclass(frozen=True)
class MaximizeResult:
    profile: Profile
    value: float
    iterations: int
    converged: bool
    seed_epsilon: float


def _grad_J_values(u: Profile, lp: LogParams | None, ps: ParamSet) -> np.ndarray:
    """Gradient of J with respect to the nodal values (weights folded in).

    ``lp = None`` selects the unperturbed objective (log factor off).
    """
    p_star = critical_exponent(ps)
    r, v = u.grid.nodes, u.values
    if lp is None:
        grad = p_star * v ** (p_star - 1.0)
        return u.grid.quad_weights(ps.theta) * np.where(v > 0.0, grad, 0.0)
    e = r**lp.beta
    x = np.log(lp.tau + v)
    with np.errstate(divide="ignore", invalid="ignore"):
        grad = p_star * v ** (p_star - 1.0) * x**e + v**p_star * e * x ** (e - 1.0) / (
            lp.tau + v
        )
    return u.grid.quad_weights(ps.theta) * np.where((v > 0.0) & (x > 0.0), grad, 0.0)


def _project(vals: np.ndarray, grid: Grid, ps: ParamSet) -> np.ndarray | None:
    vals = np.maximum(vals, 0.0)
    vals[-1] = 0.0
    prof = Profile(grid, vals)
    nrm = dirichlet_norm(prof, ps)
    if nrm == 0.0:
        return None
    return vals / nrm


def maximize_F(
    ps: ParamSet,
    lp: LogParams | None,
    grid: Grid,
    eps_seeds=(1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 1e-5),
    max_iters: int = 5000,
    rel_tol: float = 1e-10,
    report: bliss.ConstantsReport | None = None,
    r0: float = 0.2,
) -> MaximizeResult:
    """Projected-ascent lower bound for the constrained supremum F.

    tau >= 1 is the attainability regime but any tau > 0 is accepted. The
    returned value is J at a feasible unit-norm profile, hence always a
    certified lower bound.  Passing ``lp = None`` maximizes the unperturbed
    critical integral instead; that variant approaches sigma_p from below
    under mesh refinement.
    """
    dc = derived_constants(ps)
    if report is None:
        report = bliss.compute_S(dc)
    a_hat = bliss.unit_norm_a_hat(report, dc)

    candidates: list[MaximizeResult] = []
    for eps in eps_seeds:
        if grid.r1 > eps / 10.0:
            continue
        start = bliss.bubble_profile(bliss.BubbleSpec(eps, a_hat, r0), grid, dc)
        vals = _project(start.values.copy(), grid, ps)
        if vals is None:
            continue
        candidates.append(_ascend(vals, eps, ps, lp, grid, max_iters, rel_tol))
    if not candidates:
        raise ValidationError("no bubble seed is resolvable on this grid")
    # highest value wins; exact ties resolved toward the smallest seed
    candidates.sort(key=lambda c: (-c.value, c.seed_epsilon))
    return candidates[0]


def _objective(u: Profile, lp: LogParams | None, ps: ParamSet) -> float:
    from hslog.functionals import sobolev_J0

    return sobolev_J0(u, ps) if lp is None else J(u, lp, ps)


def _ascend(vals, seed_eps, ps, lp, grid, max_iters, rel_tol) -> MaximizeResult:
    u = Profile(grid, vals)
    value = _objective(u, lp, ps)
    step = 0.25
    iterations = 0
    converged = False
    for iterations in range(1, max_iters + 1):
        direction = _grad_J_values(u, lp, ps)
        scale = float(np.linalg.norm(direction))
        if scale == 0.0:
            converged = True
            break
        accepted = False
        while step >= 1e-16:
            trial = _project(u.values + (step / scale) * direction, grid, ps)
            if trial is not None:
                cand = Profile(grid, trial)
                cand_val = _objective(cand, lp, ps)
                if cand_val > value:
                    improvement = cand_val - value
                    u, value = cand, cand_val
                    step *= 1.3
                    accepted = True
                    break
            step *= 0.5
        if not accepted:
            converged = True
            break
        if improvement < rel_tol * max(abs(value), 1.0):
            converged = True
            break
    return MaximizeResult(
        profile=u, value=value, iterations=iterations, converged=converged,
        seed_epsilon=seed_eps,
    )


@dataclass(frozen=True)
class BubbleBound:
    best_value: float
    best_epsilon: float
    table: tuple[tuple[float, float], ...]


def bubble_lower_bound(ps: ParamSet, lp: LogParams, eps_list, grid: Grid,
                       report: bliss.ConstantsReport | None = None,
                       r0: float = 0.2) -> BubbleBound:
    """Best J over normalized cutoff bubbles; a certified lower bound for F."""
    dc = derived_constants(ps)
    if report is None:
        report = bliss.compute_S(dc)
    a_hat = bliss.unit_norm_a_hat(report, dc)
    rows = []
    for eps in eps_list:
        u = bliss.bubble_profile(bliss.BubbleSpec(eps, a_hat, r0), grid, dc)
        nrm = dirichlet_norm(u, ps)
        rows.append((float(eps), J(u.scaled(1.0 / nrm), lp, ps)))
    best_eps, best_val = max(rows, key=lambda t: (t[1], -t[0]))
    return BubbleBound(best_value=best_val, best_epsilon=best_eps, table=tuple(rows))


def beta_sweep(ps: ParamSet, tau: float, beta_list, grid: Grid, **opts):
    """maximize_F per beta; returns (rows, sigma_p) with rows (beta, F_hat, gap)."""
    dc = derived_constants(ps)
    report = opts.pop("report", None) or bliss.compute_S(dc)
    rows = []
    for beta in beta_list:
        res = maximize_F(ps, LogParams(tau=tau, beta=float(beta)), grid,
                         report=report, **opts)
        rows.append((float(beta), res.value, abs(res.value - report.sigma_p)))
    return rows, report.sigma_p


# --- concentration diagnostics ----------------------------------------------


def tail_energy(u: Profile, ps: ParamSet, r0: float) -> float:
    """int_{r0}^1 r^alpha1 |u'|^p dr, exact for the discrete class."""
    r = u.grid.nodes
    a = np.maximum(r[:-1], r0)
    b = r[1:]
    mask = b > a
    mom = (b[mask] ** (ps.alpha1 + 1) - a[mask] ** (ps.alpha1 + 1)) / (ps.alpha1 + 1)
    return float(np.sum(mom * np.abs(u.slopes()[mask]) ** ps.p))


@dataclass(frozen=True)
class NCSReport:
    norms: tuple[float, ...]
    tails: dict
    lp_theta_norms: tuple[float, ...]
    normalized_ok: bool
    tails_ok: bool
    lp_decreasing: bool

    @property
    def is_ncs(self) -> bool:
        return self.normalized_ok and self.tails_ok and self.lp_decreasing


def ncs_check(profiles, ps: ParamSet, r0_list=(0.1, 0.3, 0.5), tail_tol: float = 1e-2,
              norm_tol: float = 1e-8) -> NCSReport:
    """Check the three defining properties of a concentrating family.

    Normalization is exact-to-tolerance; escape of the Dirichlet energy is
    checked per cut radius (decreasing tails ending below ``tail_tol``);
    weak convergence to 0 is surrogated by decreasing L^p_theta norms.
    """
    if len(profiles) < 3:
        raise ValidationError(f"NCS check needs at least 3 profiles, got {len(profiles)}")
    norms = tuple(dirichlet_norm(u, ps) for u in profiles)
    normalized_ok = all(abs(n - 1.0) <= norm_tol for n in norms)
    tails = {}
    tails_ok = True
    for r0 in r0_list:
        t = tuple(tail_energy(u, ps, r0) for u in profiles)
        tails[float(r0)] = t
        mono = all(t[i + 1] <= t[i] for i in range(len(t) - 1))
        tails_ok = tails_ok and mono and t[-1] < tail_tol
    lp_norms = tuple(lq_norm(u, ps.p, ps.theta) for u in profiles)
    lp_decreasing = all(lp_norms[i + 1] < lp_norms[i] for i in range(len(lp_norms) - 1))
    return NCSReport(
        norms=norms, tails=tails, lp_theta_norms=lp_norms,
        normalized_ok=normalized_ok, tails_ok=tails_ok, lp_decreasing=lp_decreasing,
    )


@dataclass(frozen=True)
class ConcentrationLevelReport:
    j_values: tuple[float, ...]
    tail_max: float
    bound: float
    passed: bool
    skipped: bool


def concentration_level_check(profiles, lp: LogParams, ps: ParamSet, sigma_p: float,
                              tolerance: float = 5e-3, tail_start: int = 0,
                              ncs_report: NCSReport | None = None) -> ConcentrationLevelReport:
    """Compare the running max of J over the family tail against sigma_p.

    When an NCS report is supplied and fails, the bound is inapplicable and
    the check is reported as skipped.
    """
    j_values = tuple(J(u, lp, ps) for u in profiles)
    if ncs_report is not None and not ncs_report.is_ncs:
        return ConcentrationLevelReport(j_values, float("nan"), sigma_p + tolerance,
                                        passed=False, skipped=True)
    tail = j_values[tail_start:]
    tail_max = max(tail) if tail else float("nan")
    bound = sigma_p + tolerance
    return ConcentrationLevelReport(j_values, tail_max, bound,
                                    passed=bool(tail and tail_max <= bound), skipped=False)


# --- the scalar stationarity equation and the level gap ---------------------


def solve_t_eps(u_eps: Profile, lp: LogParams, ps: ParamSet,
                bracket: tuple[float, float] = (0.5, 2.0), tol: float = 1e-10) -> float:
    """Root of t^(p-1) ||u||^p = t^(p*-1) int r^th |u|^p* (ln(tau+t|u|))^(r^b) dr."""
    if lp.tau < 1.0:
        raise ValidationError(f"the stationarity equation needs tau >= 1, got {lp.tau}")
    p_star = critical_exponent(ps)
    n_p = dirichlet_norm(u_eps, ps) ** ps.p
    r, v = u_eps.grid.nodes, u_eps.values
    vp = np.abs(v) ** p_star

    def k_of_t(t: float) -> float:
        return weighted_integral(u_eps.grid, vp * log_factor_nodes(r, t * v, lp), ps.theta)

    def h(t: float) -> float:
        return t ** (ps.p - 1.0) * n_p - t ** (p_star - 1.0) * k_of_t(t)

    lo, hi = bracket
    h_lo, h_hi = h(lo), h(hi)
    if h_lo == 0.0:
        return lo
    if h_hi == 0.0:
        return hi
    if h_lo * h_hi > 0:
        raise NumericalError(f"no sign change in bracket [{lo}, {hi}] for t_eps")
    t_star = float(brentq(h, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200))
    scale = max(1.0, abs(t_star ** (ps.p - 1.0) * n_p))
    if abs(h(t_star)) >= tol * scale:
        raise NumericalError(f"t_eps residual {h(t_star):.3e} above tolerance")
    return t_star


@dataclass(frozen=True)
class MountainPassResult:
    max_energy: float
    t_at_max: float
    threshold: float
    gap: float
    energy_at_t_max_scan: float


def mountain_pass_gap(spec: bliss.BubbleSpec, lp: LogParams, ps: ParamSet, grid: Grid,
                      report: bliss.ConstantsReport | None = None,
                      t_lo: float = 1e-2, t_hi: float = 10.0,
                      scan_points: int = 60) -> MountainPassResult:
    """Scan-and-polish max of t -> I(t u_eps) against the non-compactness level.

    The reported quantity is the bubble-path upper bound for the mountain
    pass level, not the infimum over all paths.
    """
    from hslog.functionals import energy_I

    dc = derived_constants(ps)
    if report is None:
        report = bliss.compute_S(dc)
    p_star = critical_exponent(ps)
    threshold = (1.0 / ps.p - 1.0 / p_star) * report.S_power

    u = bliss.bubble_profile(spec, grid, dc)

    def energy_at(t: float) -> float:
        return energy_I(u.scaled(t), lp, ps)

    ts = np.exp(np.linspace(math.log(t_lo), math.log(t_hi), scan_points))
    vals = np.array([energy_at(t) for t in ts])
    i = int(np.argmax(vals))
    lo = ts[max(0, i - 1)]
    hi = ts[min(scan_points - 1, i + 1)]
    res = minimize_scalar(lambda t: -energy_at(t), bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-12})
    max_energy = float(-res.fun)
    return MountainPassResult(
        max_energy=max_energy,
        t_at_max=float(res.x),
        threshold=threshold,
        gap=threshold - max_energy,
        energy_at_t_max_scan=float(vals[-1]),
    )


# --- shared helpers ----------------------------------------------------------


def random_smooth_profile(grid: Grid, rng: np.random.Generator, modes: int = 5) -> Profile:
    """Random low-frequency superposition vanishing at r = 1."""
    r = grid.nodes
    vals = np.zeros_like(r)
    for k in range(1, modes + 1):
        vals += rng.normal() / k * np.sin(k * math.pi * (1.0 - r))
    vals[-1] = 0.0
    return Profile(grid, vals)


def energy_sphere_scan(ps: ParamSet, lp: LogParams, grid: Grid, rho_list=(0.1, 0.2, 0.4),
                       n_profiles: int = 25, seed: int = 2024):
    """Empirical min of I over random profiles on each sphere ||u|| = rho."""
    from hslog.functionals import energy_I

    rng = np.random.default_rng(seed)
    profiles = []
    for _ in range(n_profiles):
        u = random_smooth_profile(grid, rng)
        nrm = dirichlet_norm(u, ps)
        if nrm > 0:
            profiles.append(u.scaled(1.0 / nrm))
    out = {}
    for rho in rho_list:
        out[float(rho)] = min(energy_I(u.scaled(rho), lp, ps) for u in profiles)
    return out
