"""The log-perturbed functionals, hypothesis checks, and the energy.

Central objects, all over the measure r^theta dr on (0, 1):

    J(u)    = int r^th |u|^p* |ln(tau+|u|)|^(r^beta) dr
    J0(u)   = int r^th |u|^p* dr
    I(u)    = (1/p)||u||^p - (1/p*) J(u) + int r^th G(r, u) dr
    <I'(u),v> = int r^a1 |u'|^(p-2) u' v' dr
              - int r^th sign(u)|u|^(p*-1) (ln(tau+|u|))^(r^beta) v dr

with g(r,s) = r^beta sign(s)|s|^p* / (p* (tau+|s|) (ln(tau+|s|))^(1-r^beta))
and G its primitive in s.  The g-term in I' cancels against the
beta-derivative of the log factor, so the pairing above is the exact
gradient of the discrete energy; this is what the finite-difference
consistency tests exercise.

Conventions: the exponent r^beta is 0 at r = 0 and we set 0^0 = 1, so the
integrand is continuous at the origin.  tau < 1 is accepted in J (the
absolute value keeps it meaningful) but rejected in g/G/energy, which are
only defined for tau >= 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from hslog.params import ParamSet, ValidationError, critical_exponent
from hslog.radial import Profile, dirichlet_norm, weighted_integral

_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class LogParams:
    tau: float
    beta: float

    def __post_init__(self):
        if not (self.tau > 0 and self.beta > 0):
            raise ValidationError(f"need tau > 0 and beta > 0, got {self.tau}, {self.beta}")


@dataclass(frozen=True)
class HypothesisSet:
    """A variable exponent phi with the constants and windows for (h1)-(h3)."""

    phi: Callable[[np.ndarray], np.ndarray]
    sigma: float
    c: float
    r_small: tuple[float, float] = (1e-12, 1e-8)
    r_large: tuple[float, float] = (0.875, 1.0 - 2.0**-24)

    def __post_init__(self):
        if not self.sigma > 1:
            raise ValidationError(f"need sigma > 1, got {self.sigma}")
        if not self.c > 0:
            raise ValidationError(f"need c > 0, got {self.c}")


def log_factor(r: float, u: float, lp: LogParams) -> float:
    """|ln(tau+|u|)|^(r^beta) with 0^0 = 1 at the origin."""
    if r == 0.0:
        return 1.0
    x = abs(math.log(lp.tau + abs(u)))
    return x ** (r**lp.beta)


def log_factor_nodes(r: np.ndarray, u: np.ndarray, lp: LogParams) -> np.ndarray:
    x = np.abs(np.log(lp.tau + np.abs(u)))
    return x ** (r**lp.beta)


def J(u: Profile, lp: LogParams, ps: ParamSet) -> float:
    """The log-perturbed critical integral."""
    p_star = critical_exponent(ps)
    r = u.grid.nodes
    f = np.abs(u.values) ** p_star * log_factor_nodes(r, u.values, lp)
    return weighted_integral(u.grid, f, ps.theta)


def J_phi(u: Profile, tau: float, hs: HypothesisSet, ps: ParamSet) -> float:
    """Same integral with a general variable exponent phi(r); reduces to
    :func:`J` when phi(r) = r^beta."""
    if tau <= 0:
        raise ValidationError(f"need tau > 0, got {tau}")
    p_star = critical_exponent(ps)
    r = u.grid.nodes
    x = np.abs(np.log(tau + np.abs(u.values)))
    f = np.abs(u.values) ** p_star * x ** np.asarray(hs.phi(r), dtype=float)
    return weighted_integral(u.grid, f, ps.theta)


def sobolev_J0(u: Profile, ps: ParamSet) -> float:
    """The unperturbed critical integral int r^th |u|^p* dr."""
    p_star = critical_exponent(ps)
    return weighted_integral(u.grid, np.abs(u.values) ** p_star, ps.theta)


@dataclass(frozen=True)
class HConditionReport:
    h1_passed: bool
    h2_passed: bool
    h3_passed: bool
    h2_max: float
    h3_worst_margin: float

    @property
    def all_passed(self) -> bool:
        return self.h1_passed and self.h2_passed and self.h3_passed


def check_h_conditions(hs: HypothesisSet, samples: int = 200) -> HConditionReport:
    """Numerical check of the three variable-exponent hypotheses.

    (h1) phi(0) = 0 and phi > 0 on a dense sample of (0, 1).
    (h2) phi(r) |ln r|^sigma ln|ln r| <= c on the small-r window.
    (h3) phi(r)/|ln(1-r)| at r_k = 1 - 2^-k must stay below the declining
         schedule 1/ln(k+1); a limit cannot be tested, the schedule makes
         the vanishing-ratio requirement falsifiable.
    """
    phi0 = float(np.asarray(hs.phi(np.array([0.0])))[0])
    interior = np.linspace(1e-6, 1.0 - 1e-6, samples)
    h1 = phi0 == 0.0 and bool(np.all(np.asarray(hs.phi(interior)) > 0))

    lo, hi = hs.r_small
    rs = np.exp(np.linspace(math.log(lo), math.log(hi), samples))
    q2 = np.asarray(hs.phi(rs)) * np.abs(np.log(rs)) ** hs.sigma * np.log(np.abs(np.log(rs)))
    h2_max = float(np.max(q2))
    h2 = h2_max <= hs.c

    ks = np.arange(3, 25)
    rk = 1.0 - 2.0 ** (-ks.astype(float))
    window = (rk >= hs.r_large[0]) & (rk <= hs.r_large[1])
    ks, rk = ks[window], rk[window]
    ratios = np.asarray(hs.phi(rk)) / np.abs(np.log(1.0 - rk))
    schedule = 1.0 / np.log(ks + 1.0)
    margins = schedule - ratios
    h3_worst = float(np.min(margins)) if margins.size else float("nan")
    h3 = bool(margins.size) and bool(np.all(margins >= 0))
    return HConditionReport(
        h1_passed=h1, h2_passed=h2, h3_passed=h3, h2_max=h2_max, h3_worst_margin=h3_worst
    )


def _require_tau_ge_1(lp: LogParams, what: str) -> None:
    if lp.tau < 1.0:
        raise ValidationError(f"{what} is only defined for tau >= 1, got tau = {lp.tau}")


def g_eval(r: float, s_val: float, lp: LogParams, ps: ParamSet) -> float:
    """g(r, s); odd in s, identically 0 at r = 0."""
    _require_tau_ge_1(lp, "g")
    if r == 0.0 or s_val == 0.0:
        return 0.0
    p_star = critical_exponent(ps)
    a = abs(s_val)
    x = math.log(lp.tau + a)
    if x <= 0.0:
        return 0.0
    e = r**lp.beta
    return math.copysign(e * a**p_star, s_val) / (p_star * (lp.tau + a) * x ** (1.0 - e))


def _g_nodes(r: np.ndarray, s: np.ndarray, lp: LogParams, ps: ParamSet) -> np.ndarray:
    p_star = critical_exponent(ps)
    a = np.abs(s)
    x = np.log(lp.tau + a)
    e = r**lp.beta
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.sign(s) * e * a**p_star / (p_star * (lp.tau + a) * x ** (1.0 - e))
    # x underflows to 0 when tau = 1 and |s| < 1 ulp; the s-power wins there
    return np.where((r == 0.0) | (s == 0.0) | (x <= 0.0), 0.0, out)


def G_eval(r: float, u_val: float, lp: LogParams, ps: ParamSet) -> float:
    """G(r, u) = int_0^u g(r, s) ds by 16-point Gauss-Legendre; even in u."""
    _require_tau_ge_1(lp, "G")
    if r == 0.0 or u_val == 0.0:
        return 0.0
    s = 0.5 * u_val * (_GL16_X + 1.0)
    w = 0.5 * u_val * _GL16_W
    return float(np.sum(w * _g_nodes(np.full_like(s, r), s, lp, ps)))


def _G_nodes(r: np.ndarray, u: np.ndarray, lp: LogParams, ps: ParamSet) -> np.ndarray:
    s = 0.5 * u[None, :] * (_GL16_X[:, None] + 1.0)
    w = 0.5 * u[None, :] * _GL16_W[:, None]
    rr = np.broadcast_to(r[None, :], s.shape)
    return np.sum(w * _g_nodes(rr, s, lp, ps), axis=0)


def energy_I(u: Profile, lp: LogParams, ps: ParamSet) -> float:
    """The mountain-pass energy I(u)."""
    _require_tau_ge_1(lp, "the energy")
    p_star = critical_exponent(ps)
    nrm = dirichlet_norm(u, ps)
    g_term = weighted_integral(u.grid, _G_nodes(u.grid.nodes, u.values, lp, ps), ps.theta)
    return nrm**ps.p / ps.p - J(u, lp, ps) / p_star + g_term


def energy_pairing(u: Profile, v: Profile, lp: LogParams, ps: ParamSet) -> float:
    """<I'(u), v>: Dirichlet pairing minus the critical source term.

    The source carries sign(u)|u|^(p*-1), the odd form that matches both the
    equation's right-hand side and the derivative of the discrete energy.
    """
    _require_tau_ge_1(lp, "the pairing")
    if u.grid is not v.grid and not np.array_equal(u.grid.nodes, v.grid.nodes):
        raise ValidationError("pairing requires profiles on the same grid")
    p_star = critical_exponent(ps)
    moments = u.grid.cell_moments(ps.alpha1)
    su, sv = u.slopes(), v.slopes()
    term1 = float(np.sum(moments * np.sign(su) * np.abs(su) ** (ps.p - 1.0) * sv))
    r, uu = u.grid.nodes, u.values
    x = np.log(lp.tau + np.abs(uu))
    f = np.sign(uu) * np.abs(uu) ** (p_star - 1.0) * x ** (r**lp.beta) * v.values
    term2 = weighted_integral(u.grid, f, ps.theta)
    return term1 - term2
