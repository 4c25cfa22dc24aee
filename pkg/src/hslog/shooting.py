"""Amplitude shooting for the radial quasilinear boundary-value problem.

First-order flux form of  -r^(-th) (r^a1 |u'|^(p-2) u')' = f(r, u):

    u' = sign(w) (|w| r^(-a1))^(1/(p-1)),
    w' = -r^th (ln(tau+|u|))^(r^beta) sign(u) |u|^(p*-1),

integrated from (u, w) = (amplitude, 0) at r_min with an adaptive embedded
Runge-Kutta pair.  Zero flux at r_min is the discrete stand-in for origin
regularity: it is the condition that makes the operator integrable against
test functions, the boundary data itself is only u(1) = 0.  The first step
off the w = 0 manifold is taken with a frozen-source series, which keeps
the start well behaved when |w|^(1/(p-1)) is not Lipschitz.

Shooting is plain bisection on the amplitude: the boundary map a -> u(1; a)
can be non-smooth through the log factor, so robustness beats order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from hslog.functionals import LogParams, energy_pairing
from hslog.params import (
    NumericalError,
    ParamSet,
    ValidationError,
    critical_exponent,
)
from hslog.radial import Grid, Profile, dirichlet_norm

_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)


@dataclass(frozen=True)
class IvpState:
    r: float
    u: float
    w: float


@dataclass(frozen=True)
class ShootResult:
    profile: Profile
    amplitude: float
    boundary_residual: float
    weak_residual: float
    bisection_iterations: int
    ivp_evaluations: int
    positive_inside: bool


def _source(r: float, u: float, lp: LogParams, ps: ParamSet, p_star: float) -> float:
    """(ln(tau+|u|))^(r^beta) sign(u) |u|^(p*-1); tau >= 1 keeps the log >= 0."""
    if u == 0.0:
        return 0.0
    x = math.log(lp.tau + abs(u))
    return x ** (r**lp.beta) * math.copysign(abs(u) ** (p_star - 1.0), u)


def _series_step(amplitude: float, r_min: float, r_boot: float, lp: LogParams,
                 ps: ParamSet, p_star: float) -> tuple[float, float]:
    """Frozen-source analytic step from the zero-flux start."""
    f0 = _source(r_min, amplitude, lp, ps, p_star)
    th1 = ps.theta + 1.0

    def w_of(r):
        return -f0 * (r**th1 - r_min**th1) / th1

    # u(r_boot) = amplitude - int (|w| s^-a1)^(1/(p-1)) ds, 16-pt GL
    s = 0.5 * (r_min + r_boot) + 0.5 * (r_boot - r_min) * _GL16_X
    wts = 0.5 * (r_boot - r_min) * _GL16_W
    du = np.sign(-f0) * (np.abs(w_of(s)) * s**-ps.alpha1) ** (1.0 / (ps.p - 1.0))
    return amplitude + float(np.sum(wts * du)), w_of(r_boot)


def ivp_integrate(amplitude: float, lp: LogParams, ps: ParamSet, r_min: float = 1e-7,
                  grid: Grid | None = None, rtol: float = 1e-10):
    """Integrate the flux system from r_min to 1.

    Returns (profile_or_None, dense_solution, info).  The profile is built
    when a grid is given: nodes below r_min carry the amplitude value.
    """
    if lp.tau < 1.0:
        raise ValidationError(f"the BVP source needs tau >= 1, got {lp.tau}")
    if not 0 < r_min <= 1e-4:
        raise ValidationError(f"need r_min in (0, 1e-4], got {r_min}")
    p_star = critical_exponent(ps)

    def rhs(r, y):
        u, w = y
        du = math.copysign((abs(w) * r**-ps.alpha1) ** (1.0 / (ps.p - 1.0)), w) if w else 0.0
        dw = -(r**ps.theta) * _source(r, u, lp, ps, p_star)
        return (du, dw)

    if amplitude == 0.0:
        sol = None
        last = IvpState(r=1.0, u=0.0, w=0.0)
        nfev = 0
    else:
        def blowup(r, y):
            return abs(y[0]) - 1e8 * max(1.0, abs(amplitude))

        blowup.terminal = True
        r_boot = 2.0 * r_min
        y_boot = _series_step(amplitude, r_min, r_boot, lp, ps, p_star)
        sol = solve_ivp(rhs, (r_boot, 1.0), y_boot, method="DOP853", rtol=rtol,
                        atol=1e-13 * max(1.0, abs(amplitude)), dense_output=True,
                        events=blowup)
        last = IvpState(r=float(sol.t[-1]), u=float(sol.y[0, -1]), w=float(sol.y[1, -1]))
        if not sol.success or sol.status == 1:
            raise NumericalError(
                f"IVP integration stalled at r = {last.r:.6g} "
                f"(amplitude {amplitude:g}, last good state u = {last.u:.3e}, "
                f"w = {last.w:.3e})"
            )
        nfev = int(sol.nfev)

    profile = None
    if grid is not None:
        vals = np.full(grid.m, float(amplitude))
        if sol is not None:
            above = grid.nodes >= 2.0 * r_min
            vals[above] = sol.sol(grid.nodes[above])[0]
        vals[-1] = last.u
        profile = Profile(grid, vals, value_at_origin=float(amplitude))
    return profile, sol, {"u_end": last.u, "nfev": nfev, "last_state": last}


def boundary_value(amplitude: float, lp: LogParams, ps: ParamSet, r_min: float = 1e-7,
                   rtol: float = 1e-10) -> float:
    """u(1; amplitude)."""
    _, _, info = ivp_integrate(amplitude, lp, ps, r_min=r_min, rtol=rtol)
    return info["u_end"]


def shoot(lp: LogParams, ps: ParamSet, bracket: tuple[float, float], grid: Grid,
          tol: float = 1e-8, r_min: float = 1e-7, max_iters: int = 200,
          test_count: int = 20, rtol: float = 1e-10) -> ShootResult:
    """Bisect the amplitude until |u(1)| < tol; certify the weak residual.

    The returned profile has its boundary node clamped to zero so it is a
    member of the discrete space; ``boundary_residual`` records the actual
    |u(1)| before clamping.
    """
    a_lo, a_hi = bracket
    if not 0 <= a_lo < a_hi:
        raise ValidationError(f"need 0 <= a_lo < a_hi, got {bracket}")
    # amplitude 0 is the trivial branch; small shots stay positive at r = 1
    f_lo = boundary_value(a_lo, lp, ps, r_min, rtol) if a_lo > 0 else 1.0
    f_hi = boundary_value(a_hi, lp, ps, r_min, rtol)
    evaluations = 2
    if f_lo == 0.0 or f_hi == 0.0:
        a_star, f_star = (a_lo, f_lo) if f_lo == 0.0 else (a_hi, f_hi)
    else:
        if f_lo * f_hi > 0:
            raise NumericalError(
                f"no sign change in amplitude bracket [{a_lo:g}, {a_hi:g}]: "
                f"u(1) = {f_lo:.3e} and {f_hi:.3e}"
            )
        a_star = f_star = None
        for _ in range(max_iters):
            mid = 0.5 * (a_lo + a_hi)
            f_mid = boundary_value(mid, lp, ps, r_min, rtol)
            evaluations += 1
            if abs(f_mid) < tol:
                a_star, f_star = mid, f_mid
                break
            if f_mid * f_lo > 0:
                a_lo, f_lo = mid, f_mid
            else:
                a_hi, f_hi = mid, f_mid
        if a_star is None:
            raise NumericalError(
                f"amplitude bisection did not reach |u(1)| < {tol:g} "
                f"in {max_iters} iterations"
            )

    profile, _, info = ivp_integrate(a_star, lp, ps, r_min=r_min, grid=grid, rtol=rtol)
    inner = profile.values[:-1]
    positive = bool(np.all(inner > 0.0))
    vals = profile.values.copy()
    vals[-1] = 0.0
    clamped = Profile(grid, vals, value_at_origin=profile.value_at_origin)
    wres = weak_residual(clamped, lp, ps, test_count=test_count)
    return ShootResult(
        profile=clamped,
        amplitude=a_star,
        boundary_residual=abs(f_star),
        weak_residual=wres,
        bisection_iterations=evaluations,
        ivp_evaluations=info["nfev"],
        positive_inside=positive,
    )


def weak_test_profiles(grid: Grid, count: int) -> list[Profile]:
    """Low-frequency sine bumps and log-spaced tents, all vanishing at r = 1."""
    r = grid.nodes
    battery = []
    n_sines = (count + 1) // 2
    for k in range(1, n_sines + 1):
        battery.append(Profile(grid, np.sin(k * math.pi * (1.0 - r))))
    n_tents = count - n_sines
    centers = np.exp(np.linspace(math.log(2e-3), math.log(0.7), max(n_tents, 1)))
    for c in centers[:n_tents]:
        width = 0.75 * c
        vals = np.maximum(0.0, 1.0 - np.abs(r - c) / width)
        vals[-1] = 0.0
        battery.append(Profile(grid, vals))
    return battery


def weak_residual(u: Profile, lp: LogParams, ps: ParamSet, test_count: int = 20) -> float:
    """max over the test battery of |<I'(u), v>| / ||v||."""
    worst = 0.0
    for v in weak_test_profiles(u.grid, test_count):
        nrm = dirichlet_norm(v, ps)
        if nrm == 0.0:
            continue
        worst = max(worst, abs(energy_pairing(u, v, lp, ps)) / nrm)
    return worst
