"""The Young-function family Gamma_{a,b}, its convexity certificates, and
the Luxemburg norm of the log-perturbed modular.

Gamma_{a,b}(t) = t^a |ln(tau+t)|^b with a > 1, 0 <= b <= 1, tau >= 1.
Convexity is certified two independent ways: second divided differences on
a wide log grid, and positivity of

    Phi_tau(t) = a(a-1) h_tau(t)^2 + b [a h_tau(t) + b - 1],
    h_tau(t)   = (tau+t) ln(tau+t) / t  >= 1,

whose lower bound a(a-1) + b(a+b-1) > 0 is exact.

The Luxemburg norm inf{lambda : rho(u/lambda) <= 1} uses the modular
rho(v) = int r^th |v|^p* |ln(tau+|v|)|^(r^beta) dr, which is strictly
decreasing in lambda for u != 0, so bracket-doubling plus bisection always
terminates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hslog.functionals import LogParams, J
from hslog.params import NumericalError, ParamSet, ValidationError
from hslog.radial import Profile, dirichlet_norm, lq_norm


@dataclass(frozen=True)
class GammaSpec:
    a: float
    b: float
    tau: float = 1.0

    def __post_init__(self):
        if not self.a > 1:
            raise ValidationError(f"need a > 1, got {self.a}")
        if not 0 <= self.b <= 1:
            raise ValidationError(f"need 0 <= b <= 1, got {self.b}")
        if not self.tau >= 1:
            raise ValidationError(f"need tau >= 1, got {self.tau}")


def gamma_value(t, spec: GammaSpec):
    """Gamma_{a,b}(t); Gamma(0) = 0 by convention."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValidationError("Gamma is defined on t >= 0")
    out = np.where(t > 0, t**spec.a * np.abs(np.log(spec.tau + t)) ** spec.b, 0.0)
    return float(out) if out.ndim == 0 else out


def h_tau(t, spec: GammaSpec):
    t = np.asarray(t, dtype=float)
    return (spec.tau + t) * np.log(spec.tau + t) / t


def phi_tau(t, spec: GammaSpec):
    """The positivity target from the convexity computation."""
    h = h_tau(t, spec)
    return spec.a * (spec.a - 1.0) * h * h + spec.b * (spec.a * h + spec.b - 1.0)


@dataclass(frozen=True)
class ConvexityReport:
    min_scaled_second_difference: float
    min_phi: float
    phi_lower_bound: float
    second_differences_ok: bool
    phi_ok: bool

    @property
    def convex(self) -> bool:
        return self.second_differences_ok and self.phi_ok


def convexity_check(spec: GammaSpec, t_lo: float = 1e-6, t_hi: float = 1e6,
                    points: int = 481, tol: float = 1e-12) -> ConvexityReport:
    """Certify convexity on a log grid spanning >= 10 decades.

    Second divided differences must exceed -tol * scale, with the local
    curvature magnitude as scale; Phi_tau must stay above its exact lower
    bound a(a-1) + b(a+b-1).
    """
    if math.log10(t_hi / t_lo) < 10:
        raise ValidationError("convexity grid must span at least 10 decades")
    t = np.exp(np.linspace(math.log(t_lo), math.log(t_hi), points))
    f = gamma_value(t, spec)
    tm, t0, tp = t[:-2], t[1:-1], t[2:]
    fm, f0, fp = f[:-2], f[1:-1], f[2:]
    # 2 * second divided difference = quadratic-fit f''
    d2 = 2.0 * ((fp - f0) / (tp - t0) - (f0 - fm) / (t0 - tm)) / (tp - tm)
    scale = np.maximum.reduce([fm, f0, fp]) / t0**2
    second_ok = bool(np.all(d2 >= -tol * scale))

    phi = phi_tau(t, spec)
    bound = spec.a * (spec.a - 1.0) + spec.b * (spec.a + spec.b - 1.0)
    return ConvexityReport(
        min_scaled_second_difference=float(np.min(d2 / scale)),
        min_phi=float(np.min(phi)),
        phi_lower_bound=bound,
        second_differences_ok=second_ok,
        phi_ok=bool(np.all(phi >= bound - 1e-12 * abs(bound))),
    )


def modular(u: Profile, lam: float, lp: LogParams, ps: ParamSet) -> float:
    """rho(u/lambda) for the log-perturbed modular."""
    return J(u.scaled(1.0 / lam), lp, ps)


def luxemburg_norm(u: Profile, lp: LogParams, ps: ParamSet, tol: float = 1e-8,
                   max_iters: int = 200) -> float:
    """lambda* with rho(u/lambda*) = 1, by bracket doubling and bisection.

    Bisection continues past the modular tolerance until the lambda
    interval is relatively tight, so the norm itself inherits close to
    full precision (needed for the homogeneity contract).
    """
    if lp.tau < 1.0:
        raise ValidationError(f"the Luxemburg norm needs tau >= 1, got {lp.tau}")
    if not np.any(u.values != 0.0):
        return 0.0
    lam = lq_norm(u, (ps.theta + 1) * ps.p / (ps.alpha1 - ps.p + 1), ps.theta)
    if lam == 0.0:
        return 0.0
    lo = hi = lam
    for _ in range(max_iters):
        if modular(u, hi, lp, ps) < 1.0:
            break
        hi *= 2.0
    else:
        raise NumericalError("could not bracket the Luxemburg norm from above")
    for _ in range(max_iters):
        if modular(u, lo, lp, ps) > 1.0:
            break
        lo *= 0.5
    else:
        raise NumericalError("could not bracket the Luxemburg norm from below")
    for _ in range(max_iters):
        mid = 0.5 * (lo + hi)
        rho = modular(u, mid, lp, ps)
        if rho > 1.0:
            lo = mid
        else:
            hi = mid
        if abs(rho - 1.0) < tol and (hi - lo) <= 1e-13 * hi:
            return mid
    raise NumericalError("Luxemburg bisection did not converge")


@dataclass(frozen=True)
class EmbeddingRow:
    profile_id: int
    luxemburg: float
    dirichlet: float
    ratio: float
    passed: bool


@dataclass(frozen=True)
class EmbeddingReport:
    rows: tuple[EmbeddingRow, ...]
    lambda0: float

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)


def embedding_check(profiles, lp: LogParams, ps: ParamSet, lambda0: float,
                    f_hat: float | None = None) -> EmbeddingReport:
    """Verify ||u||_Luxemburg <= lambda0 ||u|| on a profile set.

    Callers choose lambda0 with lambda0^p* >= 1.05 * (computed lower bound
    for the constrained supremum); pass ``f_hat`` to have that precondition
    enforced here.
    """
    if f_hat is not None:
        p_star = (ps.theta + 1) * ps.p / (ps.alpha1 - ps.p + 1)
        if lambda0**p_star < 1.05 * f_hat:
            raise ValidationError(
                f"lambda0^p* = {lambda0**p_star:.6g} below 1.05 * F_hat = {1.05 * f_hat:.6g}"
            )
    rows = []
    for i, u in enumerate(profiles):
        lux = luxemburg_norm(u, lp, ps)
        diri = dirichlet_norm(u, ps)
        ratio = lux / diri if diri > 0 else 0.0
        rows.append(EmbeddingRow(i, lux, diri, ratio, lux <= lambda0 * diri + 1e-12))
    return EmbeddingReport(rows=tuple(rows), lambda0=lambda0)
