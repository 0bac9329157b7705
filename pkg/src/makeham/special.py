"""Special functions and generic numerics backing the mixture analytics.

Provides the upper incomplete gamma function for real (including negative)
shape, the Gauss hypergeometric function evaluated through its Euler
integral, adaptive quadrature with infinite-interval support, and bracketed
root finding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy import integrate as _scipy_integrate
from scipy.optimize import brentq
from scipy.special import exp1

__all__ = [
    "QuadratureConfig",
    "DEFAULT_QUADRATURE",
    "DomainError",
    "ConvergenceError",
    "BracketError",
    "integrate",
    "find_root",
    "upper_incomplete_gamma",
    "gauss_2f1",
]


class DomainError(ValueError):
    """Argument outside the mathematical domain of a special function."""


class BracketError(ValueError):
    """Root bracket does not straddle a sign change."""


class ConvergenceError(RuntimeError):
    """Adaptive integration exhausted its subdivision budget.

    Carries the best available estimate and its error bound.
    """

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be > 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureConfig()


def integrate(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Adaptive quadrature of ``f`` over ``[lower, upper]``.

    ``upper`` may be ``math.inf``; the half-line is mapped onto [0, 1) with
    t = lower + s/(1-s), which is smooth for exponentially decaying
    integrands. Integrable endpoint singularities are handled by the
    underlying adaptive Gauss-Kronrod rule. Raises ConvergenceError when the
    subdivision budget runs out before the tolerance is met.
    """
    cfg = DEFAULT_QUADRATURE if cfg is None else cfg
    if math.isinf(upper):
        lo = float(lower)

        def transformed(s: float) -> float:
            one_minus = 1.0 - s
            if one_minus <= 0.0:
                return 0.0
            w = f(lo + s / one_minus)
            if w == 0.0:
                return 0.0
            return w / (one_minus * one_minus)

        g, a, b = transformed, 0.0, 1.0
    else:
        g, a, b = f, float(lower), float(upper)

    out = _scipy_integrate.quad(
        g,
        a,
        b,
        epsabs=cfg.abs_tol,
        epsrel=cfg.rel_tol,
        limit=cfg.max_subdivisions,
        full_output=True,
    )
    value, abserr = float(out[0]), float(out[1])
    if len(out) >= 4 and abserr > max(cfg.abs_tol, cfg.rel_tol * abs(value)):
        raise ConvergenceError(
            f"quadrature did not converge: {out[3]}", estimate=value, error_bound=abserr
        )
    return value


def find_root(
    f: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10
) -> float:
    """Root of ``f`` on the bracket ``[lo, hi]`` via Brent's method.

    Requires f(lo) * f(hi) <= 0; raises BracketError otherwise.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return float(lo)
    if fhi == 0.0:
        return float(hi)
    if (flo > 0.0) == (fhi > 0.0):
        raise BracketError(f"no sign change on [{lo}, {hi}]")
    return float(brentq(f, lo, hi, xtol=tol))


def upper_incomplete_gamma(u: float, x: float) -> float:
    """Upper incomplete gamma Gamma(u, x) = int_x^inf t^(u-1) e^(-t) dt, x > 0.

    The shape u may be any real number. Negative shapes are lifted into the
    principal range (0, 1] by the upward recurrence
    Gamma(u, x) = (Gamma(u+1, x) - x^u e^(-x)) / u and then evaluated by a
    power series (small x) or a Lentz continued fraction (large x).
    Non-positive integer shapes recurse down from Gamma(0, x) = E1(x).
    """
    u = float(u)
    x = float(x)
    if not x > 0.0:
        raise DomainError("x must be > 0")
    if u > 0.0:
        return _gamma_upper_positive(u, x)
    log_x = math.log(x)
    if u.is_integer():
        val = float(exp1(x))
        for j in range(1, int(-u) + 1):
            w = -float(j)
            val = (val - math.exp(w * log_x - x)) / w
        return val
    lifts = int(math.floor(-u)) + 1  # brings u + lifts into (0, 1]
    val = _gamma_upper_positive(u + lifts, x)
    for j in range(1, lifts + 1):
        w = u + lifts - j
        val = (val - math.exp(w * log_x - x)) / w
    return val


def _gamma_upper_positive(u: float, x: float) -> float:
    """Gamma(u, x) for u > 0 via series/continued-fraction split at x = u + 1."""
    if x < u + 1.0:
        # lower-integral series, then complement against the complete gamma
        ap = u
        total = 1.0 / u
        term = total
        for _ in range(500):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * 1e-16:
                break
        else:
            raise ConvergenceError(
                "incomplete gamma series stalled", estimate=total, error_bound=abs(term)
            )
        return math.gamma(u) - math.exp(u * math.log(x) - x) * total
    # modified Lentz continued fraction for the upper integral
    tiny = 1e-300
    b = x + 1.0 - u
    c = 1.0 / tiny
    d = 1.0 / b if b != 0.0 else 1.0 / tiny
    h = d
    for i in range(1, 500):
        an = -i * (i - u)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    else:
        raise ConvergenceError(
            "incomplete gamma continued fraction stalled", estimate=h, error_bound=abs(h)
        )
    return math.exp(u * math.log(x) - x) * h


def gauss_2f1(m: float, p: float, q: float, z: float) -> float:
    """Gauss hypergeometric 2F1(m, p; q; z) via the Euler integral.

    Evaluates Gamma(q)/(Gamma(p) Gamma(q-p)) * int_0^1 u^(p-1) (1-u)^(q-p-1)
    (1-zu)^(-m) du, which requires q > p > 0 and z < 1. The substitution
    u = sin(theta)^2 removes the endpoint singularities, and the integrand is
    assembled in log space so that large exponents cannot overflow.
    """
    m = float(m)
    p = float(p)
    q = float(q)
    z = float(z)
    if not (q > p > 0.0):
        raise DomainError("requires q > p > 0")
    if not z < 1.0:
        raise DomainError("requires z < 1")
    if z == 0.0:
        return 1.0

    sin_exp = 2.0 * p - 1.0
    cos_exp = 2.0 * (q - p) - 1.0
    log2 = math.log(2.0)

    def integrand(theta: float) -> float:
        s = math.sin(theta)
        c = math.cos(theta)
        if s <= 0.0 or c <= 0.0:
            return 0.0
        log_val = log2 - m * math.log1p(-z * s * s)
        if sin_exp != 0.0:
            log_val += sin_exp * math.log(s)
        if cos_exp != 0.0:
            log_val += cos_exp * math.log(c)
        if log_val < -745.0:
            return 0.0
        return math.exp(log_val)

    prefactor = math.exp(math.lgamma(q) - math.lgamma(p) - math.lgamma(q - p))
    return prefactor * integrate(integrand, 0.0, math.pi / 2.0)
