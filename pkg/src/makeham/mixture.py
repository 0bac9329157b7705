"""Two-component mixture view of Makeham models.

Any hazard of the form mu(x) = h(x) + c describes two competing risks: a
constant extrinsic risk c and an age-driven senescent risk h. The lifespan
density then splits as f(x) = pi * g1(x) + (1 - pi) * g2(x), where g1 and g2
are the lifespan densities of those dying from the extrinsic and the
senescent cause respectively, and pi is the probability that the extrinsic
cause strikes first. This module computes pi (closed form where available),
the component densities, the threshold age separating extrinsic- from
senescence-dominated mortality, age-specific prevalence of extrinsic deaths,
component life expectancies and modal ages.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .models import (
    BeardMakeham,
    GammaGompertzMakeham,
    GompertzMakeham,
    HazardModel,
    KannistoMakeham,
    SilerMakeham,
    baseline_hazard,
    density,
    survival,
)
from .special import (
    DEFAULT_QUADRATURE,
    DomainError,
    QuadratureConfig,
    find_root,
    gauss_2f1,
    integrate,
    upper_incomplete_gamma,
)

__all__ = [
    "AGE_SEARCH_MAX",
    "DEFAULT_GRID_STEP",
    "DEFAULT_GRID_MAX",
    "DegenerateComponentError",
    "TailUnderflowError",
    "MixtureDecomposition",
    "mixing_proportion",
    "component_density",
    "threshold_age",
    "premature_prevalence",
    "conditional_hazard_premature",
    "remaining_life_expectancy",
    "modal_age",
    "decompose",
]

# upper bound for all numeric age searches; beyond any plausible human lifespan
AGE_SEARCH_MAX = 150.0

DEFAULT_GRID_STEP = 0.5
DEFAULT_GRID_MAX = 110.0

_COMPONENTS = ("premature", "senescent")
_SUBPOPS = ("overall",) + _COMPONENTS


class DegenerateComponentError(ValueError):
    """A mixture component with zero weight was requested."""


class TailUnderflowError(ArithmeticError):
    """Surviving mass beyond the requested age is below quadrature tolerance."""


@dataclass
class MixtureDecomposition:
    """Summary of a model as pi * g1 + (1 - pi) * g2 on an age grid.

    Degenerate components (pi = 0, i.e. c = 0) get zero density columns and a
    NaN modal age.
    """

    pi: float
    threshold_age: float
    modal_age_overall: float
    modal_age_senescent: float
    modal_age_premature: float
    prevalence_grid: list[tuple[float, float]] = field(repr=False)
    component_density_grid: list[tuple[float, float, float, float]] = field(repr=False)


def _pi_closed_gm(model: GompertzMakeham) -> float:
    # c/b * (a/b)^(c/b) * e^(a/b) * Gamma(-c/b, a/b)
    ab = model.a / model.b
    cb = model.c / model.b
    return cb * math.exp(cb * math.log(ab) + ab) * upper_incomplete_gamma(-cb, ab)


def _pi_closed_ggm(model: GammaGompertzMakeham) -> float:
    a, b, g, c = model.a, model.b, model.gamma, model.c
    front = c * g / (b + c * g)
    return front * gauss_2f1(1.0 / g, 1.0, 1.0 / g + c / b + 1.0, 1.0 - a * g / b)


def _pi_quadrature(model: HazardModel, cfg: QuadratureConfig) -> float:
    return model.c * integrate(lambda y: survival(model, y), 0.0, math.inf, cfg)


def mixing_proportion(model: HazardModel, cfg: QuadratureConfig | None = None) -> float:
    """Probability that the extrinsic (constant) risk strikes first.

    Equals c * integral of the survival function. Closed forms are used for
    the Gompertz and gamma-Gompertz baselines (incomplete gamma and Gauss
    hypergeometric respectively); the other families integrate numerically.
    Returns 0 when c = 0.
    """
    cfg = DEFAULT_QUADRATURE if cfg is None else cfg
    if model.c == 0.0:
        return 0.0
    closed = None
    if isinstance(model, GompertzMakeham):
        closed = _pi_closed_gm
    elif isinstance(model, GammaGompertzMakeham):
        closed = _pi_closed_ggm
    if closed is not None:
        try:
            return closed(model)
        except DomainError as exc:  # pragma: no cover - unreachable for valid models
            warnings.warn(
                f"closed-form mixing proportion unavailable ({exc}); "
                "falling back to quadrature",
                RuntimeWarning,
                stacklevel=2,
            )
    return _pi_quadrature(model, cfg)


def component_density(model: HazardModel, component: str, x, cfg=None, *, pi=None):
    """Density of lifespans ending in the given cause: g1 or g2.

    g1(x) = (c/pi) S(x) for 'premature', g2(x) = (h(x)/(1-pi)) S(x) for
    'senescent'. Raises DegenerateComponentError when the requested
    component has zero weight. Pass a precomputed ``pi`` to avoid repeating
    the mixing-proportion integral in tight loops.
    """
    if component not in _COMPONENTS:
        raise ValueError(f"component must be one of {_COMPONENTS}")
    if pi is None:
        pi = mixing_proportion(model, cfg)
    s = survival(model, x)
    if component == "premature":
        if pi <= 0.0:
            raise DegenerateComponentError("premature component has zero weight (c = 0)")
        return (model.c / pi) * s
    if pi >= 1.0:  # pragma: no cover - h > 0 keeps pi < 1 for valid models
        raise DegenerateComponentError("senescent component has zero weight")
    return baseline_hazard(model, x) * s / (1.0 - pi)


def _threshold_numeric(model: HazardModel) -> float:
    """Largest root of h(x) = c on [0, AGE_SEARCH_MAX], clamped at 0."""
    c = model.c
    xs = np.linspace(0.0, AGE_SEARCH_MAX, 601)
    vals = baseline_hazard(model, xs) - c
    for i in range(len(xs) - 2, -1, -1):
        lo, hi = vals[i], vals[i + 1]
        if hi == 0.0:
            return float(xs[i + 1])
        if (lo > 0.0) != (hi > 0.0) or lo == 0.0:
            root = find_root(
                lambda y: baseline_hazard(model, y) - c, xs[i], xs[i + 1], tol=1e-12
            )
            return max(root, 0.0)
    return 0.0


def threshold_age(model: HazardModel) -> float:
    """Age x* where the baseline hazard crosses the extrinsic rate c.

    Below x* most deaths are extrinsic, above it most are senescent. Closed
    forms are used where their domain conditions hold; otherwise the largest
    numeric root of h(x) = c is taken, clamped at 0.
    """
    c = model.c
    if isinstance(model, GompertzMakeham):
        if c >= model.a:
            return math.log(c / model.a) / model.b
        return 0.0
    if isinstance(model, GammaGompertzMakeham):
        a, b, g = model.a, model.b, model.gamma
        if b > a * g and b > c * g:
            arg = c * (b - a * g) / (a * (b - c * g))
            return max(math.log(arg) / b, 0.0) if arg > 0.0 else 0.0
        return _threshold_numeric(model)
    if isinstance(model, BeardMakeham):
        if model.k * c < 1.0:
            arg = c / (model.a * (1.0 - model.k * c))
            return max(math.log(arg) / model.b, 0.0) if arg > 0.0 else 0.0
        return _threshold_numeric(model)
    if isinstance(model, KannistoMakeham):
        if c < 1.0:
            arg = c / (model.a * (1.0 - c))
            return max(math.log(arg) / model.b, 0.0) if arg > 0.0 else 0.0
        return _threshold_numeric(model)
    return _threshold_numeric(model)


def premature_prevalence(model: HazardModel, x):
    """Share of deaths at age x attributable to the extrinsic cause:
    p(x) = c / (h(x) + c)."""
    h = baseline_hazard(model, x)
    return model.c / (h + model.c)


def conditional_hazard_premature(
    model: HazardModel, x: float, cfg: QuadratureConfig | None = None
) -> float:
    """Force of mortality within the subpopulation dying of the extrinsic cause.

    Constant extrinsic risk does not make this hazard constant: it equals
    g1(x) / int_x^inf g1, in which the c/pi factors cancel to
    S(x) / int_x^inf S(y) dy.
    """
    cfg = DEFAULT_QUADRATURE if cfg is None else cfg
    if model.c == 0.0:
        raise DegenerateComponentError("premature component has zero weight (c = 0)")
    s = survival(model, x)
    tail = integrate(lambda y: survival(model, y), x, math.inf, cfg)
    if tail <= cfg.abs_tol:
        raise TailUnderflowError(f"surviving mass beyond age {x} below tolerance")
    return s / tail


def remaining_life_expectancy(
    model: HazardModel,
    x: float,
    subpop: str = "overall",
    cfg: QuadratureConfig | None = None,
) -> float:
    """Expected years of life left at age x, optionally within one component.

    For the components this is the mean of (Y - x) conditional on dying from
    that cause after x; the component normalisers cancel, leaving tail
    integrals of S and h*S.
    """
    cfg = DEFAULT_QUADRATURE if cfg is None else cfg
    if subpop not in _SUBPOPS:
        raise ValueError(f"subpop must be one of {_SUBPOPS}")
    if subpop == "overall":
        s = survival(model, x)
        if s <= cfg.abs_tol:
            raise TailUnderflowError(f"survival at age {x} below tolerance")
        return integrate(lambda y: survival(model, y), x, math.inf, cfg) / s
    if subpop == "premature":
        if model.c == 0.0:
            raise DegenerateComponentError("premature component has zero weight (c = 0)")
        weight = lambda y: survival(model, y)
    else:
        weight = lambda y: baseline_hazard(model, y) * survival(model, y)
    denom = integrate(weight, x, math.inf, cfg)
    if denom <= cfg.abs_tol:
        raise TailUnderflowError(f"component mass beyond age {x} below tolerance")
    numer = integrate(lambda y: (y - x) * weight(y), x, math.inf, cfg)
    return numer / denom


def _golden_max(fn, lo: float, hi: float, tol: float = 1e-9) -> float:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - inv_phi * (b - a)
    x2 = a + inv_phi * (b - a)
    f1, f2 = fn(x1), fn(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv_phi * (b - a)
            f2 = fn(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv_phi * (b - a)
            f1 = fn(x1)
    return 0.5 * (a + b)


def _argmax_age(fn) -> float:
    """Global maximiser of fn on [0, AGE_SEARCH_MAX]: coarse scan, then golden
    section. Boundary maxima return the boundary age."""
    xs = np.arange(0.0, AGE_SEARCH_MAX + 1e-9, 0.1)
    vals = np.asarray(fn(xs))
    i = int(np.argmax(vals))
    if i == 0:
        return 0.0
    if i == len(xs) - 1:  # pragma: no cover - densities vanish well before 150
        return float(xs[i])
    return _golden_max(lambda y: float(fn(y)), float(xs[i - 1]), float(xs[i + 1]))


def _senescent_mode_closed(model: HazardModel) -> float | None:
    """Closed-form senescent modal age where the domain conditions hold."""
    if isinstance(model, GompertzMakeham):
        if model.b > model.c:
            arg = (model.b - model.c) / model.a
            if arg > 1.0:
                return math.log(arg) / model.b
        return None
    if isinstance(model, GammaGompertzMakeham):
        a, b, g, c = model.a, model.b, model.gamma, model.c
        num = b - a * g - c * (1.0 - a * g / b)
        if b > a * g and num > 0.0:
            arg = (b / a) * num / (b + c * g)
            if arg > 1.0:
                return math.log(arg) / b
        return None
    if isinstance(model, BeardMakeham):
        if model.b > model.c:
            arg = (model.b - model.c) / (model.a * (1.0 + model.c * model.k))
            if arg > 1.0:
                return math.log(arg) / model.b
        return None
    return None


def modal_age(model: HazardModel, subpop: str = "overall") -> float:
    """Age at which the requested death distribution peaks.

    The extrinsic component density is proportional to the survival function
    and so peaks at 0 whenever the baseline hazard is non-decreasing. The
    senescent mode has closed forms for the Gompertz, gamma-Gompertz and
    Beard baselines (used when their domain conditions hold); everything
    else is located by grid scan plus golden-section refinement.
    """
    if subpop not in _SUBPOPS:
        raise ValueError(f"subpop must be one of {_SUBPOPS}")
    if subpop == "premature":
        if model.c == 0.0:
            raise DegenerateComponentError("premature component has zero weight (c = 0)")
        if isinstance(model, SilerMakeham):
            return _argmax_age(lambda xs: survival(model, xs))
        return 0.0
    if subpop == "senescent":
        closed = _senescent_mode_closed(model)
        if closed is not None:
            return closed
        return _argmax_age(lambda xs: baseline_hazard(model, xs) * survival(model, xs))
    return _argmax_age(lambda xs: density(model, xs))


def decompose(
    model: HazardModel,
    age_grid=None,
    cfg: QuadratureConfig | None = None,
) -> MixtureDecomposition:
    """Full mixture summary of a model on an age grid.

    The default grid runs from 0 to 110 in steps of half a year. The grid
    must be strictly increasing and non-negative.
    """
    if age_grid is None:
        grid = np.arange(0.0, DEFAULT_GRID_MAX + 1e-9, DEFAULT_GRID_STEP)
    else:
        grid = np.asarray(age_grid, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise ValueError("age grid must be a non-empty 1-d sequence")
        if np.any(grid < 0.0) or np.any(np.diff(grid) <= 0.0):
            raise ValueError("age grid must be non-negative and strictly increasing")

    pi = mixing_proportion(model, cfg)
    s = survival(model, grid)
    h = baseline_hazard(model, grid)
    with np.errstate(invalid="ignore"):
        f = np.where(s == 0.0, 0.0, (h + model.c) * s)
    if pi > 0.0:
        g1 = (model.c / pi) * s
        premature_mode = modal_age(model, "premature")
    else:
        g1 = np.zeros_like(grid)
        premature_mode = math.nan
    g2 = h * s / (1.0 - pi)
    prevalence = model.c / (h + model.c)

    return MixtureDecomposition(
        pi=pi,
        threshold_age=threshold_age(model),
        modal_age_overall=modal_age(model, "overall"),
        modal_age_senescent=modal_age(model, "senescent"),
        modal_age_premature=premature_mode,
        prevalence_grid=list(zip(grid.tolist(), prevalence.tolist())),
        component_density_grid=list(
            zip(grid.tolist(), g1.tolist(), g2.tolist(), f.tolist())
        ),
    )
