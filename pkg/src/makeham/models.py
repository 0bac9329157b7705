"""Makeham-family mortality models.

Five parametric families share the hazard structure mu(x) = h(x) + c: an
age-driven baseline hazard h plus a constant background rate c capturing
age-independent (extrinsic) mortality. Hazard, cumulative hazard, survival
and density all have closed forms; every evaluation function accepts a
scalar age or a numpy array of ages.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from functools import singledispatch
from typing import Union

import numpy as np

__all__ = [
    "GompertzMakeham",
    "GammaGompertzMakeham",
    "BeardMakeham",
    "KannistoMakeham",
    "SilerMakeham",
    "HazardModel",
    "ValidationReport",
    "FAMILIES",
    "family_name",
    "param_names",
    "from_params",
    "parameters",
    "validate",
    "baseline_hazard",
    "total_hazard",
    "cumulative_hazard",
    "survival",
    "density",
]


@dataclass(frozen=True)
class GompertzMakeham:
    """h(x) = a e^(bx)."""

    a: float
    b: float
    c: float


@dataclass(frozen=True)
class GammaGompertzMakeham:
    """Gompertz baseline with gamma-distributed frailty of variance gamma:
    h(x) = a e^(bx) / (1 + (a gamma / b)(e^(bx) - 1))."""

    a: float
    b: float
    gamma: float
    c: float


@dataclass(frozen=True)
class BeardMakeham:
    """Logistic baseline h(x) = a e^(bx) / (1 + k a e^(bx))."""

    a: float
    b: float
    k: float
    c: float


@dataclass(frozen=True)
class KannistoMakeham:
    """Beard baseline with k = 1: h(x) = a e^(bx) / (1 + a e^(bx))."""

    a: float
    b: float
    c: float


@dataclass(frozen=True)
class SilerMakeham:
    """Infant plus senescent baseline h(x) = a1 e^(-b1 x) + a2 e^(b2 x)."""

    a1: float
    b1: float
    a2: float
    b2: float
    c: float


HazardModel = Union[
    GompertzMakeham, GammaGompertzMakeham, BeardMakeham, KannistoMakeham, SilerMakeham
]

FAMILIES: dict[str, type] = {
    "gm": GompertzMakeham,
    "ggm": GammaGompertzMakeham,
    "beard": BeardMakeham,
    "kannisto": KannistoMakeham,
    "siler": SilerMakeham,
}

_FAMILY_NAMES = {cls: name for name, cls in FAMILIES.items()}

# (parameter, must be strictly positive); c may be zero
_CONSTRAINTS: dict[type, tuple[tuple[str, bool], ...]] = {
    GompertzMakeham: (("a", True), ("b", True), ("c", False)),
    GammaGompertzMakeham: (("a", True), ("b", True), ("gamma", True), ("c", False)),
    BeardMakeham: (("a", True), ("b", True), ("k", True), ("c", False)),
    KannistoMakeham: (("a", True), ("b", True), ("c", False)),
    SilerMakeham: (
        ("a1", True),
        ("b1", True),
        ("a2", True),
        ("b2", True),
        ("c", False),
    ),
}


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...] = ()


def family_name(model: HazardModel) -> str:
    return _FAMILY_NAMES[type(model)]


def param_names(family: str | type) -> tuple[str, ...]:
    cls = FAMILIES[family] if isinstance(family, str) else family
    return tuple(f.name for f in fields(cls))


def from_params(family: str | type, values) -> HazardModel:
    """Build a model from parameter values in declaration order."""
    cls = FAMILIES[family] if isinstance(family, str) else family
    names = param_names(cls)
    vals = [float(v) for v in values]
    if len(vals) != len(names):
        raise ValueError(f"{cls.__name__} takes {len(names)} parameters, got {len(vals)}")
    return cls(**dict(zip(names, vals)))


def parameters(model: HazardModel) -> dict[str, float]:
    return {f.name: getattr(model, f.name) for f in fields(model)}


def validate(model: HazardModel) -> ValidationReport:
    """Check parameter constraints; reports violations instead of raising."""
    constraints = _CONSTRAINTS.get(type(model))
    if constraints is None:
        return ValidationReport(False, (f"unknown model type {type(model).__name__}",))
    violations = []
    for name, strict in constraints:
        value = getattr(model, name)
        if not np.isfinite(value):
            violations.append(f"{name} must be finite")
        elif strict and value <= 0:
            violations.append(f"{name} must be > 0")
        elif not strict and value < 0:
            violations.append(f"{name} must be >= 0")
    return ValidationReport(not violations, tuple(violations))


def _as_output(values, x):
    out = np.asarray(values, dtype=float)
    if np.ndim(x) == 0:
        return float(out)
    return out


@singledispatch
def _baseline(model, x):
    raise TypeError(f"not a hazard model: {model!r}")


@_baseline.register
def _(model: GompertzMakeham, x):
    with np.errstate(over="ignore"):
        return model.a * np.exp(model.b * x)


@_baseline.register
def _(model: GammaGompertzMakeham, x):
    # written as a / (e^(-bx)(1 - ag/b) + ag/b): stable for all ages,
    # approaches the asymptote b/gamma instead of producing inf/inf
    ratio = model.a * model.gamma / model.b
    return model.a / (np.exp(-model.b * x) * (1.0 - ratio) + ratio)


@_baseline.register
def _(model: BeardMakeham, x):
    return model.a / (np.exp(-model.b * x) + model.k * model.a)


@_baseline.register
def _(model: KannistoMakeham, x):
    return model.a / (np.exp(-model.b * x) + model.a)


@_baseline.register
def _(model: SilerMakeham, x):
    with np.errstate(over="ignore"):
        return model.a1 * np.exp(-model.b1 * x) + model.a2 * np.exp(model.b2 * x)


@singledispatch
def _cumulative(model, x):
    raise TypeError(f"not a hazard model: {model!r}")


@_cumulative.register
def _(model: GompertzMakeham, x):
    with np.errstate(over="ignore"):
        return (model.a / model.b) * np.expm1(model.b * x) + model.c * x


def _log_logistic_cumhaz(x, b, ratio):
    """log(1 + ratio * (e^(bx) - 1)) evaluated without overflow."""
    bx = b * x
    with np.errstate(over="ignore"):
        small = np.log1p(ratio * np.expm1(np.minimum(bx, 700.0)))
    large = bx + np.log(ratio + (1.0 - ratio) * np.exp(-bx))
    return np.where(bx < 700.0, small, large)


@_cumulative.register
def _(model: GammaGompertzMakeham, x):
    ratio = model.a * model.gamma / model.b
    return _log_logistic_cumhaz(x, model.b, ratio) / model.gamma + model.c * x


@_cumulative.register
def _(model: BeardMakeham, x):
    ratio = model.k * model.a / (1.0 + model.k * model.a)
    return _log_logistic_cumhaz(x, model.b, ratio) / (model.b * model.k) + model.c * x


@_cumulative.register
def _(model: KannistoMakeham, x):
    ratio = model.a / (1.0 + model.a)
    return _log_logistic_cumhaz(x, model.b, ratio) / (model.b * 1.0) + model.c * x


@_cumulative.register
def _(model: SilerMakeham, x):
    with np.errstate(over="ignore"):
        infant = -(model.a1 / model.b1) * np.expm1(-model.b1 * x)
        senescent = (model.a2 / model.b2) * np.expm1(model.b2 * x)
    return infant + senescent + model.c * x


def baseline_hazard(model: HazardModel, x):
    """Baseline (age-driven) hazard h(x); inf signals numeric overflow."""
    return _as_output(_baseline(model, np.asarray(x, dtype=float)), x)


def total_hazard(model: HazardModel, x):
    """Total hazard mu(x) = h(x) + c."""
    return _as_output(
        _baseline(model, np.asarray(x, dtype=float)) + model.c, x
    )


def cumulative_hazard(model: HazardModel, x):
    """Integrated total hazard int_0^x mu(t) dt, zero at x = 0."""
    return _as_output(_cumulative(model, np.asarray(x, dtype=float)), x)


def survival(model: HazardModel, x):
    """S(x) = exp(-cumulative_hazard(x)); ages past numeric range give 0."""
    return _as_output(np.exp(-_cumulative(model, np.asarray(x, dtype=float))), x)


def density(model: HazardModel, x):
    """Lifespan density f(x) = mu(x) S(x); 0 wherever survival underflows."""
    xs = np.asarray(x, dtype=float)
    s = np.exp(-_cumulative(model, xs))
    mu = _baseline(model, xs) + model.c
    with np.errstate(invalid="ignore"):
        out = np.where(s == 0.0, 0.0, mu * s)
    return _as_output(out, x)
