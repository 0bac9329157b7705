"""MAP fitting of Makeham models to death counts and exposures.

Death counts are modelled as Poisson with mean exposure * mu(age + 1/2);
each positive parameter carries an inverse-gamma prior (default shape 1,
scale 1). The posterior is maximised over log-parameters by Nelder-Mead
restarted from a scrambled-Sobol set of start points, which makes the fit
deterministic for a fixed options seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .mixture import MixtureDecomposition, decompose
from .models import HazardModel, from_params, param_names, parameters, total_hazard

__all__ = [
    "LifeTableSlice",
    "PriorSpec",
    "FitOptions",
    "FitResult",
    "FitFailure",
    "NonConvergenceError",
    "SEARCH_RANGES",
    "poisson_loglik",
    "log_posterior",
    "fit_map",
    "fit_series",
    "synthetic_slice",
]

SEXES = ("female", "male", "total")

# multistart search box per parameter (log-uniform)
SEARCH_RANGES: dict[str, tuple[float, float]] = {
    "a": (1e-6, 1e-2),
    "b": (0.05, 0.2),
    "c": (1e-5, 0.05),
    "gamma": (1e-3, 1.0),
    "k": (1e-2, 10.0),
    "a1": (1e-4, 0.5),
    "b1": (0.1, 3.0),
    "a2": (1e-6, 1e-2),
    "b2": (0.05, 0.2),
}


@dataclass(eq=False)
class LifeTableSlice:
    """Deaths and exposures by single year of age for one population cell.

    Deaths may be fractional (registry splitting produces non-integer
    counts); exposures are person-years and must be positive.
    """

    population_label: str
    year: int
    sex: str
    ages: np.ndarray
    deaths: np.ndarray
    exposures: np.ndarray
    n_excluded: int = 0

    def __post_init__(self):
        self.ages = np.asarray(self.ages, dtype=float)
        self.deaths = np.asarray(self.deaths, dtype=float)
        self.exposures = np.asarray(self.exposures, dtype=float)
        if self.sex not in SEXES:
            raise ValueError(f"sex must be one of {SEXES}")
        if not (self.ages.shape == self.deaths.shape == self.exposures.shape):
            raise ValueError("ages, deaths and exposures must have equal length")
        if self.ages.size:
            if np.any(np.diff(self.ages) <= 0):
                raise ValueError("ages must be strictly increasing")
            if np.any(self.exposures <= 0):
                raise ValueError("exposures must be positive")
            if np.any(self.deaths < 0):
                raise ValueError("deaths must be non-negative")

    def rows(self) -> list[tuple[float, float, float]]:
        return list(zip(self.ages.tolist(), self.deaths.tolist(), self.exposures.tolist()))

    def restricted(self, min_age: float) -> "LifeTableSlice":
        keep = self.ages >= min_age
        return LifeTableSlice(
            self.population_label,
            self.year,
            self.sex,
            self.ages[keep],
            self.deaths[keep],
            self.exposures[keep],
            self.n_excluded,
        )


@dataclass(frozen=True)
class PriorSpec:
    """Inverse-gamma (alpha, beta) hyperparameters per model parameter.

    Parameters not listed fall back to (1, 1). The log prior density for a
    parameter theta is -(alpha + 1) ln theta - beta / theta up to constants.
    """

    alpha_beta: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        for name, (alpha, beta) in self.alpha_beta.items():
            if alpha <= 0 or beta <= 0:
                raise ValueError(f"prior for {name!r} needs alpha, beta > 0")

    def get(self, name: str) -> tuple[float, float]:
        return self.alpha_beta.get(name, (1.0, 1.0))


DEFAULT_PRIORS = PriorSpec()


@dataclass(frozen=True)
class FitOptions:
    min_age: float = 20.0
    n_starts: int = 16
    max_iter: int = 2000
    xatol: float = 1e-8  # simplex size in log-parameter space
    seed: int = 0


@dataclass
class FitResult:
    model: HazardModel
    log_posterior: float
    log_likelihood: float
    converged: bool
    iterations: int
    start_points_tried: int
    derived: MixtureDecomposition
    population_label: str = ""
    year: int = 0
    sex: str = ""


@dataclass(frozen=True)
class FitFailure:
    population_label: str
    year: int
    sex: str
    error: str


class NonConvergenceError(RuntimeError):
    """No start point met the simplex stopping criterion.

    ``best`` holds the best incumbent anyway.
    """

    def __init__(self, message: str, best: FitResult):
        super().__init__(message)
        self.best = best


def poisson_loglik(model: HazardModel, data: LifeTableSlice) -> float:
    """Poisson log likelihood up to the data-only ln(D!) constant.

    Rates are evaluated at age-interval midpoints (age + 1/2), the standard
    single-year life-table convention.
    """
    if data.ages.size == 0:
        raise ValueError("empty life-table slice")
    mu = total_hazard(model, data.ages + 0.5)
    if not np.all(np.isfinite(mu)) or np.any(mu <= 0):
        raise ArithmeticError("non-positive or non-finite rate in likelihood")
    return float(np.sum(data.deaths * np.log(data.exposures * mu) - data.exposures * mu))


def log_posterior(
    model: HazardModel, data: LifeTableSlice, priors: PriorSpec | None = None
) -> float:
    """poisson_loglik plus the log inverse-gamma prior terms."""
    priors = DEFAULT_PRIORS if priors is None else priors
    prior_term = 0.0
    for name, value in parameters(model).items():
        if value <= 0:
            raise ValueError(f"parameter {name} must be > 0 under an inverse-gamma prior")
        alpha, beta = priors.get(name)
        prior_term += -(alpha + 1.0) * math.log(value) - beta / value
    return poisson_loglik(model, data) + prior_term


def _start_points(family: str, options: FitOptions) -> np.ndarray:
    names = param_names(family)
    log_lo = np.array([math.log(SEARCH_RANGES[n][0]) for n in names])
    log_hi = np.array([math.log(SEARCH_RANGES[n][1]) for n in names])
    sobol = qmc.Sobol(d=len(names), scramble=True, seed=options.seed)
    points = sobol.random(options.n_starts)
    return log_lo + points * (log_hi - log_lo)


def fit_map(
    data: LifeTableSlice,
    family: str,
    priors: PriorSpec | None = None,
    options: FitOptions | None = None,
) -> FitResult:
    """MAP fit of one family to one slice.

    Rows below options.min_age are dropped first; at least two rows per free
    parameter must remain. Raises NonConvergenceError (carrying the best
    incumbent) only when every restart stops on the iteration cap instead of
    simplex collapse.
    """
    options = FitOptions() if options is None else options
    priors = DEFAULT_PRIORS if priors is None else priors
    fit_data = data.restricted(options.min_age)
    names = param_names(family)
    if fit_data.ages.size < 2 * len(names):
        raise ValueError(
            f"need at least {2 * len(names)} rows above age {options.min_age}, "
            f"have {fit_data.ages.size}"
        )

    def negative_log_posterior(z: np.ndarray) -> float:
        with np.errstate(over="ignore"):
            theta = np.exp(z)
        if not np.all(np.isfinite(theta)):
            return np.inf
        try:
            value = log_posterior(from_params(family, theta), fit_data, priors)
        except (ArithmeticError, ValueError):
            return np.inf
        return -value if np.isfinite(value) else np.inf

    best = None
    for z0 in _start_points(family, options):
        res = minimize(
            negative_log_posterior,
            z0,
            method="Nelder-Mead",
            options={
                "xatol": options.xatol,
                "fatol": float("inf"),
                "maxiter": options.max_iter,
                "maxfev": 100 * options.max_iter,
            },
        )
        if best is None or res.fun < best.fun:
            best = res

    model = from_params(family, np.exp(best.x))
    result = FitResult(
        model=model,
        log_posterior=-float(best.fun),
        log_likelihood=poisson_loglik(model, fit_data),
        converged=bool(best.success),
        iterations=int(best.nit),
        start_points_tried=options.n_starts,
        derived=decompose(model),
        population_label=data.population_label,
        year=data.year,
        sex=data.sex,
    )
    if not best.success:
        raise NonConvergenceError("no start point converged", best=result)
    return result


def fit_series(
    panel: Sequence[LifeTableSlice],
    family: str,
    priors: PriorSpec | None = None,
    options: FitOptions | None = None,
) -> tuple[list[FitResult], list[FitFailure]]:
    """Fit every slice independently; per-slice errors are collected, not
    fatal to the batch."""
    results: list[FitResult] = []
    failures: list[FitFailure] = []
    for piece in panel:
        try:
            results.append(fit_map(piece, family, priors, options))
        except Exception as exc:  # noqa: BLE001 - error isolation is the contract
            failures.append(
                FitFailure(piece.population_label, piece.year, piece.sex, str(exc))
            )
    return results, failures


def synthetic_slice(
    model: HazardModel,
    ages: np.ndarray,
    exposure,
    seed: int,
    population_label: str = "synthetic",
    year: int = 2000,
    sex: str = "female",
) -> LifeTableSlice:
    """Poisson-sampled deaths for known parameters, for recovery tests."""
    ages = np.asarray(ages, dtype=float)
    exposures = np.broadcast_to(np.asarray(exposure, dtype=float), ages.shape).copy()
    rng = np.random.default_rng(seed)
    deaths = rng.poisson(exposures * total_hazard(model, ages + 0.5)).astype(float)
    return LifeTableSlice(population_label, year, sex, ages, deaths, exposures)
