"""Competing-risk Monte Carlo engine.

Each cause of death carries its own cumulative hazard; a simulated
individual draws one failure time per cause by inverse transform and dies of
whichever strikes first. The recorded (lifetime, cause) pairs provide
empirical estimates of the cause probabilities pi_j, the component lifespan
densities and the sub-hazards, used as oracles for the analytic results.

The generator is NumPy's PCG64 seeded through ``numpy.random.default_rng``:
one uniform matrix of shape (n_causes, n) is drawn per cohort, row k feeding
cause k in registration order, so runs are bit-reproducible for a fixed
seed within this implementation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

__all__ = [
    "CENSOR_AGE",
    "CauseSpec",
    "LifetimeSample",
    "Cohort",
    "SampleSizeError",
    "exponential_cause",
    "gompertz_cause",
    "competing_causes",
    "sample_failure_time",
    "simulate_cohort",
    "empirical_pi",
    "empirical_component_distribution",
]

# draws whose target cumulative hazard exceeds H(CENSOR_AGE) are censored
CENSOR_AGE = 500.0


class SampleSizeError(ValueError):
    """Too few samples of the requested cause for a stable estimate."""


@dataclass(frozen=True)
class CauseSpec:
    """One competing cause: a label, its cumulative hazard, and an optional.

    closed-form inverse of the cumulative hazard. Both callables must accept
    numpy arrays. The cumulative hazard must vanish at 0 and be strictly
    increasing wherever the hazard is positive.
    """

    label: str
    cumulative_hazard: Callable
    inverse_cumulative_hazard: Callable | None = None


@dataclass(frozen=True)
class LifetimeSample:
    y: float
    cause: str | None
    censored: bool = False


@dataclass
class Cohort:
    """Simulated lifetimes stored column-wise; iterates as LifetimeSample.

    ``cause_index`` holds the registration index of the striking cause, or
    -1 for censored individuals (whose y is pinned at CENSOR_AGE).
    """

    cause_labels: tuple[str, ...]
    y: np.ndarray
    cause_index: np.ndarray

    def __len__(self) -> int:
        return self.y.size

    def __getitem__(self, i: int) -> LifetimeSample:
        idx = int(self.cause_index[i])
        if idx < 0:
            return LifetimeSample(float(self.y[i]), None, True)
        return LifetimeSample(float(self.y[i]), self.cause_labels[idx], False)

    def __iter__(self) -> Iterator[LifetimeSample]:
        for i in range(len(self)):
            yield self[i]

    @property
    def n_censored(self) -> int:
        return int(np.sum(self.cause_index < 0))

    def lifetimes_of(self, cause: str) -> np.ndarray:
        idx = self.cause_labels.index(cause)
        return self.y[self.cause_index == idx]

    def to_csv(self, destination) -> None:
        """Dump samples as CSV with header ``y,cause,censored``."""
        close = False
        if isinstance(destination, (str, bytes)):
            fh = open(destination, "w", newline="")
            close = True
        else:
            fh = destination
        try:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["y", "cause", "censored"])
            for i in range(len(self)):
                idx = int(self.cause_index[i])
                label = "" if idx < 0 else self.cause_labels[idx]
                writer.writerow([repr(float(self.y[i])), label, str(idx < 0).lower()])
        finally:
            if close:
                fh.close()


def exponential_cause(rate: float, label: str = "premature") -> CauseSpec:
    """Constant-hazard cause; H(x) = rate * x with analytic inverse."""
    if rate <= 0:
        raise ValueError("rate must be > 0")
    return CauseSpec(
        label,
        cumulative_hazard=lambda x: rate * np.asarray(x, dtype=float),
        inverse_cumulative_hazard=lambda v: np.asarray(v, dtype=float) / rate,
    )


def gompertz_cause(a: float, b: float, label: str = "senescent") -> CauseSpec:
    """Gompertz cause; H(x) = (a/b)(e^(bx) - 1) with analytic inverse."""

    def cumhaz(x):
        with np.errstate(over="ignore"):
            return (a / b) * np.expm1(b * np.asarray(x, dtype=float))

    def inverse(v):
        return np.log1p((b / a) * np.asarray(v, dtype=float)) / b

    return CauseSpec(label, cumulative_hazard=cumhaz, inverse_cumulative_hazard=inverse)


def competing_causes(model) -> list[CauseSpec]:
    """Split a Makeham model into its extrinsic and senescent causes.

    Returns [premature, senescent] CauseSpecs with closed-form inverses
    wherever the baseline admits one; with c = 0 only the senescent cause is
    returned.
    """
    senescent = _senescent_cause(model)
    if model.c == 0.0:
        return [senescent]
    return [exponential_cause(model.c), senescent]


def _senescent_cause(model) -> CauseSpec:
    from . import models as m

    if isinstance(model, m.GompertzMakeham):
        return gompertz_cause(model.a, model.b)
    zero_c = type(model)(**{**m.parameters(model), "c": 0.0})

    def cumhaz(x):
        return m.cumulative_hazard(zero_c, x)

    inverse = None
    if isinstance(model, m.GammaGompertzMakeham):
        a, b, g = model.a, model.b, model.gamma

        def inverse(v):
            return np.log1p((b / (a * g)) * np.expm1(g * np.asarray(v, dtype=float))) / b

    elif isinstance(model, (m.BeardMakeham, m.KannistoMakeham)):
        a, b = model.a, model.b
        k = model.k if isinstance(model, m.BeardMakeham) else 1.0

        def inverse(v):
            grown = np.expm1(b * k * np.asarray(v, dtype=float))
            return np.log1p(grown * (1.0 + k * a) / (k * a)) / b

    return CauseSpec("senescent", cumulative_hazard=cumhaz, inverse_cumulative_hazard=inverse)


def _invert_targets(cause: CauseSpec, targets: np.ndarray) -> np.ndarray:
    """Failure times for an array of target cumulative hazards.

    Targets beyond H(CENSOR_AGE) come back as inf (right-censored). Without
    a closed-form inverse the monotone cumulative hazard is inverted by
    vectorised bisection on [0, CENSOR_AGE].
    """
    targets = np.asarray(targets, dtype=float)
    if cause.inverse_cumulative_hazard is not None:
        times = np.asarray(cause.inverse_cumulative_hazard(targets), dtype=float)
        return np.where(times > CENSOR_AGE, np.inf, times)
    h_max = float(cause.cumulative_hazard(CENSOR_AGE))
    out = np.full(targets.shape, np.inf)
    alive = targets <= h_max
    if not np.any(alive):
        return out
    lo = np.zeros(np.sum(alive))
    hi = np.full(np.sum(alive), CENSOR_AGE)
    goal = targets[alive]
    for _ in range(80):  # 500 * 2^-80 ~ 4e-22 years
        mid = 0.5 * (lo + hi)
        high = np.asarray(cause.cumulative_hazard(mid)) >= goal
        hi = np.where(high, mid, hi)
        lo = np.where(high, lo, mid)
    out[alive] = 0.5 * (lo + hi)
    return out


def sample_failure_time(cause: CauseSpec, u: float) -> float:
    """Failure time H^{-1}(-ln u) for a single uniform(0,1) draw.

    Returns inf when the target cumulative hazard exceeds H(CENSOR_AGE),
    i.e. the draw is right-censored.
    """
    if not 0.0 < u < 1.0:
        raise ValueError("u must lie strictly inside (0, 1)")
    return float(_invert_targets(cause, np.asarray([-math.log(u)]))[0])


def simulate_cohort(causes: Sequence[CauseSpec], n: int, seed: int) -> Cohort:
    """Simulate n independent individuals exposed to all causes at once.

    Each individual draws one failure time per cause; the observed lifetime
    is the minimum and the recorded cause is its index. Individuals whose
    draws all exceed CENSOR_AGE are kept as censored at that age.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not causes:
        raise ValueError("at least one cause is required")
    rng = np.random.default_rng(seed)
    uniforms = rng.random((len(causes), n))
    with np.errstate(divide="ignore"):
        targets = -np.log(uniforms)
    times = np.stack([_invert_targets(c, targets[k]) for k, c in enumerate(causes)])
    y = times.min(axis=0)
    cause_index = times.argmin(axis=0).astype(np.int64)
    censored = ~np.isfinite(y)
    y = np.where(censored, CENSOR_AGE, y)
    cause_index[censored] = -1
    return Cohort(tuple(c.label for c in causes), y, cause_index)


def empirical_pi(cohort: Cohort, cause: str) -> tuple[float, float]:
    """Fraction of (uncensored) deaths due to ``cause``, with its binomial
    standard error."""
    if len(cohort) == 0:
        raise ValueError("empty cohort")
    idx = cohort.cause_labels.index(cause)
    observed = cohort.cause_index >= 0
    n = int(np.sum(observed))
    if n == 0:
        raise ValueError("all samples are censored")
    p = float(np.sum(cohort.cause_index == idx)) / n
    se = math.sqrt(p * (1.0 - p) / n)
    return p, se


def empirical_component_distribution(
    cohort: Cohort, cause: str, age_grid=None
) -> tuple[np.ndarray, np.ndarray]:
    """Normalised histogram of lifetimes ending in ``cause``.

    Returns (bin_edges, density). With an explicit ``age_grid`` the grid is
    used as bin edges and the density integrates to one over it; otherwise
    Freedman-Diaconis bins span the sample. Requires at least 1000 samples
    of the cause.
    """
    ys = cohort.lifetimes_of(cause)
    if ys.size < 1000:
        raise SampleSizeError(f"need >= 1000 samples of {cause!r}, have {ys.size}")
    if age_grid is None:
        edges = np.histogram_bin_edges(ys, bins="fd")
    else:
        edges = np.asarray(age_grid, dtype=float)
        if edges.ndim != 1 or edges.size < 2 or np.any(np.diff(edges) <= 0):
            raise ValueError("age grid must contain at least two increasing edges")
    counts, edges = np.histogram(ys, bins=edges)
    total = counts.sum()
    if total == 0:
        raise SampleSizeError("no samples fall inside the grid")
    density = counts / (total * np.diff(edges))
    return edges, density
