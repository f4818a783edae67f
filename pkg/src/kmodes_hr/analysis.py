"""Instruments for comparing Cao and matching initialisations on a dataset."""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from .core import ContractError, Dataset
from .engine import DEFAULT_MAX_ITERATIONS, fit
from .initialisers import cao_init, matching_init

FITNESS_K = 3
FITNESS_REPS = 25

POWER_TOL = 1e-10
POWER_MAX_ITER = 10_000

MOMENT_ESTIMATOR = "population moment ratios: m3/m2^1.5, m4/m2^2 - 3"


class NoPrincipalDirection(UserWarning):
    """The data has zero variance, so every principal score is zero."""


@dataclass(frozen=True)
class FitnessReport:
    c_cao: int
    c_match: int
    fitness: int
    reps_used: int
    k: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class ComponentSummary:
    variance: float
    skewness: float
    kurtosis: float
    iqr: float
    lower_decile: float
    upper_decile: float

    def as_dict(self) -> dict:
        return asdict(self)


def fitness(
    dataset: Dataset,
    reps: int = FITNESS_REPS,
    seed: int = 0,
    k: int = FITNESS_K,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> FitnessReport:
    """Cao's final cost minus the best final cost of ``reps`` matching runs.

    Positive values mean the matching initialisation found the cheaper
    clustering; negative values mean Cao's did. Matching run ``r`` uses
    seed ``seed + r``.
    """
    if reps < 1:
        raise ContractError("reps must be at least 1")
    if dataset.n_distinct() < k:
        raise ContractError(f"need at least {k} distinct rows")
    codes = dataset.codes
    c_cao = fit(dataset, codes[cao_init(dataset, k)], max_iterations).final_cost
    c_match = min(
        fit(dataset, codes[matching_init(dataset, k, seed + r)], max_iterations).final_cost
        for r in range(reps)
    )
    return FitnessReport(c_cao, c_match, c_cao - c_match, reps, k)


def sample_random_dataset(
    n_rows: int, attribute_sizes: Sequence[int], seed: int | None = None
) -> Dataset:
    """Uniform random categorical data; unused categories drop out of the space."""
    if n_rows < 1 or not attribute_sizes or min(attribute_sizes) < 1:
        raise ContractError("need n_rows >= 1 and positive attribute sizes")
    rng = np.random.default_rng(seed)
    raw = np.column_stack([rng.integers(0, d, size=n_rows) for d in attribute_sizes])
    return Dataset.from_rows(raw.astype(str).tolist())


def _leading_eigenpair(cov: np.ndarray) -> tuple[float, np.ndarray]:
    m = cov.shape[0]
    v = np.ones(m) / np.sqrt(m)
    # an all-ones start can be orthogonal to the top eigenvector; nudge it
    v += np.linspace(0.0, 1e-3, m)
    v /= np.linalg.norm(v)
    value = float(v @ cov @ v)
    for _ in range(POWER_MAX_ITER):
        w = cov @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0, v
        w /= norm
        new_value = float(w @ cov @ w)
        converged = abs(new_value - value) <= POWER_TOL * max(abs(new_value), 1e-300)
        aligned = min(np.linalg.norm(w - v), np.linalg.norm(w + v)) <= POWER_TOL
        v, value = w, new_value
        if converged and aligned:
            break
    return value, v


def first_principal_component(
    dataset: Dataset | np.ndarray, return_eigen: bool = False
):
    """Scores on the leading principal axis of the mean-centred code matrix.

    Integer category codes are treated as numbers. The axis is found by
    power iteration on the sample covariance matrix; its sign makes the
    largest-magnitude loading positive.
    """
    codes = dataset.codes if isinstance(dataset, Dataset) else np.asarray(dataset)
    data = np.asarray(codes, dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise ContractError("need at least two rows")
    centred = data - data.mean(axis=0)
    cov = centred.T @ centred / (data.shape[0] - 1)
    if not np.any(cov):
        warnings.warn("zero-variance data has no principal direction", NoPrincipalDirection)
        scores = np.zeros(data.shape[0])
        return (scores, 0.0, np.zeros(data.shape[1])) if return_eigen else scores
    value, vector = _leading_eigenpair(cov)
    if vector[np.argmax(np.abs(vector))] < 0:
        vector = -vector
    scores = centred @ vector
    return (scores, value, vector) if return_eigen else scores


def summarize_component(scores: Sequence[float]) -> ComponentSummary:
    """Spread and shape of a score vector (sample variance, biased moments)."""
    x = np.asarray(scores, dtype=float)
    if x.size < 2:
        raise ContractError("need at least two scores")
    dev = x - x.mean()
    m2, m3, m4 = (np.mean(dev**p) for p in (2, 3, 4))
    if m2 == 0:
        skew = kurt = float("nan")
    else:
        skew, kurt = m3 / m2**1.5, m4 / m2**2 - 3.0
    q10, q25, q75, q90 = np.quantile(x, [0.10, 0.25, 0.75, 0.90])
    return ComponentSummary(
        variance=float(np.var(x, ddof=1)),
        skewness=float(skew),
        kurtosis=float(kurt),
        iqr=float(q75 - q25),
        lower_decile=float(q10),
        upper_decile=float(q90),
    )
