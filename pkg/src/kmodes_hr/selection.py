"""Choosing k: search bounds, final-cost curves and Kneedle knee detection."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import ContractError, Dataset
from .engine import DEFAULT_MAX_ITERATIONS, fit
from .initialisers import initialise

SENSITIVITY = 1.0


class KneeWarning(UserWarning):
    """The cost curve has no well-defined knee; a fallback k was returned."""


@dataclass(frozen=True)
class CostCurve:
    ks: tuple[int, ...]
    costs: tuple[float, ...]

    def __post_init__(self):
        ks, costs = tuple(int(k) for k in self.ks), tuple(float(c) for c in self.costs)
        if len(ks) != len(costs):
            raise ContractError("ks and costs differ in length")
        if len(ks) < 2:
            raise ContractError("a cost curve needs at least two points")
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ContractError("k values must be strictly increasing")
        object.__setattr__(self, "ks", ks)
        object.__setattr__(self, "costs", costs)

    @classmethod
    def from_points(cls, points: Iterable[tuple[int, float]]) -> "CostCurve":
        points = sorted(points)
        return cls(tuple(p[0] for p in points), tuple(p[1] for p in points))

    @property
    def points(self) -> list[tuple[int, float]]:
        return list(zip(self.ks, self.costs))


def k_bounds(n: int) -> range:
    """Candidate k values ``2..floor(sqrt(n))`` inclusive."""
    if n < 9:
        raise ContractError(f"N={n} is too small to search for k; pass k explicitly")
    return range(2, math.isqrt(n) + 1)


def build_cost_curve(
    dataset: Dataset,
    ks: Iterable[int],
    method: str = "cao",
    reps: int = 1,
    seed: int = 0,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> CostCurve:
    """Final k-modes cost for each k.

    ``cao`` is run once per k. Stochastic methods keep the best final cost
    over ``reps`` runs seeded ``seed, seed + 1, ...``.
    """
    ks = list(ks)
    costs = []
    for k in ks:
        runs = 1 if method == "cao" else reps
        best = min(
            fit(
                dataset,
                dataset.codes[initialise(dataset, k, method, seed + r)],
                max_iterations,
            ).final_cost
            for r in range(runs)
        )
        costs.append(best)
    return CostCurve(tuple(ks), tuple(costs))


def difference_curve(curve: CostCurve) -> tuple[np.ndarray, np.ndarray]:
    """Normalised x and Kneedle difference values for a decreasing convex curve."""
    x = np.asarray(curve.ks, dtype=float)
    y = np.asarray(curve.costs, dtype=float)
    x_norm = (x - x.min()) / (x.max() - x.min())
    y_norm = (y - y.min()) / (y.max() - y.min())
    return x_norm, (1.0 - y_norm) - x_norm


def knee(curve: CostCurve, sensitivity: float = SENSITIVITY) -> int:
    """Knee of a decreasing, convex cost curve.

    Local maxima of the difference curve are confirmed once the curve falls
    below ``max - sensitivity * mean(diff(x_norm))`` before the next local
    maximum. The confirmed candidate with the largest difference wins. When
    nothing is confirmed the global maximum is returned with a
    :class:`KneeWarning`; a flat or two-point curve returns its smallest k.
    """
    ks = curve.ks
    if len(ks) < 3:
        warnings.warn("two-point curve has no interior knee", KneeWarning, stacklevel=2)
        return ks[0]
    if max(curve.costs) == min(curve.costs):
        warnings.warn("flat cost curve has no knee", KneeWarning, stacklevel=2)
        return ks[0]
    x_norm, diff = difference_curve(curve)
    step = float(np.mean(np.diff(x_norm)))
    n = len(diff)
    local_max = [
        i
        for i in range(1, n - 1)
        if diff[i] >= diff[i - 1] and diff[i] > diff[i + 1]
    ]
    confirmed = []
    for pos, i in enumerate(local_max):
        threshold = diff[i] - sensitivity * step
        end = local_max[pos + 1] if pos + 1 < len(local_max) else n
        if any(diff[j] < threshold for j in range(i + 1, end)):
            confirmed.append(i)
    if confirmed:
        best = max(confirmed, key=lambda i: (diff[i], -i))
        return ks[best]
    warnings.warn("no knee passed the sensitivity test", KneeWarning, stacklevel=2)
    return ks[int(np.argmax(diff))]


def knee_of(ks: Sequence[int], costs: Sequence[float]) -> int:
    return knee(CostCurve(tuple(ks), tuple(costs)))
