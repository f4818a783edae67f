"""The k-modes refinement loop.

Points are first assigned to their closest initial mode and every mode is
then recomputed from its members. The repeat loop visits rows in dataset
order and applies each move immediately, refreshing the two affected modes
before the next row is examined.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .core import ContractError, Dataset, choose_category, cost, dissimilarities

DEFAULT_MAX_ITERATIONS = 100

_MIN_BLOCK = 32
_MAX_BLOCK = 4096


class DegenerateInitialisation(ContractError):
    """An initial mode attracted no rows, so its cluster would be empty."""

    def __init__(self, cluster: int):
        super().__init__(f"cluster {cluster} received no rows during initial assignment")
        self.cluster = cluster


@dataclass
class Clustering:
    """Hard partition of a dataset's rows into ``k`` clusters with their modes."""

    assignment: np.ndarray
    modes: np.ndarray

    @property
    def k(self) -> int:
        return len(self.modes)

    @property
    def members(self) -> list[set[int]]:
        groups: list[set[int]] = [set() for _ in range(self.k)]
        for i, l in enumerate(self.assignment.tolist()):
            groups[l].add(i)
        return groups

    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignment, minlength=self.k)

    def copy(self) -> "Clustering":
        return Clustering(self.assignment.copy(), self.modes.copy())


@dataclass
class FitResult:
    clustering: Clustering
    initial_cost: int
    final_cost: int
    n_iterations: int
    elapsed_seconds: float
    seed: int | None = None
    init_label: str = ""
    converged: bool = True
    cost_trace: tuple[int, ...] = field(default=())


def select_closest(x, modes: np.ndarray) -> int:
    """Index of the mode nearest to ``x``; ties go to the lowest index."""
    modes = np.atleast_2d(np.asarray(modes))
    if modes.shape[0] == 0:
        raise ContractError("need at least one mode")
    return int(np.argmin(dissimilarities(modes, x)))


def _closest(rows: np.ndarray, modes: np.ndarray) -> np.ndarray:
    # (n, k) dissimilarity table reduced to argmin, chunked to bound memory
    out = np.empty(rows.shape[0], dtype=np.int64)
    step = max(1, 4_000_000 // max(1, modes.size))
    for start in range(0, rows.shape[0], step):
        block = rows[start : start + step]
        d = np.count_nonzero(block[:, None, :] != modes[None, :, :], axis=2)
        out[start : start + step] = np.argmin(d, axis=1)
    return out


def _check_modes(dataset: Dataset, initial_modes) -> np.ndarray:
    modes = np.array(initial_modes, dtype=np.int64, ndmin=2)
    k = modes.shape[0]
    if modes.shape[1] != dataset.m:
        raise ContractError("initial modes do not match the dataset width")
    if k < 1:
        raise ContractError("k must be at least 1")
    if k > dataset.n:
        raise ContractError(f"k={k} exceeds the number of rows N={dataset.n}")
    if np.unique(modes, axis=0).shape[0] != k:
        raise ContractError("initial modes must be distinct")
    rows = dataset.row_set
    for l, z in enumerate(modes.tolist()):
        if tuple(z) not in rows:
            raise ContractError(f"initial mode {l} is not a row of the dataset")
    return modes


class _Counts:
    """Per-cluster, per-attribute category counts backing incremental modes."""

    def __init__(self, dataset: Dataset, clustering: Clustering):
        self.sizes = dataset.space.sizes
        width = max(self.sizes)
        self.table = np.zeros((clustering.k, dataset.m, width), dtype=np.int64)
        cols = np.broadcast_to(np.arange(dataset.m), dataset.codes.shape)
        np.add.at(
            self.table,
            (clustering.assignment[:, None], cols, dataset.codes),
            1,
        )
        self._attrs = np.arange(dataset.m)

    def add(self, l: int, x: np.ndarray) -> None:
        self.table[l, self._attrs, x] += 1

    def remove(self, l: int, x: np.ndarray) -> None:
        self.table[l, self._attrs, x] -= 1

    def refresh_mode(self, l: int, mode: np.ndarray) -> None:
        for j, d in enumerate(self.sizes):
            mode[j] = choose_category(self.table[l, j, :d], int(mode[j]))


def initial_assignment(dataset: Dataset, initial_modes) -> Clustering:
    """Assign every row to its closest initial mode, then update all modes.

    Raises
    ------
    DegenerateInitialisation
        If some initial mode attracts no rows (only possible under ties
        between identical modes, which :func:`fit` already rejects).
    """
    modes = np.array(initial_modes, dtype=np.int64, ndmin=2)
    assignment = _closest(dataset.codes, modes)
    sizes = np.bincount(assignment, minlength=len(modes))
    if (sizes == 0).any():
        raise DegenerateInitialisation(int(np.flatnonzero(sizes == 0)[0]))
    clustering = Clustering(assignment, modes.copy())
    counts = _Counts(dataset, clustering)
    for l in range(clustering.k):
        counts.refresh_mode(l, clustering.modes[l])
    return clustering


def iterate(dataset: Dataset, clustering: Clustering) -> int:
    """Run one pass of the repeat loop in place and return the number of moves.

    A move that would leave its source cluster empty is skipped.
    """
    codes = dataset.codes
    assignment, modes = clustering.assignment, clustering.modes
    counts = _Counts(dataset, clustering)
    sizes = clustering.sizes()
    n = dataset.n
    moved = 0
    i, block = 0, _MIN_BLOCK
    while i < n:
        stop = min(n, i + block)
        closest = _closest(codes[i:stop], modes)
        movers = np.flatnonzero(closest != assignment[i:stop])
        if movers.size == 0:
            i, block = stop, min(_MAX_BLOCK, block * 2)
            continue
        p = i + int(movers[0])
        target, source = int(closest[movers[0]]), int(assignment[p])
        i, block = p + 1, _MIN_BLOCK
        if sizes[source] == 1:
            continue
        x = codes[p]
        assignment[p] = target
        sizes[source] -= 1
        sizes[target] += 1
        counts.remove(source, x)
        counts.add(target, x)
        counts.refresh_mode(source, modes[source])
        counts.refresh_mode(target, modes[target])
        moved += 1
    return moved


def fit(
    dataset: Dataset,
    initial_modes,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
    *,
    seed: int | None = None,
    init_label: str = "",
) -> FitResult:
    """Run k-modes from the given initial modes.

    ``n_iterations`` counts passes of the repeat loop, so a clustering that
    is already stable reports one iteration. ``converged`` is False when the
    loop stopped at ``max_iterations`` with points still moving.
    """
    if max_iterations < 1:
        raise ContractError("max_iterations must be positive")
    start = time.perf_counter()
    modes = _check_modes(dataset, initial_modes)
    clustering = initial_assignment(dataset, modes)
    initial_cost = cost(dataset, clustering.assignment, clustering.modes)
    trace = [initial_cost]
    n_iterations, converged = 0, False
    while n_iterations < max_iterations:
        n_iterations += 1
        moved = iterate(dataset, clustering)
        trace.append(cost(dataset, clustering.assignment, clustering.modes))
        if moved == 0:
            converged = True
            break
    elapsed = time.perf_counter() - start
    return FitResult(
        clustering=clustering,
        initial_cost=initial_cost,
        final_cost=trace[-1],
        n_iterations=n_iterations,
        elapsed_seconds=elapsed,
        seed=seed,
        init_label=init_label,
        converged=converged,
        cost_trace=tuple(trace),
    )
