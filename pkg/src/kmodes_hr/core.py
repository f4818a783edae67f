"""Categorical data containers and the basic measures used by k-modes.

Everything operates on integer codes: each attribute's categories are mapped
to ``0..d_j-1`` in order of first appearance, and the label <-> code
bijection lives on :class:`AttributeSpace`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

import numpy as np


class ContractError(ValueError):
    """Raised when an operation's inputs break its documented preconditions."""


@dataclass(frozen=True)
class AttributeSpace:
    """Per-attribute category dictionaries.

    Parameters
    ----------
    categories : tuple of tuple of str
        ``categories[j][s]`` is the label of code ``s`` for attribute ``j``.
    names : tuple of str, optional
        Attribute (column) names. Defaults to ``"0", "1", ...``.
    """

    categories: tuple[tuple[str, ...], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        cats = tuple(tuple(str(c) for c in col) for col in self.categories)
        if not cats:
            raise ContractError("an attribute space needs at least one attribute")
        for j, col in enumerate(cats):
            if not col:
                raise ContractError(f"attribute {j} has no categories")
            if len(set(col)) != len(col):
                raise ContractError(f"attribute {j} has duplicate labels")
        names = tuple(self.names) or tuple(str(j) for j in range(len(cats)))
        if len(names) != len(cats):
            raise ContractError("names must match the number of attributes")
        object.__setattr__(self, "categories", cats)
        object.__setattr__(self, "names", names)
        object.__setattr__(
            self, "_lookup", tuple({c: s for s, c in enumerate(col)} for col in cats)
        )

    @property
    def m(self) -> int:
        return len(self.categories)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(col) for col in self.categories)

    def encode(self, labels: Sequence[Hashable]) -> tuple[int, ...]:
        if len(labels) != self.m:
            raise ContractError(f"expected {self.m} values, got {len(labels)}")
        try:
            return tuple(self._lookup[j][str(v)] for j, v in enumerate(labels))
        except KeyError as exc:
            raise ContractError(f"unknown category {exc.args[0]!r}") from None

    def decode(self, codes: Sequence[int]) -> tuple[str, ...]:
        if len(codes) != self.m:
            raise ContractError(f"expected {self.m} codes, got {len(codes)}")
        return tuple(self.categories[j][int(c)] for j, c in enumerate(codes))

    def contains(self, codes: Sequence[int]) -> bool:
        return len(codes) == self.m and all(
            0 <= int(c) < d for c, d in zip(codes, self.sizes)
        )


@dataclass(frozen=True, eq=False)
class Dataset:
    """An ``N x m`` integer-coded categorical dataset.

    ``codes`` is read-only; ``row_ids`` holds the source row index of each
    row so provenance survives filtering at ingestion.
    """

    space: AttributeSpace
    codes: np.ndarray
    row_ids: np.ndarray = field(default=None)

    def __post_init__(self):
        codes = np.array(self.codes, dtype=np.int64, copy=True)
        if codes.ndim != 2 or codes.shape[0] < 1:
            raise ContractError("a dataset needs a non-empty 2-d code matrix")
        if codes.shape[1] != self.space.m:
            raise ContractError("code matrix width does not match the space")
        sizes = np.asarray(self.space.sizes)
        if (codes < 0).any() or (codes >= sizes).any():
            raise ContractError("codes fall outside the attribute space")
        for j, d in enumerate(sizes):
            if np.unique(codes[:, j]).size != d:
                raise ContractError(f"attribute {j} declares unobserved categories")
        codes.setflags(write=False)
        ids = (
            np.arange(codes.shape[0])
            if self.row_ids is None
            else np.asarray(self.row_ids, dtype=np.int64).copy()
        )
        if ids.shape != (codes.shape[0],):
            raise ContractError("row_ids must have one entry per row")
        ids.setflags(write=False)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "row_ids", ids)

    @classmethod
    def from_rows(
        cls,
        rows: Iterable[Sequence[Hashable]],
        names: Sequence[str] | None = None,
        row_ids: Sequence[int] | None = None,
    ) -> "Dataset":
        """Encode raw category labels in first-appearance order."""
        rows = [tuple(str(v) for v in row) for row in rows]
        if not rows:
            raise ContractError("cannot build a dataset from zero rows")
        m = len(rows[0])
        if any(len(r) != m for r in rows):
            raise ContractError("rows have inconsistent lengths")
        lookups: list[dict[str, int]] = [{} for _ in range(m)]
        codes = np.empty((len(rows), m), dtype=np.int64)
        for i, row in enumerate(rows):
            for j, value in enumerate(row):
                codes[i, j] = lookups[j].setdefault(value, len(lookups[j]))
        space = AttributeSpace(
            tuple(tuple(lk) for lk in lookups), tuple(names) if names else ()
        )
        return cls(space, codes, None if row_ids is None else np.asarray(row_ids))

    @property
    def n(self) -> int:
        return self.codes.shape[0]

    @property
    def m(self) -> int:
        return self.codes.shape[1]

    def __len__(self) -> int:
        return self.n

    def row(self, i: int) -> np.ndarray:
        return self.codes[i]

    def decoded(self) -> list[tuple[str, ...]]:
        return [self.space.decode(r) for r in self.codes]

    def distinct_row_indices(self) -> np.ndarray:
        """Index of the first occurrence of every distinct row, ascending."""
        _, first = np.unique(self.codes, axis=0, return_index=True)
        return np.sort(first)

    @cached_property
    def row_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(map(tuple, self.codes.tolist()))

    def n_distinct(self) -> int:
        return int(np.unique(self.codes, axis=0).shape[0])


def _as_points(a, b) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.asarray(a), np.asarray(b)
    if a.shape[-1] != b.shape[-1]:
        raise ContractError(f"length mismatch: {a.shape[-1]} vs {b.shape[-1]}")
    return a, b


def dissimilarity(a: Sequence[int], b: Sequence[int]) -> int:
    """Number of attributes on which two points disagree."""
    a, b = _as_points(a, b)
    return int(np.count_nonzero(a != b))


def dissimilarities(rows: np.ndarray, z: Sequence[int]) -> np.ndarray:
    """Vectorised :func:`dissimilarity` of every row in ``rows`` to ``z``."""
    rows, z = _as_points(np.atleast_2d(rows), z)
    return np.count_nonzero(rows != z, axis=1)


def summed_dissimilarity(rows: np.ndarray, z: Sequence[int]) -> int:
    """Total dissimilarity of ``rows`` to ``z``; zero for an empty row set."""
    rows = np.asarray(rows)
    if rows.size == 0:
        return 0
    return int(dissimilarities(rows, z).sum())


def frequencies(dataset: Dataset, j: int) -> np.ndarray:
    """Count of each category code of attribute ``j``."""
    if not 0 <= j < dataset.m:
        raise IndexError(f"attribute index {j} out of range for m={dataset.m}")
    return np.bincount(dataset.codes[:, j], minlength=dataset.space.sizes[j])


def density_counts(dataset: Dataset) -> np.ndarray:
    """Integer numerators of :func:`densities` (denominator ``m N``).

    Exact, so rows with equal density compare equal.
    """
    total = np.zeros(dataset.n, dtype=np.int64)
    for j in range(dataset.m):
        total += frequencies(dataset, j)[dataset.codes[:, j]]
    return total


def densities(dataset: Dataset) -> np.ndarray:
    """Average density of every row, from per-attribute frequency tables."""
    return density_counts(dataset) / (dataset.m * dataset.n)


def density(dataset: Dataset, i: int) -> float:
    """Mean relative frequency of row ``i``'s categories."""
    if not 0 <= i < dataset.n:
        raise IndexError(f"row index {i} out of range for N={dataset.n}")
    x = dataset.codes[i]
    rel = [frequencies(dataset, j)[x[j]] / dataset.n for j in range(dataset.m)]
    return float(sum(rel) / dataset.m)


def density_by_dissimilarity(dataset: Dataset, i: int) -> float:
    """Density of row ``i`` computed as ``1 - D(X, x) / (m N)``.

    Independent of the frequency tables; kept as a cross-check of
    :func:`density`.
    """
    if not 0 <= i < dataset.n:
        raise IndexError(f"row index {i} out of range for N={dataset.n}")
    total = summed_dissimilarity(dataset.codes, dataset.codes[i])
    return 1.0 - total / (dataset.m * dataset.n)


def cost(dataset: Dataset, assignment: Sequence[int], modes: np.ndarray) -> int:
    """Summed within-cluster dissimilarity of every row to its cluster's mode."""
    assignment = np.asarray(assignment)
    modes = np.asarray(modes)
    if assignment.shape != (dataset.n,):
        raise ContractError("assignment must give one cluster per row")
    if (assignment < 0).any() or (assignment >= len(modes)).any():
        raise ContractError("assignment contains an unassigned row")
    return int(np.count_nonzero(dataset.codes != modes[assignment]))


def choose_category(counts: np.ndarray, current: int | None = None) -> int:
    """Most frequent category, keeping ``current`` when it ties for the lead."""
    top = counts.max()
    if current is not None and 0 <= current < len(counts) and counts[current] == top:
        return int(current)
    return int(np.argmax(counts))


def mode_of(
    rows: np.ndarray,
    space: AttributeSpace,
    current: Sequence[int] | None = None,
) -> np.ndarray:
    """A point of the attribute space minimising summed dissimilarity to ``rows``.

    Per attribute the most frequent category is taken. Ties keep the
    category of ``current`` if it is among the leaders, otherwise the
    lowest code wins.
    """
    rows = np.atleast_2d(np.asarray(rows))
    if rows.shape[0] == 0 or rows.size == 0:
        raise ContractError("the mode of an empty cluster is undefined")
    if rows.shape[1] != space.m:
        raise ContractError("rows do not match the attribute space")
    mode = np.empty(space.m, dtype=np.int64)
    for j, d in enumerate(space.sizes):
        counts = np.bincount(rows[:, j], minlength=d)
        mode[j] = choose_category(counts, None if current is None else current[j])
    return mode
