"""Initial-mode selection: random, Huang, Cao and hospital-resident matching.

Every method returns the *row indices* of ``k`` dataset rows with pairwise
distinct values; ``dataset.codes[idx]`` gives the modes themselves.

Seeded methods draw from one numpy ``PCG64`` stream per call, keyed on
``(seed, method label)``, so the same seed never couples two methods'
draws.
"""

from __future__ import annotations

import zlib

import numpy as np

from .core import ContractError, Dataset, density_counts, dissimilarities, frequencies
from .matching import HRInstance, Matching, solve

METHODS = ("random", "huang", "cao", "matching")
STOCHASTIC = ("random", "huang", "matching")


def make_rng(seed: int | None, label: str) -> np.random.Generator:
    if seed is None:
        return np.random.default_rng()
    if int(seed) < 0:
        raise ContractError("seeds must be non-negative integers")
    key = zlib.crc32(label.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([int(seed), key]))


def _check_k(dataset: Dataset, k: int) -> None:
    if k < 1:
        raise ContractError("k must be at least 1")
    distinct = dataset.n_distinct()
    if k > distinct:
        raise ContractError(f"k={k} exceeds the {distinct} distinct rows available")


def random_init(dataset: Dataset, k: int, seed: int | None = None) -> np.ndarray:
    """``k`` rows drawn uniformly without replacement from the distinct rows."""
    _check_k(dataset, k)
    rng = make_rng(seed, "random")
    return rng.choice(dataset.distinct_row_indices(), size=k, replace=False)


def sample_potential_modes(
    dataset: Dataset,
    k: int,
    seed: int | None = None,
    *,
    rng: np.random.Generator | None = None,
) -> np.ndarray:
    """Draw ``k`` points of the attribute space, one attribute at a time.

    Coordinate ``j`` of each point is drawn independently with the
    category's relative frequency in the dataset as its probability.
    Duplicates are allowed.
    """
    if k < 1:
        raise ContractError("k must be at least 1")
    if rng is None:
        rng = make_rng(seed, "potential-modes")
    out = np.empty((k, dataset.m), dtype=np.int64)
    for j in range(dataset.m):
        p = frequencies(dataset, j) / dataset.n
        out[:, j] = rng.choice(len(p), size=k, p=p)
    return out


def _block(codes: np.ndarray, blocked: np.ndarray, row: np.ndarray) -> None:
    blocked |= (codes == row).all(axis=1)


def replace_greedily(dataset: Dataset, potential_modes: np.ndarray) -> np.ndarray:
    """Swap each potential mode, in order, for its nearest unused row."""
    codes = dataset.codes
    blocked = np.zeros(dataset.n, dtype=bool)
    chosen = []
    for z in potential_modes:
        d = np.where(blocked, dataset.m + 1, dissimilarities(codes, z))
        i = int(np.argmin(d))
        if blocked[i]:
            raise ContractError("ran out of distinct rows")
        chosen.append(i)
        _block(codes, blocked, codes[i])
    return np.asarray(chosen, dtype=np.int64)


def huang_init(dataset: Dataset, k: int, seed: int | None = None) -> np.ndarray:
    _check_k(dataset, k)
    rng = make_rng(seed, "huang")
    return replace_greedily(dataset, sample_potential_modes(dataset, k, rng=rng))


def cao_init(dataset: Dataset, k: int) -> np.ndarray:
    """Densest row first, then repeatedly the row whose density-weighted
    distance to its nearest chosen mode is largest. Deterministic; ties go to
    the lowest row index."""
    _check_k(dataset, k)
    codes = dataset.codes
    # integer numerators keep density ties exact
    dens = density_counts(dataset)
    first = int(np.argmax(dens))
    chosen = [first]
    score = dens * dissimilarities(codes, codes[first])
    blocked = np.zeros(dataset.n, dtype=bool)
    _block(codes, blocked, codes[first])
    while len(chosen) < k:
        i = int(np.argmax(np.where(blocked, -1, score)))
        chosen.append(i)
        _block(codes, blocked, codes[i])
        score = np.minimum(score, dens * dissimilarities(codes, codes[i]))
    return np.asarray(chosen, dtype=np.int64)


def build_game(dataset: Dataset, potential_modes: np.ndarray) -> HRInstance:
    """The hospital-resident game between potential modes and nearby rows.

    Resident ``r`` (the ``r``-th potential mode) ranks the ``k`` distinct
    rows least dissimilar to it, nearest first, ties to the lower row index.
    Each listed row is a hospital with one place that ranks only the
    residents listing it, nearest first. Ties among residents are broken by
    their category codes, which keeps the outcome independent of resident
    order.
    """
    potential_modes = np.asarray(potential_modes, dtype=np.int64)
    k = len(potential_modes)
    candidates = dataset.distinct_row_indices()
    if k > len(candidates):
        raise ContractError(f"k={k} exceeds the {len(candidates)} distinct rows available")
    cand_codes = dataset.codes[candidates]
    resident_prefs = {}
    for r, z in enumerate(potential_modes):
        order = np.argsort(dissimilarities(cand_codes, z), kind="stable")[:k]
        resident_prefs[r] = tuple(int(h) for h in candidates[order])
    rankers: dict[int, list[int]] = {}
    for r, prefs in resident_prefs.items():
        for h in prefs:
            rankers.setdefault(h, []).append(r)
    hospital_prefs = {}
    for h, rs in rankers.items():
        row = dataset.codes[h]
        hospital_prefs[h] = tuple(
            sorted(
                rs,
                key=lambda r: (
                    int(np.count_nonzero(potential_modes[r] != row)),
                    tuple(potential_modes[r].tolist()),
                    r,
                ),
            )
        )
    hospitals = sorted(rankers)
    return HRInstance(
        residents=range(k),
        hospitals=hospitals,
        capacities={h: 1 for h in hospitals},
        resident_prefs=resident_prefs,
        hospital_prefs=hospital_prefs,
    )


def match_potential_modes(
    dataset: Dataset, potential_modes: np.ndarray
) -> tuple[np.ndarray, HRInstance, Matching]:
    """Replace each potential mode with its partner in the stable matching."""
    game = build_game(dataset, potential_modes)
    matching = solve(game)
    unmatched = [r for r in game.residents if matching[r] is None]
    # k residents each listing k unit-capacity hospitals cannot all be refused
    assert not unmatched, f"residents left unmatched: {unmatched}"
    rows = np.asarray([matching[r] for r in game.residents], dtype=np.int64)
    return rows, game, matching


def matching_init(dataset: Dataset, k: int, seed: int | None = None) -> np.ndarray:
    _check_k(dataset, k)
    rng = make_rng(seed, "matching")
    potential = sample_potential_modes(dataset, k, rng=rng)
    rows, _, _ = match_potential_modes(dataset, potential)
    return rows


def initialise(dataset: Dataset, k: int, method: str, seed: int | None = None) -> np.ndarray:
    """Dispatch to one of :data:`METHODS`; ``seed`` is ignored by ``cao``."""
    if method == "random":
        return random_init(dataset, k, seed)
    if method == "huang":
        return huang_init(dataset, k, seed)
    if method == "cao":
        return cao_init(dataset, k)
    if method == "matching":
        return matching_init(dataset, k, seed)
    raise ContractError(f"unknown initialisation {method!r}; choose from {METHODS}")
