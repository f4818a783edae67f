"""Hospital-resident games and a resident-optimal deferred-acceptance solver.

The module knows nothing about clustering; residents and hospitals are any
hashable ids. Preference lists are most-preferred first.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

Resident = Hashable
Hospital = Hashable

ENUMERATION_LIMIT = 25


class InvalidGame(ValueError):
    """The preference lists or capacities do not describe a valid game."""


class InvalidMatching(ValueError):
    """A matching breaks the validity conditions of its game."""


@dataclass(frozen=True, init=False, eq=False)
class HRInstance:
    """A hospital-resident game.

    Hospitals that no resident ranks are dropped on construction. Every
    remaining hospital must rank exactly the residents that rank it.
    """

    residents: tuple
    hospitals: tuple
    capacities: Mapping[Hospital, int]
    resident_prefs: Mapping[Resident, tuple]
    hospital_prefs: Mapping[Hospital, tuple]

    def __init__(
        self,
        residents: Sequence[Resident],
        hospitals: Sequence[Hospital],
        capacities: Mapping[Hospital, int],
        resident_prefs: Mapping[Resident, Sequence[Hospital]],
        hospital_prefs: Mapping[Hospital, Sequence[Resident]],
    ):
        residents = tuple(residents)
        if len(set(residents)) != len(residents):
            raise InvalidGame("resident ids must be unique")
        if len(set(hospitals)) != len(hospitals):
            raise InvalidGame("hospital ids must be unique")
        known = set(hospitals)
        f = {}
        for r in residents:
            prefs = tuple(resident_prefs.get(r, ()))
            if not prefs:
                raise InvalidGame(f"resident {r!r} ranks no hospital")
            if len(set(prefs)) != len(prefs):
                raise InvalidGame(f"resident {r!r} ranks a hospital twice")
            unknown = set(prefs) - known
            if unknown:
                raise InvalidGame(f"resident {r!r} ranks unknown hospitals {unknown}")
            f[r] = prefs
        rankers: dict[Hospital, set] = {h: set() for h in hospitals}
        for r, prefs in f.items():
            for h in prefs:
                rankers[h].add(r)
        kept = tuple(h for h in hospitals if rankers[h])
        g, caps = {}, {}
        for h in kept:
            prefs = tuple(hospital_prefs.get(h, ()))
            if len(prefs) != len(rankers[h]) or set(prefs) != rankers[h]:
                raise InvalidGame(
                    f"hospital {h!r} must rank exactly the residents that rank it"
                )
            cap = capacities.get(h)
            if not isinstance(cap, int) or cap < 1:
                raise InvalidGame(f"hospital {h!r} needs a positive integer capacity")
            g[h], caps[h] = prefs, cap
        object.__setattr__(self, "residents", residents)
        object.__setattr__(self, "hospitals", kept)
        object.__setattr__(self, "capacities", caps)
        object.__setattr__(self, "resident_prefs", f)
        object.__setattr__(self, "hospital_prefs", g)
        object.__setattr__(
            self, "_r_rank", {r: {h: i for i, h in enumerate(p)} for r, p in f.items()}
        )
        object.__setattr__(
            self, "_h_rank", {h: {r: i for i, r in enumerate(p)} for h, p in g.items()}
        )

    def resident_prefers(self, r: Resident, h: Hospital, other: Hospital | None) -> bool:
        """Whether ``r`` ranks ``h`` strictly above ``other`` (None = unmatched)."""
        ranks = self._r_rank[r]
        if h not in ranks:
            return False
        return other is None or ranks[h] < ranks[other]

    def hospital_rank(self, h: Hospital, r: Resident) -> int:
        return self._h_rank[h][r]


@dataclass(frozen=True, eq=False)
class Matching:
    """Resident -> hospital assignment together with its inverse."""

    resident_to_hospital: Mapping[Resident, Hospital]
    hospital_to_residents: Mapping[Hospital, frozenset]

    @classmethod
    def from_pairs(cls, pairs: Mapping[Resident, Hospital], hospitals=()) -> "Matching":
        inverse: dict[Hospital, set] = {h: set() for h in hospitals}
        for r, h in pairs.items():
            inverse.setdefault(h, set()).add(r)
        return cls(dict(pairs), {h: frozenset(rs) for h, rs in inverse.items()})

    def __getitem__(self, r: Resident) -> Hospital | None:
        return self.resident_to_hospital.get(r)

    def assignees(self, h: Hospital) -> frozenset:
        return self.hospital_to_residents.get(h, frozenset())

    def __eq__(self, other):
        if not isinstance(other, Matching):
            return NotImplemented
        return dict(self.resident_to_hospital) == dict(other.resident_to_hospital)

    def __hash__(self):
        return hash(frozenset(self.resident_to_hospital.items()))


def check_valid(instance: HRInstance, matching: Matching) -> None:
    """Raise :class:`InvalidMatching` unless ``matching`` is valid for the game."""
    for r, h in matching.resident_to_hospital.items():
        if r not in instance.resident_prefs:
            raise InvalidMatching(f"unknown resident {r!r}")
        if h not in instance._r_rank[r]:
            raise InvalidMatching(f"{r!r} is matched to unranked hospital {h!r}")
        if r not in matching.assignees(h):
            raise InvalidMatching(f"inverse map is missing {r!r} at {h!r}")
    for h, rs in matching.hospital_to_residents.items():
        if not rs:
            continue
        if h not in instance.hospital_prefs:
            raise InvalidMatching(f"unknown hospital {h!r}")
        for r in rs:
            if r not in instance._h_rank[h]:
                raise InvalidMatching(f"{h!r} holds unranked resident {r!r}")
            if matching[r] != h:
                raise InvalidMatching(f"inverse map disagrees for {r!r}")
        if len(rs) > instance.capacities[h]:
            raise InvalidMatching(f"{h!r} is over-subscribed")


def is_valid(instance: HRInstance, matching: Matching) -> bool:
    try:
        check_valid(instance, matching)
    except InvalidMatching:
        return False
    return True


def blocking_pairs(instance: HRInstance, matching: Matching) -> list[tuple]:
    """Every resident-hospital pair that blocks ``matching``.

    A pair blocks when they rank each other, the resident is unmatched or
    prefers the hospital to their match, and the hospital has a free place
    or prefers the resident to one of its assignees.
    """
    check_valid(instance, matching)
    pairs = []
    for r in instance.residents:
        current = matching[r]
        for h in instance.resident_prefs[r]:
            if h == current:
                break
            held = matching.assignees(h)
            if len(held) < instance.capacities[h]:
                pairs.append((r, h))
                continue
            rank = instance.hospital_rank(h, r)
            if any(rank < instance.hospital_rank(h, s) for s in held):
                pairs.append((r, h))
    return pairs


def is_stable(instance: HRInstance, matching: Matching) -> bool:
    return not blocking_pairs(instance, matching)


def solve(instance: HRInstance) -> Matching:
    """Resident-optimal stable matching by deferred acceptance.

    Free residents propose in order of their position in
    ``instance.residents``. Whenever a hospital fills up, every resident it
    ranks below its worst assignee is struck from its list (and it from
    theirs). The instance itself is never modified.
    """
    order = {r: i for i, r in enumerate(instance.residents)}
    f = {r: list(p) for r, p in instance.resident_prefs.items()}
    g = {h: list(p) for h, p in instance.hospital_prefs.items()}
    h_rank = instance._h_rank
    held: dict[Hospital, set] = {h: set() for h in instance.hospitals}
    match: dict[Resident, Hospital] = {}

    def delete_pair(r, h):
        if h in f[r]:
            f[r].remove(h)
        if r in g[h]:
            g[h].remove(r)

    def worst(h):
        return max(held[h], key=lambda s: h_rank[h][s])

    free = [(order[r], r) for r in instance.residents]
    heapq.heapify(free)
    while free:
        _, r = heapq.heappop(free)
        if r in match or not f[r]:
            continue
        h = f[r][0]
        held[h].add(r)
        match[r] = h
        capacity = instance.capacities[h]
        if len(held[h]) > capacity:
            loser = worst(h)
            held[h].discard(loser)
            del match[loser]
            heapq.heappush(free, (order[loser], loser))
        if len(held[h]) == capacity:
            cutoff = h_rank[h][worst(h)]
            for s in [s for s in g[h] if h_rank[h][s] > cutoff]:
                delete_pair(s, h)
        assert len(held[h]) <= capacity
    return Matching.from_pairs(match, instance.hospitals)


def enumerate_stable(instance: HRInstance) -> list[Matching]:
    """All stable matchings of a small game, by exhaustive search.

    Intended as a test oracle; refuses games with more than
    ``ENUMERATION_LIMIT`` resident-hospital combinations.
    """
    size = len(instance.residents) * len(instance.hospitals)
    if size > ENUMERATION_LIMIT:
        raise ValueError(f"game too large to enumerate ({size} > {ENUMERATION_LIMIT})")
    options = [(None,) + instance.resident_prefs[r] for r in instance.residents]
    found = []
    for choice in itertools.product(*options):
        load: dict[Hospital, int] = {}
        for h in choice:
            if h is not None:
                load[h] = load.get(h, 0) + 1
        if any(n > instance.capacities[h] for h, n in load.items()):
            continue
        pairs = {r: h for r, h in zip(instance.residents, choice) if h is not None}
        matching = Matching.from_pairs(pairs, instance.hospitals)
        if is_stable(instance, matching):
            found.append(matching)
    return found
