"""Bounded Pareto archive with incremental nearest-neighbour bookkeeping.

The archive admits one candidate at a time.  Dominated candidates are
rejected, dominating candidates evict everything they dominate, and when the
archive is full a replacement is accepted only if it improves the spacing of
the stored front: either globally (raising the minimum pairwise distance) or
locally (raising the nearest-neighbour distance of the candidate's closest
entry).  Every entry keeps a link to its closest neighbour in objective
space, so each admission decision costs a single pass over the archive.

A crowding-distance eviction policy is provided as an alternative, for A/B
comparison against the distance-based rule.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ArchiveEntry",
    "ArchiveError",
    "Individual",
    "InsertOutcome",
    "InsertResult",
    "ParetoArchive",
    "crowding_distances",
    "crowding_prune",
    "dominates",
    "objective_distance",
]

_NO_NEIGHBOUR = -1


class ArchiveError(ValueError):
    """Contract violation in an archive operation."""


@dataclass(frozen=True)
class Individual:
    """A design vector together with its evaluated objective vector."""

    design: np.ndarray
    objectives: np.ndarray

    @classmethod
    def from_design(cls, problem, design) -> "Individual":
        """Evaluate ``design`` on ``problem`` and wrap the result."""
        design = np.asarray(design, dtype=float)
        return cls(design=design, objectives=problem.evaluate(design))


@dataclass(frozen=True)
class ArchiveEntry:
    """Read-only view of one archived individual and its neighbour link."""

    individual: Individual
    nn_index: int
    nn_dist: float


class InsertOutcome(enum.Enum):
    DISCARDED_DOMINATED = "discarded_dominated"
    ADDED_DOMINATING = "added_dominating"
    ADDED_FREE_SLOT = "added_free_slot"
    REPLACED_GLOBAL = "replaced_global"
    REPLACED_LOCAL = "replaced_local"
    REPLACED_CROWDED = "replaced_crowded"
    DISCARDED_BY_DIVERSITY = "discarded_by_diversity"


_ACCEPTING = {
    InsertOutcome.ADDED_DOMINATING,
    InsertOutcome.ADDED_FREE_SLOT,
    InsertOutcome.REPLACED_GLOBAL,
    InsertOutcome.REPLACED_LOCAL,
    InsertOutcome.REPLACED_CROWDED,
}


@dataclass(frozen=True)
class InsertResult:
    outcome: InsertOutcome
    removed_count: int = 0
    victim_index: int | None = None

    @property
    def accepted(self) -> bool:
        return self.outcome in _ACCEPTING


def dominates(a, b) -> bool:
    """Pareto dominance for minimisation: ``a`` no worse everywhere, better somewhere."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ArchiveError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def objective_distance(a, b) -> float:
    """Euclidean distance between two objective vectors."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ArchiveError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def crowding_distances(objectives: np.ndarray) -> np.ndarray:
    """NSGA-II style crowding distance of each point in a non-dominated set.

    Per-objective neighbour gaps are normalised by that objective's range;
    sorted-boundary points get +inf.  Objectives with zero range contribute
    nothing (and mark no boundaries).
    """
    F = np.asarray(objectives, dtype=float)
    n = F.shape[0]
    cd = np.zeros(n)
    if n <= 2:
        cd[:] = math.inf
        return cd
    for j in range(F.shape[1]):
        order = np.argsort(F[:, j], kind="stable")
        vals = F[order, j]
        span = vals[-1] - vals[0]
        if span <= 0.0:
            continue
        cd[order[0]] = math.inf
        cd[order[-1]] = math.inf
        cd[order[1:-1]] += (vals[2:] - vals[:-2]) / span
    return cd


def crowding_prune(individuals: list[Individual], capacity: int) -> list[Individual]:
    """Drop lowest-crowding members (recomputing after each drop) until
    ``capacity`` remain.  Ties drop the lowest index."""
    if capacity < 2:
        raise ArchiveError("crowding_prune needs capacity >= 2")
    kept = list(individuals)
    while len(kept) > capacity:
        F = np.stack([ind.objectives for ind in kept])
        victim = int(np.argmin(crowding_distances(F)))
        del kept[victim]
    return kept


class ParetoArchive:
    """Fixed-capacity store of mutually non-dominated individuals.

    ``policy`` selects how a full archive resolves a non-dominated,
    non-dominating candidate: ``"distance"`` applies the global/local
    minimum-distance improvement checks, ``"crowding"`` evicts the entry of
    smallest crowding distance from the (capacity + 1)-sized union.

    ``update_counter`` counts nearest-neighbour links that had to be rebuilt
    from scratch because their target was evicted; ``insert_counter`` counts
    accepted insertions.  Their ratio is the per-insertion update cost.
    """

    def __init__(self, capacity: int, n_objectives: int, policy: str = "distance"):
        if capacity < 1:
            raise ArchiveError("capacity must be >= 1")
        if n_objectives < 2:
            raise ArchiveError("need at least 2 objectives")
        if policy not in ("distance", "crowding"):
            raise ArchiveError(f"unknown archive policy: {policy!r}")
        self.capacity = int(capacity)
        self.n_objectives = int(n_objectives)
        self.policy = policy
        self.size = 0
        self.update_counter = 0
        self.insert_counter = 0
        self._obj = np.empty((self.capacity, self.n_objectives), dtype=float)
        self._nn_idx = np.full(self.capacity, _NO_NEIGHBOUR, dtype=np.int64)
        self._nn_dist = np.full(self.capacity, math.inf, dtype=float)
        self._designs: list[np.ndarray] = []

    def __len__(self) -> int:
        return self.size

    @property
    def objectives(self) -> np.ndarray:
        return self._obj[: self.size].copy()

    @property
    def designs(self) -> list[np.ndarray]:
        return [d.copy() for d in self._designs]

    @property
    def nn_indices(self) -> np.ndarray:
        return self._nn_idx[: self.size].copy()

    @property
    def nn_distances(self) -> np.ndarray:
        return self._nn_dist[: self.size].copy()

    def individuals(self) -> list[Individual]:
        return [
            Individual(design=self._designs[i].copy(), objectives=self._obj[i].copy())
            for i in range(self.size)
        ]

    @property
    def entries(self) -> list[ArchiveEntry]:
        inds = self.individuals()
        return [
            ArchiveEntry(inds[i], int(self._nn_idx[i]), float(self._nn_dist[i]))
            for i in range(self.size)
        ]

    def extremal_member(self, objective: int) -> Individual:
        """The entry minimising one objective (lowest index on ties)."""
        if self.size == 0:
            raise ArchiveError("archive is empty")
        i = int(np.argmin(self._obj[: self.size, objective]))
        return Individual(design=self._designs[i], objectives=self._obj[i].copy())

    def min_pair(self) -> tuple[int, int, float]:
        """Indices and distance of a closest pair, read off the stored links.

        Ties resolve to the pair with the lowest first index.
        """
        if self.size < 2:
            raise ArchiveError("min_pair needs at least 2 entries")
        i = int(np.argmin(self._nn_dist[: self.size]))
        return i, int(self._nn_idx[i]), float(self._nn_dist[i])

    def try_insert(self, individual: Individual) -> InsertResult:
        """Offer one individual to the archive and report what happened."""
        obj = np.asarray(individual.objectives, dtype=float)
        if obj.shape != (self.n_objectives,):
            raise ArchiveError(
                f"objective vector of shape {obj.shape}, expected ({self.n_objectives},)"
            )
        if not np.all(np.isfinite(obj)):
            raise ArchiveError(f"non-finite objective values: {obj}")

        if self.size == 0:
            self._splice([], individual, obj, None)
            self.insert_counter += 1
            return InsertResult(InsertOutcome.ADDED_FREE_SLOT)

        current = self._obj[: self.size]
        le = current <= obj
        lt = current < obj
        dominated_by_entry = np.logical_and(le.all(axis=1), lt.any(axis=1))
        if dominated_by_entry.any() or (current == obj).all(axis=1).any():
            return InsertResult(InsertOutcome.DISCARDED_DOMINATED)

        ge = current >= obj
        gt = current > obj
        entry_dominated = np.logical_and(ge.all(axis=1), gt.any(axis=1))
        if entry_dominated.any():
            removed = np.flatnonzero(entry_dominated).tolist()
            self._splice(removed, individual, obj, None)
            self.insert_counter += 1
            return InsertResult(InsertOutcome.ADDED_DOMINATING, removed_count=len(removed))

        if self.size < self.capacity:
            self._splice([], individual, obj, None)
            self.insert_counter += 1
            return InsertResult(InsertOutcome.ADDED_FREE_SLOT)

        if self.policy == "crowding":
            return self._insert_full_crowding(individual, obj)
        return self._insert_full_distance(individual, obj)

    # -- full-archive resolution ------------------------------------------

    def _insert_full_distance(self, individual: Individual, obj: np.ndarray) -> InsertResult:
        if self.size == 1:
            # No pair exists; all improvement minima are vacuous (+inf), and
            # the strict inequalities fail.
            return InsertResult(InsertOutcome.DISCARDED_BY_DIVERSITY)
        d = self._distances_to(obj)

        i1 = int(np.argmin(self._nn_dist[: self.size]))
        i2 = int(self._nn_idx[i1])
        d_min_pair = float(self._nn_dist[i1])

        if _min_excluding(d, i1) > d_min_pair:
            victim, outcome = i1, InsertOutcome.REPLACED_GLOBAL
        elif _min_excluding(d, i2) > d_min_pair:
            victim, outcome = i2, InsertOutcome.REPLACED_GLOBAL
        else:
            closest = int(np.argmin(d))
            if _min_excluding(d, closest) > float(self._nn_dist[closest]):
                victim, outcome = closest, InsertOutcome.REPLACED_LOCAL
            else:
                return InsertResult(InsertOutcome.DISCARDED_BY_DIVERSITY)

        self._splice([victim], individual, obj, d)
        self.insert_counter += 1
        return InsertResult(outcome, removed_count=1, victim_index=victim)

    def _insert_full_crowding(self, individual: Individual, obj: np.ndarray) -> InsertResult:
        union = np.concatenate([self._obj[: self.size], obj[None, :]], axis=0)
        victim = int(np.argmin(crowding_distances(union)))
        if victim == self.size:
            return InsertResult(InsertOutcome.DISCARDED_BY_DIVERSITY)
        self._splice([victim], individual, obj, self._distances_to(obj))
        self.insert_counter += 1
        return InsertResult(InsertOutcome.REPLACED_CROWDED, removed_count=1, victim_index=victim)

    # -- internal bookkeeping ---------------------------------------------

    def _distances_to(self, obj: np.ndarray) -> np.ndarray:
        diff = self._obj[: self.size] - obj
        return np.sqrt(np.sum(diff * diff, axis=1))

    def _splice(
        self,
        removed: list[int],
        individual: Individual,
        obj: np.ndarray,
        cand_dists: np.ndarray | None,
    ) -> None:
        """Remove ``removed`` (old indices), append the newcomer, repair links.

        Survivors keep their relative order; the newcomer takes the last
        slot.  A survivor whose link target was evicted gets a full
        nearest-neighbour recomputation (counted in ``update_counter``);
        otherwise the kept link is only checked against the newcomer.
        """
        old_size = self.size
        keep = np.ones(old_size, dtype=bool)
        keep[removed] = False
        survivors = np.flatnonzero(keep)
        n_surv = survivors.size

        old_nn_idx = self._nn_idx[:old_size].copy()
        old_nn_dist = self._nn_dist[:old_size].copy()
        remap = np.full(old_size, _NO_NEIGHBOUR, dtype=np.int64)
        remap[survivors] = np.arange(n_surv)

        if n_surv != old_size:
            self._obj[:n_surv] = self._obj[:old_size][survivors]
            self._designs = [self._designs[i] for i in survivors]
        new_index = n_surv
        self._obj[new_index] = obj
        self._designs.append(np.asarray(individual.design, dtype=float))
        self.size = n_surv + 1

        if self.size == 1:
            self._nn_idx[0] = _NO_NEIGHBOUR
            self._nn_dist[0] = math.inf
            return

        if cand_dists is not None:
            newcomer_d = cand_dists[survivors]
        else:
            newcomer_d = self._distances_to(obj)[:n_surv]

        for new_i in range(n_surv):
            old_i = survivors[new_i]
            target = old_nn_idx[old_i]
            if target == _NO_NEIGHBOUR:
                # Only possible when the archive held a single entry before.
                self._nn_idx[new_i] = new_index
                self._nn_dist[new_i] = newcomer_d[new_i]
            elif keep[target]:
                if newcomer_d[new_i] < old_nn_dist[old_i]:
                    self._nn_idx[new_i] = new_index
                    self._nn_dist[new_i] = newcomer_d[new_i]
                else:
                    self._nn_idx[new_i] = remap[target]
                    self._nn_dist[new_i] = old_nn_dist[old_i]
            else:
                self._recompute_link(new_i)
                self.update_counter += 1

        j = int(np.argmin(newcomer_d))
        self._nn_idx[new_index] = j
        self._nn_dist[new_index] = newcomer_d[j]

    def _recompute_link(self, i: int) -> None:
        diff = self._obj[: self.size] - self._obj[i]
        d = np.sqrt(np.sum(diff * diff, axis=1))
        d[i] = math.inf
        j = int(np.argmin(d))
        self._nn_idx[i] = j
        self._nn_dist[i] = d[j]


def _min_excluding(d: np.ndarray, i: int) -> float:
    """Minimum of ``d`` over all positions except ``i`` (+inf if none)."""
    if d.shape[0] <= 1:
        return math.inf
    saved = d[i]
    d[i] = math.inf
    m = float(d.min())
    d[i] = saved
    return m
