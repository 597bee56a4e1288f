"""Brute-force reference archive used to cross-check the fast implementation.

Re-derives every insertion decision from the full pairwise distance matrix,
with the same fixed tie-breaks (lowest index first).  Deliberately written
with plain loops and per-pair distance calls so it shares no bookkeeping
with the incremental implementation.
"""

from __future__ import annotations

import numpy as np

from armoga.archive import objective_distance


class BruteForceArchive:
    def __init__(self, capacity: int):
        self.capacity = capacity
        self.points: list[np.ndarray] = []

    def _distance_matrix(self) -> np.ndarray:
        n = len(self.points)
        D = np.full((n, n), np.inf)
        for i in range(n):
            for j in range(n):
                if i != j:
                    D[i, j] = objective_distance(self.points[i], self.points[j])
        return D

    def nn_links(self) -> list[tuple[int, float]]:
        """(index, distance) of the closest neighbour of each point."""
        D = self._distance_matrix()
        links = []
        for i in range(len(self.points)):
            j = int(np.argmin(D[i]))
            links.append((j, float(D[i, j])))
        return links

    def min_pair(self) -> tuple[int, int, float]:
        D = self._distance_matrix()
        best = float(D.min())
        for i in range(len(self.points)):
            for j in range(len(self.points)):
                if i != j and D[i, j] == best:
                    return i, j, best
        raise AssertionError("unreachable")

    def try_insert(self, obj: np.ndarray) -> tuple[str, int | None]:
        obj = np.asarray(obj, dtype=float)
        for p in self.points:
            if np.array_equal(p, obj):
                return "discarded_dominated", None
            if np.all(p <= obj) and np.any(p < obj):
                return "discarded_dominated", None
        dominated = [
            i for i, p in enumerate(self.points) if np.all(obj <= p) and np.any(obj < p)
        ]
        if dominated:
            for i in reversed(dominated):
                del self.points[i]
            self.points.append(obj)
            return "added_dominating", len(dominated)
        if len(self.points) < self.capacity:
            self.points.append(obj)
            return "added_free_slot", None

        i1, i2, d_min = self.min_pair()
        d = [objective_distance(p, obj) for p in self.points]

        def min_excluding(idx):
            vals = [d[k] for k in range(len(d)) if k != idx]
            return min(vals) if vals else np.inf

        if min_excluding(i1) > d_min:
            victim = i1
        elif min_excluding(i2) > d_min:
            victim = i2
        else:
            c = int(np.argmin(d))
            row_c = min(
                objective_distance(self.points[c], self.points[k])
                for k in range(len(self.points))
                if k != c
            )
            if min_excluding(c) > row_c:
                del self.points[c]
                self.points.append(obj)
                return "replaced_local", c
            return "discarded_by_diversity", None
        del self.points[victim]
        self.points.append(obj)
        return "replaced_global", victim


def nondominated_stream(rng: np.random.Generator, k: int, count: int) -> np.ndarray:
    """Random points on the unit simplex: any two are mutually non-dominating."""
    raw = -np.log(rng.random((count, k)))
    return raw / raw.sum(axis=1, keepdims=True)
