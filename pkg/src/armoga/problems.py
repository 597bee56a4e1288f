"""Three-objective benchmark problems and their exact-front projections.

Each problem evaluates designs inside a box and can project an arbitrary
objective vector onto its analytically known Pareto front, returning the
closest front point and the Euclidean distance to it.  The projections are
what the convergence metrics are built on.
"""

from __future__ import annotations

import math



import numpy as np

__all__ = ["Problem", "Dtlz1", "Dtlz2", "Dtlz4", "Wfg1", "get_problem", "PROBLEM_NAMES"]


class Problem:
    """Box-constrained minimisation problem with three objectives."""

    name: str
    n_var: int
    n_obj: int = 3

    def __init__(self):
        self.lower = np.zeros(self.n_var)
        self.upper = np.ones(self.n_var)

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_var,):
            raise ValueError(f"{self.name}: design of shape {x.shape}, expected ({self.n_var},)")
        return self.evaluate_batch(x[None, :])[0]

    def evaluate_batch(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[1] != self.n_var:
            raise ValueError(f"{self.name}: design batch of shape {X.shape}")
        if np.any(X < self.lower) or np.any(X > self.upper):
            raise ValueError(f"{self.name}: design outside the box bounds")
        return self._eval(X)

    def _eval(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def project_to_front(self, f) -> tuple[np.ndarray, float]:
        raise NotImplementedError


class Dtlz1(Problem):
    """Multi-modal problem whose front is the plane f1+f2+f3 = 0.5, f >= 0."""

    name = "dtlz1"
    n_var = 7

    def _eval(self, X):
        x1, x2 = X[:, 0], X[:, 1]
        xm = X[:, 2:] - 0.5
        g = 100.0 * (5.0 + np.sum(xm * xm - np.cos(20.0 * np.pi * xm), axis=1))
        half = 0.5 * (1.0 + g)
        return np.stack([half * x1 * x2, half * x1 * (1.0 - x2), half * (1.0 - x1)], axis=1)

    def project_to_front(self, f):
        f = np.asarray(f, dtype=float)
        p = _project_simplex(f, 0.5)
        return p, float(np.sqrt(np.sum((f - p) ** 2)))


class Dtlz2(Problem):
    """Front is the unit-sphere octant; tests convergence speed."""

    name = "dtlz2"
    n_var = 12

    def _eval(self, X):
        a = X[:, 0] * (np.pi / 2.0)
        b = X[:, 1] * (np.pi / 2.0)
        xm = X[:, 2:] - 0.5
        g1 = 1.0 + np.sum(xm * xm, axis=1)
        return np.stack(
            [g1 * np.cos(a) * np.cos(b), g1 * np.cos(a) * np.sin(b), g1 * np.sin(a)], axis=1
        )

    def project_to_front(self, f):
        return _project_sphere_octant(np.asarray(f, dtype=float))


class Dtlz4(Problem):
    """DTLZ2 with a degree-100 bias that pushes designs towards the axes."""

    name = "dtlz4"
    n_var = 12

    def _eval(self, X):
        a = X[:, 0] ** 100 * (np.pi / 2.0)
        b = X[:, 1] ** 100 * (np.pi / 2.0)
        xm = X[:, 2:] - 0.5
        g1 = 1.0 + np.sum(xm * xm, axis=1)
        return np.stack(
            [g1 * np.cos(a) * np.cos(b), g1 * np.cos(a) * np.sin(b), g1 * np.sin(a)], axis=1
        )

    def project_to_front(self, f):
        return _project_sphere_octant(np.asarray(f, dtype=float))


class Wfg1(Problem):
    """WFG1 with 24 variables (4 position, 20 distance) and a softened
    polynomial bias exponent of 0.2 to avoid float underflow."""

    name = "wfg1"
    n_var = 24
    n_position = 4
    poly_exponent = 0.2
    _grid_resolution = 101
    _refine_starts = 8

    def __init__(self):
        self.lower = np.zeros(self.n_var)
        self.upper = 2.0 * np.arange(1, self.n_var + 1, dtype=float)
        self._weights = 2.0 * np.arange(1, self.n_var + 1, dtype=float)
        self._front_grid: tuple[np.ndarray, np.ndarray] | None = None

    def _eval(self, X):
        k = self.n_position
        y = X / self.upper

        tail = y[:, k:]
        tail = np.abs(tail - 0.35) / np.abs(np.floor(0.35 - tail) + 0.35)
        a, b, c = 0.8, 0.75, 0.85
        tail = (
            a
            + np.minimum(0.0, np.floor(tail - b)) * (a * (b - tail) / b)
            - np.minimum(0.0, np.floor(c - tail)) * ((1.0 - a) * (tail - c) / (1.0 - c))
        )
        y = np.concatenate([y[:, :k], np.clip(tail, 0.0, 1.0)], axis=1)

        y = y ** self.poly_exponent

        w = self._weights
        z1 = (y[:, 0] * w[0] + y[:, 1] * w[1]) / (w[0] + w[1])
        z2 = (y[:, 2] * w[2] + y[:, 3] * w[3]) / (w[2] + w[3])
        dist = np.sum(y[:, k:] * w[k:], axis=1) / np.sum(w[k:])

        u = np.maximum(dist, 1.0)  # degeneracy constants are all 1 for WFG1
        p1 = u * (z1 - 0.5) + 0.5
        p2 = u * (z2 - 0.5) + 0.5
        h1, h2, h3 = self._shapes(p1, p2)
        return np.stack([dist + 2.0 * h1, dist + 4.0 * h2, dist + 6.0 * h3], axis=1)

    @staticmethod
    def _shapes(z1, z2):
        c1 = 1.0 - np.cos(z1 * (np.pi / 2.0))
        h1 = c1 * (1.0 - np.cos(z2 * (np.pi / 2.0)))
        h2 = c1 * (1.0 - np.sin(z2 * (np.pi / 2.0)))
        h3 = 1.0 - z1 - np.cos(10.0 * np.pi * z1 + np.pi / 2.0) / (10.0 * np.pi)
        return h1, h2, h3

    def front_point(self, z1, z2) -> np.ndarray:
        """Point of the exact front at front parameters (z1, z2) in [0, 1]^2."""
        h1, h2, h3 = self._shapes(np.asarray(z1, dtype=float), np.asarray(z2, dtype=float))
        return np.stack([2.0 * h1, 4.0 * h2, 6.0 * h3], axis=-1)

    def project_to_front(self, f):
        f = np.asarray(f, dtype=float)
        if self._front_grid is None:
            m = self._grid_resolution
            zz1, zz2 = np.meshgrid(np.linspace(0.0, 1.0, m), np.linspace(0.0, 1.0, m))
            params = np.stack([zz1.ravel(), zz2.ravel()], axis=1)
            self._front_grid = (params, self.front_point(params[:, 0], params[:, 1]))
        params, points = self._front_grid
        d2 = np.sum((points - f) ** 2, axis=1)
        # Spread the refinement starts: greedily take the best nodes that are
        # not parameter-space neighbours of an already chosen one, so flat
        # valleys cannot crowd out the basin that actually contains the
        # optimum.
        h = 1.0 / (self._grid_resolution - 1)
        order = np.argsort(d2, kind="stable")
        starts: list[int] = []
        for idx in order:
            if len(starts) >= self._refine_starts:
                break
            z = params[idx]
            if all(np.max(np.abs(z - params[s])) > 2.5 * h for s in starts):
                starts.append(int(idx))

        # Shrinking-grid pattern refinement from several starts: the
        # distance field folds where the surface is steep, so the globally
        # closest basin is not always the closest coarse node's.
        offsets = np.linspace(-1.0, 1.0, 9)
        best_z, best_sq = None, math.inf
        for s in starts:
            z1, z2 = params[s]
            half = 1.0 / (self._grid_resolution - 1)
            for _ in range(200):
                zz1 = np.clip(z1 + half * offsets, 0.0, 1.0)
                zz2 = np.clip(z2 + half * offsets, 0.0, 1.0)
                g1, g2 = np.meshgrid(zz1, zz2)
                cand = self.front_point(g1.ravel(), g2.ravel())
                i = int(np.argmin(np.sum((cand - f) ** 2, axis=1)))
                moved = max(abs(g1.ravel()[i] - z1), abs(g2.ravel()[i] - z2)) > 0.6 * half
                z1, z2 = g1.ravel()[i], g2.ravel()[i]
                if not moved:
                    half *= 0.25  # shrink only once the optimum is interior
                    if half <= 1e-9:
                        break
            sq = float(np.sum((self.front_point(z1, z2) - f) ** 2))
            if sq < best_sq:
                best_sq, best_z = sq, (z1, z2)

        # Final dense local sweep: resolves mirror basins created by the
        # oscillating objective near its critical points, where the pattern
        # search can settle one fold over.
        h = 1.0 / (self._grid_resolution - 1)
        zz1 = np.clip(np.linspace(best_z[0] - 1.5 * h, best_z[0] + 1.5 * h, 301), 0.0, 1.0)
        zz2 = np.clip(np.linspace(best_z[1] - 1.5 * h, best_z[1] + 1.5 * h, 301), 0.0, 1.0)
        g1, g2 = np.meshgrid(zz1, zz2)
        cand = self.front_point(g1.ravel(), g2.ravel())
        i = int(np.argmin(np.sum((cand - f) ** 2, axis=1)))
        z1, z2 = g1.ravel()[i], g2.ravel()[i]
        half = 1.5 * h / 150.0
        while half > 1e-9:
            zz1 = np.clip(z1 + half * offsets, 0.0, 1.0)
            zz2 = np.clip(z2 + half * offsets, 0.0, 1.0)
            g1, g2 = np.meshgrid(zz1, zz2)
            cand = self.front_point(g1.ravel(), g2.ravel())
            i = int(np.argmin(np.sum((cand - f) ** 2, axis=1)))
            z1, z2 = g1.ravel()[i], g2.ravel()[i]
            half *= 0.25
        if float(np.sum((self.front_point(z1, z2) - f) ** 2)) < best_sq:
            best_z = (z1, z2)
        p = self.front_point(*best_z)
        return p, float(np.sqrt(np.sum((f - p) ** 2)))


def _project_simplex(f: np.ndarray, total: float) -> np.ndarray:
    """Euclidean projection onto the scaled simplex {p >= 0, sum(p) = total}."""
    u = np.sort(f)[::-1]
    css = np.cumsum(u) - total
    j = np.arange(1, f.shape[0] + 1)
    rho = np.max(j[u - css / j > 0.0])
    theta = css[rho - 1] / rho
    return np.maximum(f - theta, 0.0)


def _project_sphere_octant(f: np.ndarray) -> tuple[np.ndarray, float]:
    """Closest point on the non-negative octant of the unit sphere."""
    fp = np.maximum(f, 0.0)
    norm = np.sqrt(np.sum(fp * fp))
    if norm == 0.0:
        p = np.zeros_like(f)
        p[int(np.argmax(f))] = 1.0
    else:
        p = fp / norm
    return p, float(np.sqrt(np.sum((f - p) ** 2)))


_REGISTRY = {cls.name: cls for cls in (Dtlz1, Dtlz2, Dtlz4, Wfg1)}
PROBLEM_NAMES = tuple(sorted(_REGISTRY))


def get_problem(name: str) -> Problem:
    """Instantiate a benchmark problem by name (case-insensitive)."""
    key = name.strip().lower()
    if key not in _REGISTRY:
        raise ValueError(f"unknown problem {name!r}; known: {', '.join(PROBLEM_NAMES)}")
    return _REGISTRY[key]()
