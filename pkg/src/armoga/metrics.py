"""Convergence and diversity measures over a final archive.

Convergence is measured against the analytic front of the problem
(generational distance and its outlier-robust 95th-percentile variant);
diversity by the coefficient of variation of nearest-neighbour distances,
read straight from the archive's maintained links.  A degenerated front is
one that collapsed to a near-constant value in some objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FrontAssessment",
    "assess",
    "detect_degenerated",
    "front_distances",
    "generational_distance",
    "spacing",
    "tol5",
]


@dataclass(frozen=True)
class FrontAssessment:
    gd: float
    tol5: float
    spacing: float
    degenerated: bool
    n: int


def front_distances(archive, problem) -> np.ndarray:
    """Distance of each archive member to its closest exact-front point."""
    objectives = archive.objectives
    if objectives.shape[0] == 0:
        raise ValueError("archive is empty")
    return np.array([problem.project_to_front(f)[1] for f in objectives])


def generational_distance(archive, problem) -> float:
    """Root-mean-square member-to-front distance."""
    d = front_distances(archive, problem)
    return _gd_of(d)


def tol5(archive, problem) -> float:
    """Smallest bound exceeded by at most 5% of members: the ceil(0.95 n)-th
    order statistic of the member-to-front distances, no interpolation."""
    d = front_distances(archive, problem)
    return _tol5_of(d)


def spacing(archive) -> float:
    """Coefficient of variation of the nearest-neighbour distances."""
    dn = archive.nn_distances
    n = dn.shape[0]
    if n < 2:
        raise ValueError("spacing needs at least 2 members")
    mean = float(dn.mean())
    if mean <= 0.0:
        raise ValueError("degenerate nearest-neighbour distances (duplicates?)")
    sd = math.sqrt(float(np.sum((dn - mean) ** 2)) / (n - 1))
    return sd / mean


def detect_degenerated(archive, tau: float = 0.01) -> bool:
    """True when some objective's spread is below ``tau`` times the widest
    objective's spread (an exactly constant objective always counts)."""
    objectives = archive.objectives
    if objectives.shape[0] < 2:
        raise ValueError("degeneracy test needs at least 2 members")
    ranges = objectives.max(axis=0) - objectives.min(axis=0)
    lo = float(ranges.min())
    return lo == 0.0 or lo < tau * float(ranges.max())


def assess(archive, problem, tau: float = 0.01) -> FrontAssessment:
    """All metrics in one pass (front distances are computed once)."""
    d = front_distances(archive, problem)
    return FrontAssessment(
        gd=_gd_of(d),
        tol5=_tol5_of(d),
        spacing=spacing(archive),
        degenerated=detect_degenerated(archive, tau),
        n=d.shape[0],
    )


def _gd_of(d: np.ndarray) -> float:
    return float(np.sqrt(np.mean(d * d)))


def _tol5_of(d: np.ndarray) -> float:
    n = d.shape[0]
    rank = math.ceil(0.95 * n)
    return float(np.sort(d)[rank - 1])
