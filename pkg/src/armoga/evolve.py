"""Micro-genetic engine with Gaussian-CDF encoding and range adaptation.

The population is tiny (4-20 members).  There is no mutation operator;
diversity is kept by periodic reinitialization: a few archive members that
are extremal in randomly chosen objectives are injected, and the remaining
slots are refilled by Latin hypercube sampling over the currently adapted
per-variable range.  Design variables are encoded through the standard
normal CDF around per-variable statistics (mu_i, sigma_i) of the whole
population, with sigma floored at ``sigma_min`` so the search never fully
collapses.  One-point crossover acts on the encoded coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf

from .archive import Individual, ParetoArchive

__all__ = [
    "ArchiveSnapshot",
    "Evolver",
    "EvolverConfig",
    "PopulationStats",
    "RunTrace",
    "gaussian_decode",
    "gaussian_encode",
    "lhs_init",
    "maybe_adapt_range",
    "normal_cdf",
    "normal_cdf_inv",
    "population_moments",
    "run",
]

_R_EPS = 1e-12
_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def normal_cdf(z):
    """Standard normal CDF."""
    return 0.5 * (1.0 + erf(np.asarray(z, dtype=float) / _SQRT2))


# Coefficients of Acklam's rational approximation to the probit function.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def normal_cdf_inv(p):
    """Inverse standard normal CDF on (0, 1).

    Rational approximation polished by one Halley step, accurate to a few
    ulps over the full open interval.
    """
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0.0) or np.any(p >= 1.0):
        raise ValueError("normal_cdf_inv defined on the open interval (0, 1)")

    x = np.empty_like(p)
    lo = p < _P_LOW
    hi = p > 1.0 - _P_LOW
    mid = ~(lo | hi)

    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        num = ((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        x[mid] = num * q / den
    if np.any(lo):
        q = np.sqrt(-2.0 * np.log(p[lo]))
        x[lo] = _tail(q)
    if np.any(hi):
        q = np.sqrt(-2.0 * np.log(1.0 - p[hi]))
        x[hi] = -_tail(q)

    # One Halley refinement against the forward CDF.
    e = 0.5 * (1.0 + erf(x / _SQRT2)) - p
    u = e * _SQRT_2PI * np.exp(0.5 * x * x)
    x = x - u / (1.0 + 0.5 * x * u)
    return x if x.ndim else float(x)


def _tail(q):
    num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
    den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
    return num / den


def gaussian_encode(p, mu, sigma):
    """Map a design value to (0, 1) through the normal CDF around (mu, sigma).

    The result is clamped to [1e-12, 1 - 1e-12] so it always decodes.
    """
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0.0):
        raise ValueError("sigma must be positive")
    r = normal_cdf((np.asarray(p, dtype=float) - mu) / sigma)
    return np.clip(r, _R_EPS, 1.0 - _R_EPS)


def gaussian_decode(r, mu, sigma, lower=None, upper=None):
    """Invert :func:`gaussian_encode`; optionally clamp to box bounds."""
    r = np.asarray(r, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0.0):
        raise ValueError("sigma must be positive")
    if np.any(r <= 0.0) or np.any(r >= 1.0):
        raise ValueError("encoded coordinates must lie strictly inside (0, 1)")
    p = mu + sigma * normal_cdf_inv(r)
    if lower is not None or upper is not None:
        p = np.clip(p, lower, upper)
    return p


def lhs_init(lower, upper, size: int, rng: np.random.Generator) -> np.ndarray:
    """Latin hypercube sample of ``size`` points in the box [lower, upper].

    Each variable's range is cut into ``size`` equal strata, one point
    uniformly placed per stratum, with an independent stratum permutation
    per variable.
    """
    lower = np.atleast_1d(np.asarray(lower, dtype=float))
    upper = np.atleast_1d(np.asarray(upper, dtype=float))
    if size < 1:
        raise ValueError("size must be >= 1")
    n = lower.shape[0]
    out = np.empty((size, n))
    for j in range(n):
        strata = rng.permutation(size)
        offsets = rng.random(size)
        out[:, j] = lower[j] + (strata + offsets) / size * (upper[j] - lower[j])
    return out


def population_moments(designs: np.ndarray, sigma_min: float) -> tuple[np.ndarray, np.ndarray]:
    """Per-variable mean and (floored) population standard deviation."""
    designs = np.asarray(designs, dtype=float)
    if designs.size == 0:
        raise ValueError("population is empty")
    mu = designs.mean(axis=0)
    sigma = np.maximum(designs.std(axis=0), sigma_min)
    return mu, sigma


@dataclass
class PopulationStats:
    """Per-variable encoding statistics plus the sigma seen at the last
    range adaptation of each variable."""

    mu: np.ndarray
    sigma: np.ndarray
    sigma_old: np.ndarray

    @classmethod
    def from_population(cls, designs: np.ndarray, sigma_min: float) -> "PopulationStats":
        mu, sigma = population_moments(designs, sigma_min)
        return cls(mu=mu, sigma=sigma, sigma_old=sigma.copy())


def maybe_adapt_range(
    stats: PopulationStats,
    mu_new: np.ndarray,
    sigma_new: np.ndarray,
    delta: float,
) -> np.ndarray:
    """Adapt the encoding range of variables whose standard deviation moved
    by more than ``delta`` times the value recorded at their last adaptation.

    Returns the boolean mask of adapted variables; flagged variables take
    the new (mu, sigma) and reset sigma_old, the rest keep their statistics.
    """
    mask = np.abs(sigma_new - stats.sigma_old) > delta * stats.sigma_old
    if mask.any():
        stats.mu = np.where(mask, mu_new, stats.mu)
        stats.sigma = np.where(mask, sigma_new, stats.sigma)
        stats.sigma_old = np.where(mask, sigma_new, stats.sigma_old)
    return mask


@dataclass(frozen=True)
class EvolverConfig:
    population_size: int = 4
    archive_capacity: int = 100
    reinit_period: int = 1
    elites_on_reinit: int = 2
    delta: float = 1.4
    sigma_min: float = 0.005
    recombination_probability: float = 1.0
    seed: int = 1
    archive_policy: str = "distance"

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2 (crossover needs a pair)")
        if self.elites_on_reinit > self.population_size:
            raise ValueError("elites_on_reinit cannot exceed population_size")
        if self.elites_on_reinit < 0:
            raise ValueError("elites_on_reinit must be >= 0")
        if self.reinit_period < 1:
            raise ValueError("reinit_period must be >= 1")
        if not 0.0 <= self.recombination_probability <= 1.0:
            raise ValueError("recombination_probability must lie in [0, 1]")
        if self.sigma_min <= 0.0:
            raise ValueError("sigma_min must be positive")
        if self.archive_capacity < 1:
            raise ValueError("archive_capacity must be >= 1")


@dataclass(frozen=True)
class ArchiveSnapshot:
    """Archive contents and counters frozen at a budget crossing."""

    budget: int
    evaluations: int
    generations: int
    objectives: np.ndarray
    designs: np.ndarray
    nn_distances: np.ndarray
    update_counter: int
    insert_counter: int

    @property
    def size(self) -> int:
        return self.objectives.shape[0]


@dataclass
class RunTrace:
    evaluations: int = 0
    generations: int = 0
    checkpoints: list[ArchiveSnapshot] = field(default_factory=list)


class Evolver:
    """One evolution run: owns its population, statistics, archive and PRNG."""

    def __init__(self, cfg: EvolverConfig, problem):
        self.cfg = cfg
        self.problem = problem
        self.archive = ParetoArchive(
            cfg.archive_capacity, problem.n_obj, policy=cfg.archive_policy
        )
        self.rng = np.random.default_rng(cfg.seed)
        self.designs: np.ndarray | None = None
        self.stats: PopulationStats | None = None
        self.evaluations = 0
        self.generations = 0

    def initialize(self) -> None:
        """LHS-sample the initial population, evaluate it into the archive."""
        cfg, problem = self.cfg, self.problem
        self.designs = lhs_init(problem.lower, problem.upper, cfg.population_size, self.rng)
        self._evaluate_and_archive(self.designs)
        self.stats = PopulationStats.from_population(self.designs, cfg.sigma_min)

    def step_generation(self) -> None:
        """Random mating, one-point crossover in encoded space, evaluate
        offspring into the archive; offspring become the next population."""
        cfg, stats = self.cfg, self.stats
        pop, n = self.designs.shape
        encoded = gaussian_encode(self.designs, stats.mu, stats.sigma)
        parents = self.rng.integers(0, pop, size=pop)
        children = np.empty_like(encoded)
        for q in range(0, pop - 1, 2):
            a, b = encoded[parents[q]], encoded[parents[q + 1]]
            if self.rng.random() < cfg.recombination_probability:
                cut = int(self.rng.integers(1, n))
                children[q, :cut] = a[:cut]
                children[q, cut:] = b[cut:]
                children[q + 1, :cut] = b[:cut]
                children[q + 1, cut:] = a[cut:]
            else:
                children[q] = a
                children[q + 1] = b
        if pop % 2:
            children[-1] = encoded[parents[-1]]
        offspring = gaussian_decode(
            children, stats.mu, stats.sigma, self.problem.lower, self.problem.upper
        )
        self._evaluate_and_archive(offspring)
        self.designs = offspring
        self.generations += 1

    def reinitialize(self) -> np.ndarray:
        """Range adaptation followed by elitist-random restart.

        Archive members minimising randomly chosen objectives are injected
        into the leading population slots; the remaining slots are refilled
        by LHS over the current per-variable window mu +- 3 sigma (floored
        population moments, intersected with the box).  The sigma floor
        keeps this window from collapsing.  Injected members are not
        re-evaluated and the archive itself is untouched.  Returns the
        range-adaptation mask.
        """
        cfg, problem, archive = self.cfg, self.problem, self.archive
        mu_new, sigma_new = population_moments(self.designs, cfg.sigma_min)
        mask = maybe_adapt_range(self.stats, mu_new, sigma_new, cfg.delta)

        n_elites = cfg.elites_on_reinit if archive.size > 0 else 0
        pop = cfg.population_size
        new_designs = np.empty_like(self.designs)
        if n_elites > 0:
            k = problem.n_obj
            if n_elites <= k:
                chosen = self.rng.choice(k, size=n_elites, replace=False)
            else:
                chosen = self.rng.choice(k, size=n_elites, replace=True)
            for slot, j in enumerate(chosen):
                new_designs[slot] = archive.extremal_member(int(j)).design
        window_lo = np.maximum(problem.lower, mu_new - 3.0 * sigma_new)
        window_hi = np.minimum(problem.upper, mu_new + 3.0 * sigma_new)
        if pop - n_elites > 0:
            new_designs[n_elites:] = lhs_init(window_lo, window_hi, pop - n_elites, self.rng)
        self.designs = new_designs
        return mask

    def run(self, budget: int, checkpoints=()) -> RunTrace:
        """Evolve until another generation would exceed ``budget`` evaluations.

        ``checkpoints`` is an optional ascending list of evaluation budgets
        at which to snapshot the archive (each snapshot equals the state an
        independent run stopped at that budget would produce).
        """
        cfg = self.cfg
        if budget < cfg.population_size:
            raise ValueError("budget must cover at least the initial population")
        pending = sorted(set(int(b) for b in checkpoints))
        trace = RunTrace()

        self.initialize()
        pending = self._snap(pending, trace)
        while self.evaluations + cfg.population_size <= budget:
            self.step_generation()
            if self.generations % cfg.reinit_period == 0:
                self.reinitialize()
            pending = self._snap(pending, trace)
        trace.evaluations = self.evaluations
        trace.generations = self.generations
        return trace

    def snapshot(self, budget: int = 0) -> ArchiveSnapshot:
        a = self.archive
        return ArchiveSnapshot(
            budget=budget,
            evaluations=self.evaluations,
            generations=self.generations,
            objectives=a.objectives,
            designs=np.stack(a.designs) if a.size else np.empty((0, self.problem.n_var)),
            nn_distances=a.nn_distances,
            update_counter=a.update_counter,
            insert_counter=a.insert_counter,
        )

    def _snap(self, pending: list[int], trace: RunTrace) -> list[int]:
        pop = self.cfg.population_size
        while pending and self.evaluations + pop > pending[0]:
            trace.checkpoints.append(self.snapshot(budget=pending[0]))
            pending = pending[1:]
        return pending

    def _evaluate_and_archive(self, designs: np.ndarray) -> None:
        objectives = self.problem.evaluate_batch(designs)
        for i in range(designs.shape[0]):
            self.archive.try_insert(Individual(designs[i], objectives[i]))
        self.evaluations += designs.shape[0]


def run(cfg: EvolverConfig, problem, budget: int, checkpoints=()) -> tuple[ParetoArchive, RunTrace]:
    """Convenience wrapper: build an evolver, run it, return archive and trace."""
    ev = Evolver(cfg, problem)
    trace = ev.run(budget, checkpoints=checkpoints)
    return ev.archive, trace
