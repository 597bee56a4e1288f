"""Multiobjective micro-genetic optimizer with a distance-based Pareto archive."""

from .archive import (
    ArchiveEntry,
    ArchiveError,
    Individual,
    InsertOutcome,
    InsertResult,
    ParetoArchive,
    crowding_distances,
    crowding_prune,
    dominates,
    objective_distance,
)
from .evolve import (
    ArchiveSnapshot,
    Evolver,
    EvolverConfig,
    PopulationStats,
    RunTrace,
    gaussian_decode,
    gaussian_encode,
    lhs_init,
    maybe_adapt_range,
    normal_cdf,
    normal_cdf_inv,
    population_moments,
    run,
)
from .metrics import (
    FrontAssessment,
    assess,
    detect_degenerated,
    front_distances,
    generational_distance,
    spacing,
    tol5,
)
from .problems import PROBLEM_NAMES, Dtlz1, Dtlz2, Dtlz4, Problem, Wfg1, get_problem

__version__ = "0.1.0"
