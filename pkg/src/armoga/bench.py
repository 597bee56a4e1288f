"""Experiment harness: multi-seed runs, metric tables, front dumps, CLI.

One evolver run per seed is driven to the largest requested budget and the
archive is snapshotted whenever an intermediate budget is crossed, so a
five-budget table costs one run per seed.  All outputs are deterministic
functions of the configuration: rerunning an experiment rewrites byte
identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .archive import ParetoArchive
from .evolve import EvolverConfig, Evolver
from .metrics import assess
from .problems import PROBLEM_NAMES, get_problem

__all__ = [
    "RunConfig",
    "RunReport",
    "SeedBudgetResult",
    "default_run_config",
    "dump_front",
    "emit_summary",
    "main",
    "parse_front",
    "profile_names",
    "read_summary",
    "run_experiment",
    "update_stats_experiment",
]

POLICIES = ("distance", "crowding")

_SIGMA_MIN = {"dtlz1": 0.8, "wfg1": 0.8, "dtlz2": 0.005, "dtlz4": 0.005}
_ELITES = {4: 2, 10: 4, 20: 6}
_BUDGETS = {
    "dtlz1": (4_000, 20_000, 40_000, 100_000, 200_000),
    "dtlz2": (4_000, 20_000, 40_000),
    "dtlz4": (4_000, 20_000, 40_000),
    "wfg1": (4_000, 20_000, 40_000, 100_000, 200_000),
}
UPDATE_CAPACITIES = (20, 50, 100, 200, 500, 1000)


class ConfigError(ValueError):
    """Bad experiment configuration."""


@dataclass(frozen=True)
class RunConfig:
    problem: str
    policy: str = "distance"
    population_size: int = 4
    archive_capacity: int = 100
    budgets: tuple[int, ...] = ()
    seeds: tuple[int, ...] = tuple(range(1, 21))
    delta: float = 1.4
    sigma_min: float = 0.005
    reinit_period: int = 1
    elites_on_reinit: int = 2
    recombination_probability: float = 1.0
    out_dir: Path = Path("runs")
    exclude_degenerated: bool = False
    degeneracy_tau: float = 0.01

    def __post_init__(self):
        if self.problem not in PROBLEM_NAMES:
            raise ConfigError(
                f"unknown problem {self.problem!r}; known: {', '.join(PROBLEM_NAMES)}"
            )
        if self.policy not in POLICIES:
            raise ConfigError(f"unknown policy {self.policy!r}; known: {', '.join(POLICIES)}")
        if not self.budgets:
            raise ConfigError("at least one evaluation budget is required")
        if any(b2 <= b1 for b1, b2 in zip(self.budgets, self.budgets[1:])):
            raise ConfigError("budgets must be strictly increasing")
        if not self.seeds:
            raise ConfigError("at least one seed is required")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        if self.budgets[0] < self.population_size:
            raise ConfigError("smallest budget must cover the initial population")

    def evolver_config(self, seed: int) -> EvolverConfig:
        return EvolverConfig(
            population_size=self.population_size,
            archive_capacity=self.archive_capacity,
            reinit_period=self.reinit_period,
            elites_on_reinit=self.elites_on_reinit,
            delta=self.delta,
            sigma_min=self.sigma_min,
            recombination_probability=self.recombination_probability,
            seed=seed,
            archive_policy=self.policy,
        )


def default_run_config(problem: str, population_size: int = 4, **overrides) -> RunConfig:
    """Parameter preset for a problem/population pair (tuned table settings)."""
    problem = problem.strip().lower()
    if problem not in PROBLEM_NAMES:
        raise ConfigError(f"unknown problem {problem!r}; known: {', '.join(PROBLEM_NAMES)}")
    if population_size == 4:
        reinit = 4 if problem == "wfg1" else 1
    else:
        reinit = 3
    base = dict(
        problem=problem,
        population_size=population_size,
        sigma_min=_SIGMA_MIN[problem],
        reinit_period=reinit,
        elites_on_reinit=_ELITES.get(population_size, min(2, population_size)),
        budgets=_BUDGETS[problem],
    )
    base.update(overrides)
    return RunConfig(**base)


def profile_names() -> list[str]:
    return [f"{p}-pop{n}" for p in PROBLEM_NAMES for n in (4, 10, 20)]


def config_from_profile(name: str, **overrides) -> RunConfig:
    try:
        problem, pop_part = name.rsplit("-pop", 1)
        pop = int(pop_part)
    except ValueError:
        raise ConfigError(
            f"unknown profile {name!r}; known: {', '.join(profile_names())}"
        ) from None
    return default_run_config(problem, pop, **overrides)


@dataclass(frozen=True)
class SeedBudgetResult:
    seed: int
    budget: int
    evaluations: int
    generations: int
    archive_size: int
    gd: float
    tol5: float
    spacing: float
    degenerated: bool
    update_ratio: float
    wall_time: float  # in-memory only, never serialized


_METRIC_FIELDS = ("gd", "tol5", "spacing", "update_ratio")


@dataclass
class RunReport:
    config: RunConfig
    rows: list[SeedBudgetResult] = field(default_factory=list)

    def rows_at(self, budget: int) -> list[SeedBudgetResult]:
        return [r for r in self.rows if r.budget == budget]

    def degenerated_count(self, budget: int) -> int:
        return sum(r.degenerated for r in self.rows_at(budget))

    def mean(self, metric: str, budget: int) -> float:
        rows = self.rows_at(budget)
        if self.config.exclude_degenerated and metric != "update_ratio":
            rows = [r for r in rows if not r.degenerated]
        if not rows:
            return float("nan")
        return float(np.mean([getattr(r, metric) for r in rows]))

    def summary_cells(self) -> dict[str, list[str]]:
        """Formatted table cells exactly as :func:`emit_summary` prints them."""
        cells = {
            m: [f"{self.mean(m, b):.2e}" for b in self.config.budgets] for m in _METRIC_FIELDS
        }
        cells["degenerated"] = [str(self.degenerated_count(b)) for b in self.config.budgets]
        return cells


def run_experiment(cfg: RunConfig, write_files: bool = True, log=None) -> RunReport:
    """Run every seed to the largest budget, snapshotting at each budget."""
    problem = get_problem(cfg.problem)
    report = RunReport(config=cfg)
    out = Path(cfg.out_dir)
    if write_files:
        out.mkdir(parents=True, exist_ok=True)

    for seed in cfg.seeds:
        started = time.perf_counter()
        evolver = Evolver(cfg.evolver_config(seed), problem)
        trace = evolver.run(max(cfg.budgets), checkpoints=cfg.budgets)
        elapsed = time.perf_counter() - started
        for snap in trace.checkpoints:
            a = assess(snap, problem, tau=cfg.degeneracy_tau)
            ratio = snap.update_counter / snap.insert_counter if snap.insert_counter else 0.0
            report.rows.append(
                SeedBudgetResult(
                    seed=seed,
                    budget=snap.budget,
                    evaluations=snap.evaluations,
                    generations=snap.generations,
                    archive_size=snap.size,
                    gd=a.gd,
                    tol5=a.tol5,
                    spacing=a.spacing,
                    degenerated=a.degenerated,
                    update_ratio=ratio,
                    wall_time=elapsed,
                )
            )
            if write_files:
                dump_front(snap, out / _front_name(cfg, seed, snap.budget))
        if log is not None:
            print(f"{cfg.problem}/{cfg.policy} seed {seed}: {elapsed:.1f}s", file=log)

    if write_files:
        emit_summary(report, out / f"summary_{cfg.problem}_{cfg.policy}.csv")
        _write_report_json(report, out / f"report_{cfg.problem}_{cfg.policy}.json")
    return report


def _front_name(cfg: RunConfig, seed: int, budget: int) -> str:
    return f"front_{cfg.problem}_{cfg.policy}_seed{seed}_eval{budget}.txt"


def emit_summary(report: RunReport, path: Path) -> None:
    """One CSV per experiment: metric rows, budget columns, 3-digit means."""
    cfg = report.config
    lines = ["metric," + ",".join(str(b) for b in cfg.budgets)]
    for metric, values in report.summary_cells().items():
        lines.append(metric + "," + ",".join(values))
    _write_text(path, "\n".join(lines) + "\n")


def read_summary(path: Path) -> dict[str, list[float]]:
    """Parse a summary CSV back into {metric: values-per-budget}."""
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    if header[0] != "metric":
        raise ConfigError(f"{path}: not a summary file")
    table = {}
    for line in lines[1:]:
        name, *vals = line.split(",")
        table[name] = [float(v) for v in vals]
    return table


def _write_report_json(report: RunReport, path: Path) -> None:
    cfg = report.config
    doc = {
        "config": {
            "problem": cfg.problem,
            "policy": cfg.policy,
            "population_size": cfg.population_size,
            "archive_capacity": cfg.archive_capacity,
            "budgets": list(cfg.budgets),
            "seeds": list(cfg.seeds),
            "delta": cfg.delta,
            "sigma_min": cfg.sigma_min,
            "reinit_period": cfg.reinit_period,
            "elites_on_reinit": cfg.elites_on_reinit,
            "recombination_probability": cfg.recombination_probability,
            "exclude_degenerated": cfg.exclude_degenerated,
            "degeneracy_tau": cfg.degeneracy_tau,
        },
        "rows": [
            {
                "seed": r.seed,
                "budget": r.budget,
                "evaluations": r.evaluations,
                "generations": r.generations,
                "archive_size": r.archive_size,
                "gd": r.gd,
                "tol5": r.tol5,
                "spacing": r.spacing,
                "degenerated": r.degenerated,
                "update_ratio": r.update_ratio,
            }
            for r in report.rows
        ],
    }
    _write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def dump_front(archive, path: Path) -> None:
    """Write one member per line (objectives then design values, full
    precision), sorted lexicographically by objectives."""
    objectives = archive.objectives
    designs = archive.designs
    if objectives.shape[0] == 0:
        raise ConfigError("refusing to dump an empty archive")
    designs = np.stack([np.asarray(d) for d in designs])
    order = np.lexsort(tuple(objectives[:, j] for j in range(objectives.shape[1] - 1, -1, -1)))
    lines = []
    for i in order:
        vals = [repr(float(v)) for v in objectives[i]] + [repr(float(v)) for v in designs[i]]
        lines.append(" ".join(vals))
    _write_text(path, "\n".join(lines) + "\n")


def parse_front(path: Path, n_obj: int) -> tuple[np.ndarray, np.ndarray]:
    """Read a front dump back as (objectives, designs)."""
    rows = [line.split() for line in Path(path).read_text().strip().splitlines()]
    data = np.array([[float(v) for v in row] for row in rows])
    return data[:, :n_obj], data[:, n_obj:]


def update_stats_experiment(
    problem: str,
    capacities=UPDATE_CAPACITIES,
    seeds=tuple(range(1, 21)),
    budget: int = 40_000,
    population_size: int = 4,
    out_path: Path | None = None,
    log=None,
) -> list[tuple[int, float]]:
    """Mean link updates per accepted insertion, across archive capacities."""
    rows = []
    for capacity in capacities:
        base = default_run_config(problem, population_size, budgets=(budget,))
        ratios = []
        prob = get_problem(problem)
        for seed in seeds:
            evolver = Evolver(
                replace(base, archive_capacity=capacity).evolver_config(seed), prob
            )
            evolver.run(budget)
            a = evolver.archive
            ratios.append(a.update_counter / a.insert_counter if a.insert_counter else 0.0)
        rows.append((int(capacity), float(np.mean(ratios))))
        if log is not None:
            print(f"{problem} capacity {capacity}: ratio {rows[-1][1]:.3f}", file=log)
    if out_path is not None:
        lines = ["archive_size,update_ratio"]
        lines += [f"{c},{r:.2e}" for c, r in rows]
        _write_text(Path(out_path), "\n".join(lines) + "\n")
    return rows


def _write_text(path: Path, text: str) -> None:
    path = Path(path)
    try:
        path.write_text(text)
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from exc


# -- command line -----------------------------------------------------------


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.replace(",", " ").split())


def _parse_seeds(text: str) -> tuple[int, ...]:
    """Either a count ('20' means seeds 1..20) or an explicit list ('1,5,9')."""
    values = _parse_int_list(text)
    if len(values) == 1 and "," not in text:
        return tuple(range(1, values[0] + 1))
    return values


_CONFIG_KEYS = {
    "problem": str,
    "policy": str,
    "pop": int,
    "archive_size": int,
    "budgets": _parse_int_list,
    "seeds": _parse_seeds,
    "sigma_min": float,
    "delta": float,
    "reinit_period": int,
    "elites": int,
    "recomb_prob": float,
    "out": str,
    "tau": float,
    "exclude_degenerated": lambda s: s.strip().lower() in ("1", "true", "yes"),
    "profile": str,
}


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _CONFIG_KEYS[key](value.strip())
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="armoga-bench",
        description="Multi-seed benchmark harness for the micro-genetic optimizer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one experiment and write its tables")
    run_p.add_argument("--profile", help="named preset, e.g. dtlz2-pop4")
    run_p.add_argument("--config", help="flat key=value config file")
    run_p.add_argument("--problem", choices=PROBLEM_NAMES)
    run_p.add_argument("--policy", choices=POLICIES)
    run_p.add_argument("--pop", type=int, help="population size")
    run_p.add_argument("--archive-size", type=int, dest="archive_size")
    run_p.add_argument("--budgets", type=_parse_int_list)
    run_p.add_argument("--seeds", type=_parse_seeds, help="count or explicit list")
    run_p.add_argument("--sigma-min", type=float, dest="sigma_min")
    run_p.add_argument("--delta", type=float)
    run_p.add_argument("--reinit-period", type=int, dest="reinit_period")
    run_p.add_argument("--elites", type=int)
    run_p.add_argument("--recomb-prob", type=float, dest="recomb_prob")
    run_p.add_argument("--tau", type=float, help="degeneracy threshold")
    run_p.add_argument("--exclude-degenerated", action="store_true", default=None)
    run_p.add_argument("--out", help="output directory (default: runs)")

    upd_p = sub.add_parser("updates", help="archive update-cost experiment")
    upd_p.add_argument("--problem", choices=PROBLEM_NAMES, default="dtlz4")
    upd_p.add_argument("--capacities", type=_parse_int_list, default=UPDATE_CAPACITIES)
    upd_p.add_argument("--seeds", type=_parse_seeds, default=tuple(range(1, 21)))
    upd_p.add_argument("--budget", type=int, default=40_000)
    upd_p.add_argument("--pop", type=int, default=4)
    upd_p.add_argument("--out", default="runs")

    prof_p = sub.add_parser("profiles", help="list named parameter presets")
    del prof_p
    return parser


_ARG_TO_OVERRIDE = {
    "policy": "policy",
    "pop": "population_size",
    "archive_size": "archive_capacity",
    "budgets": "budgets",
    "seeds": "seeds",
    "sigma_min": "sigma_min",
    "delta": "delta",
    "reinit_period": "reinit_period",
    "elites": "elites_on_reinit",
    "recomb_prob": "recombination_probability",
    "tau": "degeneracy_tau",
    "exclude_degenerated": "exclude_degenerated",
    "out": "out_dir",
}


def _resolve_run_config(args: argparse.Namespace) -> RunConfig:
    settings: dict = {}
    if args.config:
        settings.update(_read_config_file(args.config))
    for key in _CONFIG_KEYS:
        if key in ("profile",):
            continue
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            settings[key] = cli_val

    profile = args.profile or settings.pop("profile", None)
    overrides = {}
    problem = settings.pop("problem", None)
    pop = settings.pop("pop", None)
    for key, value in settings.items():
        overrides[_ARG_TO_OVERRIDE[key]] = value
    if "out_dir" in overrides:
        overrides["out_dir"] = Path(overrides["out_dir"])

    if profile:
        if pop is not None:
            profile_problem = profile.rsplit("-pop", 1)[0]
            return default_run_config(problem or profile_problem, pop, **overrides)
        cfg = config_from_profile(profile, **overrides)
        if problem is not None and problem != cfg.problem:
            raise ConfigError(f"--problem {problem} conflicts with profile {profile}")
        return cfg
    if problem is None:
        raise ConfigError("either --profile or --problem is required")
    return default_run_config(problem, pop if pop is not None else 4, **overrides)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            cfg = _resolve_run_config(args)
            report = run_experiment(cfg, log=sys.stderr)
            out = Path(cfg.out_dir)
            print(f"wrote {out / f'summary_{cfg.problem}_{cfg.policy}.csv'}")
            for metric, values in report.summary_cells().items():
                print(f"{metric:>12}: " + "  ".join(values))
        elif args.command == "updates":
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            path = out / f"updates_{args.problem}.csv"
            update_stats_experiment(
                args.problem,
                capacities=args.capacities,
                seeds=args.seeds,
                budget=args.budget,
                population_size=args.pop,
                out_path=path,
                log=sys.stderr,
            )
            print(f"wrote {path}")
        elif args.command == "profiles":
            for name in profile_names():
                print(name)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
