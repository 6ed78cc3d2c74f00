from __future__ import annotations

import csv
import logging
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

import numpy as np

from pac_implicit.app.constants import (
    CSV_COLUMNS,
    DEFAULT_RUNS,
    DEFAULT_SAMPLE_SIZES,
    DEFAULT_SEED,
    FEASIBILITY_TOLERANCE,
    NOISY_EPSILON,
    POSITIVE_RATIO,
)
from pac_implicit.bench.constants import KbMode
from pac_implicit.bench.dataset import positive_observations, sample_dataset
from pac_implicit.bench.generators import resolve_problem
from pac_implicit.bench.problem import ProblemSpec, attained_optimum
from pac_implicit.errors import InvalidConfig, OutOfRange, PacImplicitError
from pac_implicit.optimise.constants import DEFAULT_ACCURACY, Goal
from pac_implicit.optimise.optimise import optimise_pac, optimise_sample_count
from pac_implicit.utils import format_rational, to_rational

log = logging.getLogger(__name__)

Row = dict[str, str]


@dataclass
class ExperimentConfig:
    problem: str
    seed: int = DEFAULT_SEED
    sample_sizes: Sequence[int] = DEFAULT_SAMPLE_SIZES
    runs: int = DEFAULT_RUNS
    noise: Fraction = Fraction(0)
    outliers: Fraction = Fraction(0)
    epsilon: Fraction | None = None
    accuracy: int = DEFAULT_ACCURACY
    output: str | None = None
    verbose: bool = False
    dims: int | None = None
    kb_mode: KbMode = KbMode.HARD
    mask_probability: float = 0.0
    workers: int = 1
    gamma: Fraction | None = None
    delta_conf: Fraction | None = None

    def __post_init__(self):
        self.noise = to_rational(self.noise)
        self.outliers = to_rational(self.outliers)
        if self.epsilon is not None:
            self.epsilon = to_rational(self.epsilon)
            if not 0 <= self.epsilon <= 1:
                raise InvalidConfig(f"epsilon must be in [0, 1], got {self.epsilon}")
        self.sample_sizes = tuple(self.sample_sizes)
        self.kb_mode = KbMode(self.kb_mode)

        if self.seed < 0:
            raise InvalidConfig(f"seed must be unsigned, got {self.seed}")
        if not self.sample_sizes or any(size < 1 for size in self.sample_sizes):
            raise InvalidConfig(f"sample sizes must be positive, got {list(self.sample_sizes)}")
        if self.runs < 1:
            raise InvalidConfig(f"runs must be positive, got {self.runs}")
        if self.noise < 0:
            raise InvalidConfig(f"noise must be >= 0, got {self.noise}")
        if not 0 <= self.outliers <= 1:
            raise InvalidConfig(f"outliers must be in [0, 1], got {self.outliers}")
        if self.accuracy < 1:
            raise InvalidConfig(f"accuracy must be positive, got {self.accuracy}")
        if self.workers < 1:
            raise InvalidConfig(f"workers must be positive, got {self.workers}")
        if (self.gamma is None) != (self.delta_conf is None):
            raise InvalidConfig("gamma and delta must be given together")
        if self.gamma is not None:
            self.gamma = to_rational(self.gamma)
            self.delta_conf = to_rational(self.delta_conf)
            try:
                optimise_sample_count(self.gamma, self.delta_conf)
            except OutOfRange as e:
                raise InvalidConfig(str(e)) from None

    @property
    def noisy(self) -> bool:
        return self.noise > 0 or self.outliers > 0 or self.mask_probability > 0

    @property
    def effective_epsilon(self) -> Fraction:
        """The given epsilon, else 0.05 for noisy runs and 0 for clean ones."""
        if self.epsilon is not None:
            return self.epsilon
        return NOISY_EPSILON if self.noisy else Fraction(0)

    @property
    def recommended_samples(self) -> int | None:
        """Positive samples OptimisePAC needs for (gamma, delta_conf), when both are set."""
        if self.gamma is None:
            return None
        return optimise_sample_count(self.gamma, self.delta_conf)


def run_rng(config: ExperimentConfig, size_index: int, run: int) -> np.random.Generator:
    """
    Independent stream for one grid cell, derived from (seed, problem,
    size index, run), so adding sizes or runs leaves other cells unchanged.
    """
    problem_key = zlib.crc32(config.problem.encode())
    sequence = np.random.SeedSequence(config.seed, spawn_key=(problem_key, size_index, run))
    return np.random.Generator(np.random.PCG64(sequence))


def is_feasible_estimate(estimate: Fraction, optimum: Fraction, goal: Goal) -> bool:
    """Pessimistic side of the optimum: at least it when minimising, at most when maximising."""
    if goal == Goal.MINIMISE:
        return estimate >= optimum - FEASIBILITY_TOLERANCE
    return estimate <= optimum + FEASIBILITY_TOLERANCE


def run_cell(spec: ProblemSpec, config: ExperimentConfig, size_index: int, run: int) -> Row:
    """Generate one dataset, run OptimisePAC on its positives and report a CSV row."""
    size = config.sample_sizes[size_index]
    row = {
        "problem": spec.name,
        "dims": str(spec.dims),
        "samples": str(size),
        "run": str(run),
        "seed": str(config.seed),
        "noise": format_rational(config.noise),
        "outliers": format_rational(config.outliers),
        "estimate": "",
        "true_optimum": "" if spec.true_optimum is None else format_rational(spec.true_optimum),
        "feasible": "false",
        "found": "false",
        "runtime_ms": "",
        "decide_calls": "0",
    }

    rng = run_rng(config, size_index, run)
    start = time.perf_counter()
    try:
        samples = sample_dataset(
            spec,
            size,
            POSITIVE_RATIO,
            config.noise,
            config.outliers,
            rng,
            mask_probability=config.mask_probability,
        )
        start = time.perf_counter()
        result = optimise_pac(
            spec.knowledge_base(config.kb_mode),
            spec.objective,
            config.effective_epsilon,
            config.accuracy,
            positive_observations(samples),
            spec.goal,
        )
    except PacImplicitError as e:
        row["runtime_ms"] = f"{(time.perf_counter() - start) * 1000:.3f}"
        log.warning("%s, %d samples, run %d failed: %s", spec.name, size, run, e)
        return row

    row["runtime_ms"] = f"{(time.perf_counter() - start) * 1000:.3f}"
    row["estimate"] = format_rational(result.estimate)
    row["found"] = "true"
    row["decide_calls"] = str(result.decide_calls)
    if spec.true_optimum is not None:
        feasible = is_feasible_estimate(result.estimate, spec.true_optimum, spec.goal)
        row["feasible"] = "true" if feasible else "false"

    log.info(
        "%s, %d samples, run %d: estimate %.6f in %s ms",
        spec.name,
        size,
        run,
        float(result.estimate),
        row["runtime_ms"],
    )
    return row


_worker_specs: dict[tuple, ProblemSpec] = {}


def resolve_spec(config: ExperimentConfig) -> ProblemSpec:
    spec = resolve_problem(config.problem, config.dims, config.seed)
    if spec.true_optimum is None:
        spec.true_optimum = attained_optimum(spec)
    return spec


def _run_cell_in_worker(config: ExperimentConfig, cell: tuple[int, int]) -> Row:
    # Specs are rebuilt per process from the config; generation is deterministic
    key = (config.problem, config.dims, config.seed)
    if key not in _worker_specs:
        _worker_specs[key] = resolve_spec(config)
    return run_cell(_worker_specs[key], config, *cell)


def run_experiment(config: ExperimentConfig, spec: ProblemSpec | None = None) -> list[Row]:
    """
    Run every (sample size, run) cell of the grid and return the rows in
    (size, run) order, whatever the number of workers.

    ``spec`` overrides the problem named in ``config``; it is only honoured
    with a single worker since worker processes rebuild the problem.
    """
    cells = [
        (size_index, run)
        for size_index in range(len(config.sample_sizes))
        for run in range(config.runs)
    ]

    if config.workers > 1:
        if spec is not None:
            raise InvalidConfig("An explicit problem spec needs workers=1")
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            return list(executor.map(_run_cell_in_worker, [config] * len(cells), cells))

    if spec is None:
        spec = resolve_spec(config)
    elif spec.true_optimum is None:
        spec.true_optimum = attained_optimum(spec)
    return [run_cell(spec, config, size_index, run) for size_index, run in cells]


def write_csv(rows: Iterable[Row], stream: TextIO):
    writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow(row)


def read_csv(stream: TextIO) -> list[Row]:
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"Unexpected CSV columns: {reader.fieldnames}")
    return list(reader)


@dataclass
class SizeSummary:
    samples: int | None
    runs: int = 0
    found: int = 0
    feasible: int = 0
    estimate_mean: float = float("nan")
    estimate_std: float = float("nan")
    runtime_mean: float = float("nan")
    runtime_std: float = float("nan")

    @property
    def found_pct(self) -> float:
        return 100 * self.found / self.runs if self.runs else 0.0

    @property
    def feasible_pct(self) -> float:
        """Share of found estimates on the pessimistic side of the optimum."""
        return 100 * self.feasible / self.found if self.found else 0.0


@dataclass
class BenchSummary:
    sizes: list[SizeSummary] = field(default_factory=list)
    overall: SizeSummary = field(default_factory=lambda: SizeSummary(None))


def _mean_std(values: list[float]) -> tuple[float, float]:
    if not values:
        return float("nan"), float("nan")
    array = np.asarray(values, dtype=float)
    std = float(np.std(array, ddof=1)) if len(array) > 1 else 0.0
    return float(np.mean(array)), std


def _summarise_rows(samples: int | None, rows: list[Row]) -> SizeSummary:
    found = [row for row in rows if row["found"] == "true"]
    estimates = [float(to_rational(row["estimate"])) for row in found]
    runtimes = [float(row["runtime_ms"]) for row in found]
    summary = SizeSummary(
        samples,
        runs=len(rows),
        found=len(found),
        feasible=sum(1 for row in found if row["feasible"] == "true"),
    )
    summary.estimate_mean, summary.estimate_std = _mean_std(estimates)
    summary.runtime_mean, summary.runtime_std = _mean_std(runtimes)
    return summary


def summarise(rows: Sequence[Row]) -> BenchSummary:
    """Per sample size: runs, found, feasible and mean ± sample std of estimate and runtime."""
    by_size: dict[int, list[Row]] = {}
    for row in rows:
        by_size.setdefault(int(row["samples"]), []).append(row)
    return BenchSummary(
        sizes=[_summarise_rows(size, size_rows) for size, size_rows in by_size.items()],
        overall=_summarise_rows(None, list(rows)),
    )


def format_summary(summary: BenchSummary, title: str = "") -> str:
    lines = []
    if title:
        lines.append(title)
    lines.append(
        f"{'samples':>8} {'runs':>5} {'found%':>7} {'feasible%':>10} "
        f"{'estimate (mean ± std)':>28} {'runtime ms (mean ± std)':>28}"
    )
    for size in summary.sizes:
        estimate = f"{size.estimate_mean:.6f} ± {size.estimate_std:.6f}"
        runtime = f"{size.runtime_mean:.1f} ± {size.runtime_std:.1f}"
        lines.append(
            f"{size.samples:>8} {size.runs:>5} {size.found_pct:>7.1f} {size.feasible_pct:>10.1f} "
            f"{estimate:>28} {runtime:>28}"
        )
    overall = summary.overall
    lines.append(
        f"overall: {overall.runs} runs, found {overall.found_pct:.1f}%, "
        f"feasible {overall.feasible_pct:.1f}%"
    )
    return "\n".join(lines)
