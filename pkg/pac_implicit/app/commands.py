from __future__ import annotations

import logging
import os
import time
from pathlib import Path
from typing import TextIO

from pac_implicit.app.constants import POSITIVE_RATIO, SUCCESS, ExitCode
from pac_implicit.app.experiment import (
    ExperimentConfig,
    format_summary,
    is_feasible_estimate,
    resolve_spec,
    run_experiment,
    run_rng,
    summarise,
    write_csv,
)
from pac_implicit.bench.constants import PROBLEM_SUFFIX
from pac_implicit.bench.dataset import (
    load_dataset,
    positive_observations,
    sample_dataset,
    save_dataset,
)
from pac_implicit.bench.generators import FAMILY_RE
from pac_implicit.linarith.expr import VariableSet
from pac_implicit.linarith.parser import parse_formula, parse_query
from pac_implicit.optimise.optimise import optimise_pac
from pac_implicit.pac.decide import decide_pac
from pac_implicit.pac.sampling import PacParams
from pac_implicit.utils import RationalLike, format_rational, to_rational

log = logging.getLogger(__name__)


def cmd_decide(
    kb_path: str | os.PathLike,
    query: str,
    data_path: str | os.PathLike,
    epsilon: RationalLike,
    full_evaluation: bool = False,
    gamma: RationalLike | None = None,
    delta_conf: RationalLike | None = None,
    out: TextIO | None = None,
) -> ExitCode:
    """Run DecidePAC on the positive samples of a data file; Accept exits 0, Reject 1."""
    variables = VariableSet()
    with open(kb_path, "r") as kb_file:
        kb = parse_formula(kb_file.read(), variables)
    atoms = parse_query(query, variables)
    samples = positive_observations(load_dataset(data_path, variables))

    epsilon = to_rational(epsilon)
    decision = decide_pac(kb, atoms, epsilon, samples, full_evaluation=full_evaluation)

    print("Accept" if decision.accepted else "Reject", file=out)
    print(f"FAILED = {decision.failed_count}", file=out)
    print(f"B = {decision.budget}", file=out)
    print(f"m = {len(samples)}", file=out)
    print(f"evaluated = {decision.sample_total}", file=out)
    print(
        "per sample: " + ", ".join(outcome.name.lower() for outcome in decision.per_sample),
        file=out,
    )
    if gamma is not None and delta_conf is not None:
        params = PacParams(epsilon, to_rational(gamma), to_rational(delta_conf))
        print(f"recommended m = {params.sample_count} (have {len(samples)})", file=out)

    return ExitCode.ACCEPT if decision.accepted else ExitCode.REJECT


def cmd_optimise(
    config: ExperimentConfig,
    data_path: str | os.PathLike | None = None,
    out: TextIO | None = None,
) -> ExitCode:
    """
    Run OptimisePAC for one problem, on the positives of ``data_path`` or,
    without one, on a dataset drawn like the first cell of a bench grid.
    """
    spec = resolve_spec(config)
    if data_path is not None:
        samples = load_dataset(data_path, spec.variables)
    else:
        samples = sample_dataset(
            spec,
            config.sample_sizes[0],
            POSITIVE_RATIO,
            config.noise,
            config.outliers,
            run_rng(config, 0, 0),
            mask_probability=config.mask_probability,
        )
    observations = positive_observations(samples)

    start = time.perf_counter()
    result = optimise_pac(
        spec.knowledge_base(config.kb_mode),
        spec.objective,
        config.effective_epsilon,
        config.accuracy,
        observations,
        spec.goal,
    )
    elapsed_ms = (time.perf_counter() - start) * 1000

    print(f"problem: {spec.name} ({spec.goal.name.lower()}, {spec.dims} dims)", file=out)
    print(f"samples: {len(observations)} positive", file=out)
    recommended = config.recommended_samples
    if recommended is not None:
        print(f"recommended m = {recommended} (have {len(observations)})", file=out)
    estimate = result.estimate
    print(f"estimate: {float(estimate):.9f} ({format_rational(estimate)})", file=out)
    print(
        f"bracket: [{float(result.bracket_low):.9f}, {float(result.bracket_high):.9f}] "
        f"width {format_rational(result.width)}",
        file=out,
    )
    print(f"decide_calls: {result.decide_calls}", file=out)
    print(f"solver_calls: {result.solver_calls}", file=out)
    print(f"time: {elapsed_ms:.1f} ms", file=out)
    if spec.true_optimum is not None:
        feasible = is_feasible_estimate(result.estimate, spec.true_optimum, spec.goal)
        print(
            f"true optimum: {float(spec.true_optimum):.6f} "
            f"({'feasible' if feasible else 'infeasible'})",
            file=out,
        )
    return SUCCESS


def default_output(config: ExperimentConfig, suffix: str) -> Path:
    return Path(Path(config.problem).stem + suffix)


def cmd_bench(config: ExperimentConfig, out: TextIO | None = None) -> ExitCode:
    """Run the experiment grid, write the CSV and print the summary table."""
    rows = run_experiment(config)

    output = Path(config.output) if config.output else default_output(config, ".csv")
    with open(output, "w", newline="") as csv_file:
        write_csv(rows, csv_file)
    log.info("Wrote %d rows to %s", len(rows), output)

    title = (
        f"{rows[0]['problem']}: noise {format_rational(config.noise)}, "
        f"outliers {format_rational(config.outliers)}, "
        f"epsilon {format_rational(config.effective_epsilon)}"
    )
    print(format_summary(summarise(rows), title), file=out)
    if config.recommended_samples is not None:
        sizes = " ".join(str(size) for size in config.sample_sizes)
        print(
            f"recommended m = {config.recommended_samples} positive "
            f"(have samples {sizes}, half positive)",
            file=out,
        )
    return SUCCESS


def cmd_generate(config: ExperimentConfig, out: TextIO | None = None) -> ExitCode:
    """
    Write the dataset that ``optimise`` without a data file would draw, and
    for generated families the drawn problem next to it.
    """
    spec = resolve_spec(config)
    samples = sample_dataset(
        spec,
        config.sample_sizes[0],
        POSITIVE_RATIO,
        config.noise,
        config.outliers,
        run_rng(config, 0, 0),
        mask_probability=config.mask_probability,
    )
    output = Path(config.output) if config.output else default_output(config, ".data")
    save_dataset(samples, spec.variables, output)
    print(f"Wrote {len(samples)} samples of {spec.name} to {output}", file=out)
    if FAMILY_RE.match(config.problem):
        # Loadable later as `optimise <stem>.prob --data <output>`
        problem_output = output.with_suffix(PROBLEM_SUFFIX)
        spec.save(problem_output)
        print(f"Wrote {spec.name} to {problem_output}", file=out)
    return SUCCESS
