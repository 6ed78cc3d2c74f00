import argparse
import logging
import sys

from pac_implicit.app.commands import cmd_bench, cmd_decide, cmd_generate, cmd_optimise
from pac_implicit.app.constants import DEFAULT_RUNS, DEFAULT_SAMPLE_SIZES, DEFAULT_SEED, ExitCode
from pac_implicit.app.experiment import ExperimentConfig
from pac_implicit.bench.constants import KbMode
from pac_implicit.errors import PacImplicitError, Unbounded
from pac_implicit.optimise.constants import DEFAULT_ACCURACY
from pac_implicit.utils import to_rational


def _add_experiment_args(parser: argparse.ArgumentParser, many_sizes: bool):
    parser.add_argument(
        "problem", type=str, help="pollution, police, simplexn, cuben or a .prob file"
    )
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--noise", type=to_rational, default=0)
    parser.add_argument("--outliers", type=to_rational, default=0)
    parser.add_argument("--mask", type=float, default=0.0, help="per-coordinate mask probability")
    parser.add_argument("--epsilon", type=to_rational, default=None)
    parser.add_argument("--accuracy", type=int, default=DEFAULT_ACCURACY)
    if many_sizes:
        parser.add_argument("--samples", type=int, nargs="+", default=list(DEFAULT_SAMPLE_SIZES))
    else:
        parser.add_argument("--samples", type=int, default=DEFAULT_SAMPLE_SIZES[-1])
    parser.add_argument("--runs", type=int, default=DEFAULT_RUNS)
    parser.add_argument("--output", type=str)
    parser.add_argument("--dims", type=int)
    parser.add_argument("--kb", choices=[mode.name.lower() for mode in KbMode], default="hard")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--gamma", type=to_rational, help="with --delta, report samples needed")
    parser.add_argument("--delta", type=to_rational)


def _config(args: argparse.Namespace) -> ExperimentConfig:
    sizes = args.samples if isinstance(args.samples, list) else [args.samples]
    return ExperimentConfig(
        problem=args.problem,
        seed=args.seed,
        sample_sizes=sizes,
        runs=args.runs,
        noise=args.noise,
        outliers=args.outliers,
        epsilon=args.epsilon,
        accuracy=args.accuracy,
        output=args.output,
        verbose=args.verbose,
        dims=args.dims,
        kb_mode=KbMode[args.kb.upper()],
        mask_probability=args.mask,
        workers=args.workers,
        gamma=args.gamma,
        delta_conf=args.delta,
    )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser("pac-implicit")
    subparsers = parser.add_subparsers(dest="command", required=True)

    decide = subparsers.add_parser(
        "decide", parents=[common], help="accept or reject a query from a dataset"
    )
    decide.add_argument("kb", type=str, help="knowledge base file, one constraint per line")
    decide.add_argument("query", type=str, help="conjunction of constraints, e.g. 'stress > 50'")
    decide.add_argument("data", type=str, help="dataset file")
    decide.add_argument("--epsilon", type=to_rational, default=0)
    decide.add_argument("--gamma", type=to_rational)
    decide.add_argument("--delta", type=to_rational)
    decide.add_argument("--full-evaluation", action="store_true")
    decide.set_defaults(
        handler=lambda args: cmd_decide(
            args.kb,
            args.query,
            args.data,
            args.epsilon,
            full_evaluation=args.full_evaluation,
            gamma=args.gamma,
            delta_conf=args.delta,
        )
    )

    optimise = subparsers.add_parser(
        "optimise", parents=[common], help="estimate the optimum of a problem"
    )
    _add_experiment_args(optimise, many_sizes=False)
    optimise.add_argument("--data", type=str, help="dataset file; drawn from --seed if omitted")
    optimise.set_defaults(handler=lambda args: cmd_optimise(_config(args), args.data))

    bench = subparsers.add_parser(
        "bench", parents=[common], help="run the sample size by run grid"
    )
    _add_experiment_args(bench, many_sizes=True)
    bench.set_defaults(handler=lambda args: cmd_bench(_config(args)))

    generate = subparsers.add_parser(
        "generate", parents=[common], help="write a dataset file"
    )
    _add_experiment_args(generate, many_sizes=False)
    generate.set_defaults(handler=lambda args: cmd_generate(_config(args)))

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        return int(args.handler(args))
    except Unbounded as e:
        print(f"pac-implicit: {e}", file=sys.stderr)
        return int(ExitCode.UNBOUNDED)
    except (PacImplicitError, ValueError, OSError) as e:
        print(f"pac-implicit: error: {e}", file=sys.stderr)
        return int(ExitCode.ERROR)


if __name__ == "__main__":
    sys.exit(main())
