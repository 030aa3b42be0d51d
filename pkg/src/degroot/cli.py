"""
Command line entry point with the `sweep`, `verify`, `gen-network` and
`influence` subcommands.
"""
import argparse
import sys

from .analytics import influence_report, social_influence_vector
from .checks import run_checks
from .config import build_sweep_config, load_config_file, worker_count
from .dynamics import TIMING_OPTIONS, Scenario, export_trace_csv, simulate
from .exceptions import ConfigError, DegrootError
from .harness import DURATION, FACTORS, TARGET_SELECTIONS, run_sweep, select_targets
from .logger import LOGGER, set_verbosity
from .netgen import NetworkSpec, generate_interaction_matrix, read_matrix_csv, write_matrix_csv
from .report import emit_csv, emit_plot_data, render_plot
from .rng import XorShift64Star
from .version import __version__


def _csv_list(text):
    return [item.strip() for item in text.split(",") if item.strip()]


def _int_list(text):
    return [int(item) for item in _csv_list(text)]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="degroot-influence",
        description="Simulate DeGroot opinion formation with a temporary external agent")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true", help="Debug level logs")
    parser.add_argument("-q", "--quiet", action="store_true", help="Only log errors")
    subparsers = parser.add_subparsers(dest="command")
    subparsers.required = True

    sweep = subparsers.add_parser("sweep", help="Run a factor sweep across timing options")
    sweep.add_argument("--config", help="TOML file with [network] and [sweep] tables")
    sweep.add_argument("--factor", choices=FACTORS)
    sweep.add_argument("--values", help="Comma separated swept values")
    sweep.add_argument("--timing", type=_csv_list, help="Comma separated timing options")
    sweep.add_argument("--n", type=int, help="Number of agents")
    sweep.add_argument("--reps", type=int, help="Replications per cell")
    sweep.add_argument("--horizon", type=int, help="Rounds budget per simulation")
    sweep.add_argument("--lambda", dest="lam", type=float, help="Held intensity")
    sweep.add_argument("--coverage", type=float, help="Held coverage fraction")
    sweep.add_argument("--duration", type=int, help="Held duration")
    sweep.add_argument("--target-selection", choices=TARGET_SELECTIONS)
    sweep.add_argument("--seed", type=int, help="Base seed")
    sweep.add_argument("--out", required=True, help="CSV report path")
    sweep.add_argument("--plot-data", help="Columnar plot data path")
    sweep.add_argument("--svg", help="SVG chart path")

    verify = subparsers.add_parser("verify", help="Run the analytical check suites")
    verify.add_argument("--seed", type=int, default=0)

    network = subparsers.add_parser("gen-network", help="Write a random interaction matrix CSV")
    network.add_argument("--n", type=int, default=100)
    network.add_argument("--density", type=float, default=0.3)
    network.add_argument("--self-loop-min", type=float, default=0.1)
    network.add_argument("--seed", type=int, default=0)
    network.add_argument("--out", required=True)

    influence = subparsers.add_parser(
        "influence", help="Simulate one scenario on a matrix CSV and print its influence report")
    influence.add_argument("--matrix", required=True, help="Interaction matrix CSV")
    group = influence.add_mutually_exclusive_group(required=True)
    group.add_argument("--targets", type=_int_list, help="Comma separated 0-based agent indices")
    group.add_argument("--coverage", type=float, help="Random targets covering this fraction")
    influence.add_argument("--lambda", dest="lam", type=float, required=True)
    influence.add_argument("--duration", type=int, required=True)
    influence.add_argument("--timing", choices=TIMING_OPTIONS, default="consensus")
    influence.add_argument("--horizon", type=int, default=3000)
    influence.add_argument("--epsilon", type=float, default=1e-9)
    influence.add_argument("--seed", type=int, default=0)
    influence.add_argument("--trace-out", help="Write the full trace CSV here")

    return parser


def _sweep_overrides(args, factor):
    values = None
    if args.values:
        cast = int if factor == DURATION else float
        try:
            values = [cast(item) for item in _csv_list(args.values)]
        except ValueError:
            raise ConfigError("Cannot read {0} values from {1!r}".format(factor, args.values))
    return {
        "factor": args.factor, "values": values, "timing": args.timing, "n": args.n,
        "replications": args.reps, "horizon": args.horizon, "lam": args.lam,
        "coverage": args.coverage, "duration": args.duration,
        "target_selection": args.target_selection, "seed": args.seed,
    }


def command_sweep(args):
    file_values = load_config_file(args.config) if args.config else {}
    factor = args.factor or file_values.get("factor") or DURATION
    config = build_sweep_config(file_values, _sweep_overrides(args, factor))
    table = run_sweep(config, workers=worker_count())
    emit_csv(table, args.out)
    if args.plot_data:
        emit_plot_data(table, args.plot_data)
    if args.svg:
        render_plot(table, args.svg)
    return 0


def command_verify(args):
    results = run_checks(seed=args.seed)
    for result in results:
        print(result)
    return 0 if all(result.passed for result in results) else 1


def command_gen_network(args):
    spec = NetworkSpec(
        n=args.n, edge_density=args.density, self_loop_min=args.self_loop_min, seed=args.seed)
    write_matrix_csv(generate_interaction_matrix(spec), args.out)
    log = "Successfully wrote matrix from {0} to {1}".format(spec, args.out)
    LOGGER.info(log)
    return 0


def command_influence(args):
    matrix = read_matrix_csv(args.matrix)
    targets = args.targets
    if targets is None:
        order = XorShift64Star(args.seed).permutation(matrix.n)
        targets = select_targets(order, args.coverage, matrix.n)

    scenario = Scenario(
        matrix=matrix, targets=targets, lam=args.lam, k=args.duration, timing=args.timing,
        horizon=args.horizon, epsilon=args.epsilon, seed=args.seed,
        keep_full_trace=bool(args.trace_out))
    trace = simulate(scenario)
    if args.trace_out:
        export_trace_csv(trace, args.trace_out)

    report = influence_report(scenario, trace, social_influence_vector(matrix))
    sys.stdout.write(report.to_record())
    return 0


COMMANDS = {
    "sweep": command_sweep,
    "verify": command_verify,
    "gen-network": command_gen_network,
    "influence": command_influence,
}


def main(argv=None):
    args = build_parser().parse_args(argv)

    set_verbosity(verbose=args.verbose, quiet=args.quiet)

    try:
        return COMMANDS[args.command](args)
    except DegrootError as exc:
        log = "Failed running {0}: {1}".format(args.command, exc)
        LOGGER.error(log)
        return 1


if __name__ == "__main__":
    sys.exit(main())
