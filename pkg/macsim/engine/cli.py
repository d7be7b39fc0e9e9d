"""Command-line experiment runner.

  macsim run <scenario.json>
  macsim sweep <scenario.json> [--jobs N]
  macsim layout <algorithm> --n N --k K
  macsim witness {k-cycle,k-clique,k-subsets} --n N --k K --rho p/q --beta B --t T [--out trace.csv]
  macsim validate-trace <trace.csv> --rho p/q --beta B

Exit status is 0 on success, 1 when a bound check fails, a run aborts or a
trace is inadmissible, and 2 on configuration errors.
"""

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from macsim.adversary.leaky_bucket import AdversaryType, read_trace, validate_trace, write_trace
from macsim.adversary.witnesses import oblivious_pair_witness, oblivious_station_witness
from macsim.algorithms import create_algorithm
from macsim.config import EngineConfig, format_rational, load_scenario, log_level, max_gamma, parse_rational
from macsim.engine.simulation import conservation_audit, run_simulation
from macsim.errors import AdversaryError, ConfigError, LayoutError, MacsimError
from macsim.metrics.bounds import evaluate_bounds
from macsim.metrics.report import summary_document, summary_json, write_round_csv, write_summary_json
from macsim.world.layouts import build_group_layout, build_pair_layout, build_thread_layout
from macsim.world.schedule import extract_oblivious_schedule

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

AGGREGATE_HEADER = ("algorithm", "n", "k", "rho", "beta", "horizon", "max_queue", "max_latency", "checks_passed")
LAYOUT_ALGORITHMS = ("k-cycle", "k-clique", "k-subsets")
WITNESS_ALGORITHMS = ("k-cycle", "k-clique", "k-subsets")


def parse_arguments(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse command-line arguments."""
    parser = argparse.ArgumentParser(prog="macsim", description="Energy-capped multiple-access channel simulator")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="Log INFO (-v) or DEBUG (-vv) to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run one scenario")
    run.add_argument("scenario", help="Scenario JSON file")
    run.add_argument("--trace", help="Write the per-round CSV here (overrides outputs.trace_csv)")
    run.add_argument("--summary", help="Write the JSON summary here (overrides outputs.summary_json)")

    sweep = commands.add_parser("sweep", help="Run a scenario once per rho in its sweep list")
    sweep.add_argument("scenario", help="Scenario JSON file with a 'sweep' list")
    sweep.add_argument("--jobs", type=int, default=1, help="Worker processes")
    sweep.add_argument("--aggregate", help="Write the aggregate CSV here (overrides outputs.aggregate_csv)")

    layout = commands.add_parser("layout", help="Print the group, pair or subset layout")
    layout.add_argument("algorithm", choices=LAYOUT_ALGORITHMS)
    layout.add_argument("--n", type=int, required=True)
    layout.add_argument("--k", type=int, required=True)

    witness = commands.add_parser("witness", help="Emit the lower-bound adversary trace for an oblivious schedule")
    witness.add_argument("algorithm", choices=WITNESS_ALGORITHMS)
    witness.add_argument("--n", type=int, required=True)
    witness.add_argument("--k", type=int, required=True)
    witness.add_argument("--rho", required=True, help="Injection rate as p/q")
    witness.add_argument("--beta", default="1", help="Burstiness as p/q or an integer")
    witness.add_argument("--t", type=int, required=True, help="Interval over which on-rounds are counted")
    witness.add_argument("--kind", choices=("station", "pair"), default="station")
    witness.add_argument("--out", help="Trace CSV path (stdout when omitted)")

    validate = commands.add_parser("validate-trace", help="Check a trace against a leaky-bucket type")
    validate.add_argument("trace", help="Trace CSV file")
    validate.add_argument("--rho", required=True, help="Injection rate as p/q")
    validate.add_argument("--beta", required=True, help="Burstiness as p/q or an integer")

    return parser.parse_args(argv)


def _configure_logging(verbose: int):
    if verbose >= 2:
        level = "DEBUG"
    elif verbose == 1:
        level = "INFO"
    else:
        level = log_level()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _run_config(config: EngineConfig) -> Tuple[Dict[str, Any], bool]:
    """Run one config and return its summary document and whether every check passed."""
    report = run_simulation(config)
    checks = evaluate_bounds(report)
    audit = conservation_audit(report)
    if not audit:
        logger.error("conservation audit failed in round %s: %s", audit.round, audit.reason)
    passed = bool(audit) and not any(check.failed for check in checks)
    return summary_document(report, checks), passed


def cmd_run(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    report = run_simulation(scenario.config)
    checks = evaluate_bounds(report)
    audit = conservation_audit(report)

    trace_path = args.trace or scenario.outputs.get("trace_csv")
    summary_path = args.summary or scenario.outputs.get("summary_json")
    if trace_path:
        write_round_csv(report, trace_path)
    if summary_path:
        write_summary_json(report, checks, summary_path)
    else:
        sys.stdout.write(summary_json(report, checks))

    failed = [check.name for check in checks if check.failed]
    if failed:
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
    if not audit:
        print(f"conservation audit failed in round {audit.round}: {audit.reason}", file=sys.stderr)
    return EXIT_FAILED if failed or not audit else EXIT_OK


def _rho_path(path: str, rho) -> str:
    target = Path(path)
    return str(target.with_name(f"{target.stem}_rho{rho.numerator}-{rho.denominator}{target.suffix}"))


def cmd_sweep(args: argparse.Namespace) -> int:
    scenario = load_scenario(args.scenario)
    if not scenario.sweep:
        raise ConfigError("scenario has no 'sweep' list")
    if args.jobs < 1:
        raise ConfigError(f"--jobs must be positive, got {args.jobs}")
    configs = [scenario.config.with_rho(rho) for rho in scenario.sweep]

    if args.jobs == 1:
        results = [_run_config(config) for config in configs]
    else:
        with ProcessPoolExecutor(max_workers=args.jobs) as executor:
            results = list(executor.map(_run_config, configs))

    rows: List[Tuple[Any, ...]] = []
    all_passed = True
    summary_path = scenario.outputs.get("summary_json")
    for config, (document, passed) in zip(configs, results):
        logger.info("sweep rho=%s: max queue %d", format_rational(config.rho), document["summary"]["max_queue"])
        all_passed = all_passed and passed
        if summary_path:
            with open(_rho_path(summary_path, config.rho), "w", encoding="utf-8") as handle:
                handle.write(json.dumps(document, sort_keys=True, indent=2) + "\n")
        summary = document["summary"]
        rows.append(
            (
                config.algorithm,
                config.n,
                config.energy_cap,
                format_rational(config.rho),
                format_rational(config.beta),
                config.horizon,
                summary["max_queue"],
                summary["max_latency"],
                "true" if passed else "false",
            )
        )

    aggregate_path = args.aggregate or scenario.outputs.get("aggregate_csv")
    handle = open(aggregate_path, "w", newline="", encoding="utf-8") if aggregate_path else sys.stdout
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(AGGREGATE_HEADER)
        writer.writerows(rows)
    finally:
        if aggregate_path:
            handle.close()
    return EXIT_OK if all_passed else EXIT_FAILED


def cmd_layout(args: argparse.Namespace) -> int:
    if args.algorithm == "k-cycle":
        layout = build_group_layout(args.n, args.k)
    elif args.algorithm == "k-clique":
        layout = build_pair_layout(args.n, args.k)
    else:
        layout = build_thread_layout(args.n, args.k, max_gamma())
    print(json.dumps(layout.to_dict(), sort_keys=True, indent=2))
    return EXIT_OK


def cmd_witness(args: argparse.Namespace) -> int:
    adversary = AdversaryType(parse_rational(args.rho, "rho"), parse_rational(args.beta, "beta"))
    config = EngineConfig(
        n=args.n,
        energy_cap=args.k,
        horizon=args.t,
        algorithm=args.algorithm,
        adversary="none",
        rho=adversary.rho,
        beta=adversary.beta,
    )
    algorithm = create_algorithm(config)
    schedule = extract_oblivious_schedule(algorithm)
    build = oblivious_station_witness if args.kind == "station" else oblivious_pair_witness
    witness = build(schedule, adversary, args.t)
    print(
        f"target {list(witness.target)}: on {witness.on_count} of {args.t} rounds, "
        f"residual queue at least {witness.residual_bound}",
        file=sys.stderr,
    )
    if args.out:
        write_trace(witness.trace, args.out)
    else:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(("round", "station", "destination"))
        writer.writerows(witness.trace.rows())
    return EXIT_OK


def cmd_validate_trace(args: argparse.Namespace) -> int:
    adversary = AdversaryType(parse_rational(args.rho, "rho"), parse_rational(args.beta, "beta"))
    result = validate_trace(read_trace(args.trace), adversary)
    print(result.describe())
    return EXIT_OK if result else EXIT_FAILED


COMMANDS = {
    "run": cmd_run,
    "sweep": cmd_sweep,
    "layout": cmd_layout,
    "witness": cmd_witness,
    "validate-trace": cmd_validate_trace,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point for the simulator."""
    args = parse_arguments(argv)
    _configure_logging(args.verbose)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, AdversaryError, LayoutError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except MacsimError as e:
        print(f"run aborted: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
