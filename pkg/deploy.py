#!/usr/bin/env python3
"""
Command-line entry point.

    deploy run       --config <file>                         sweep experiment -> CSV
    deploy solve     --scenario <json> --algo <name>         one Deployment as JSON
    deploy bench     --n <N> --algo <name> --reps <R>        solve latency
    deploy validate  --deployment <json> --scenario <json>   constraint checker
    deploy plot      --results <csv> --metric <column>       gnuplot columns
    deploy generate  --config <file> --out <json>            scenario export

JSON and CSV go to stdout (or --out); logs go to stderr. Exit status is 0 on
success, 1 on configuration or I/O errors and 2 when a deployment is invalid.
"""
import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import List, Optional

# Load environment variables from .env if python-dotenv is available
try:
    from dotenv import load_dotenv  # type: ignore
    load_dotenv()
except Exception:
    pass

from config_loader import (ConfigError, build_channel_params, build_constraints, build_experiment_config,
                           build_scenario_config, build_solver_options, load_config)
from deployment import Deployment
from harness import format_gnuplot, measure_latency, read_csv, run_experiment
from logger import get_logger
from scenario import generate_users, load_scenario, save_scenario
from solvers import algorithm_names, solve
from validator import DeploymentInvalid, validate_deployment

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2


def _emit(text: str, out: Optional[Path]):
    if out is None:
        sys.stdout.write(text if text.endswith('\n') else text + '\n')
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text)


def _config(args):
    cfg = load_config(args.config)
    if getattr(args, 'baseline_fixed_altitude', None) is not None:
        cfg.set('baselines.fixed_altitude', args.baseline_fixed_altitude)
    if getattr(args, 'workers', None) is not None:
        cfg.set('experiment.workers', args.workers)
    if getattr(args, 'output', None) is not None:
        cfg.set('experiment.output_path', str(args.output))
    get_logger('deploy', cfg.to_dict())
    return cfg


def cmd_run(args) -> int:
    cfg = _config(args)
    result = run_experiment(build_experiment_config(cfg))
    print(result.output_path)
    return EXIT_OK


def cmd_solve(args) -> int:
    cfg = _config(args)
    users, area, seed = load_scenario(args.scenario)
    options = dataclasses.replace(build_solver_options(cfg, seed=seed), area=area)
    deployment = solve(args.algo, users, build_constraints(cfg), build_channel_params(cfg), options)
    _emit(deployment.save_json(), args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    cfg = _config(args)
    scenario = dataclasses.replace(build_scenario_config(cfg), n_users=args.n)
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    users = generate_users(scenario)
    options = build_solver_options(cfg, seed=scenario.seed)
    stats = measure_latency(args.algo, users, build_constraints(cfg), build_channel_params(cfg),
                            repetitions=args.reps, options=options)
    data = dataclasses.asdict(stats)
    data['samples'] = list(stats.samples)
    _emit(json.dumps(data, indent=1), None)
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _config(args)
    deployment = Deployment.load_json(args.deployment)
    users, _, _ = load_scenario(args.scenario)
    violations = validate_deployment(deployment, users, build_constraints(cfg), build_channel_params(cfg),
                                     sequential_qos=args.sequential_qos,
                                     require_enclosure=args.require_enclosure)
    _emit(json.dumps({'valid': not violations, 'violations': violations}, indent=1), None)
    return EXIT_OK if not violations else EXIT_INVALID


def cmd_plot(args) -> int:
    get_logger('deploy', {})
    _emit(format_gnuplot(read_csv(args.results), args.metric), args.out)
    return EXIT_OK


def cmd_generate(args) -> int:
    cfg = _config(args)
    scenario = build_scenario_config(cfg)
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    users = generate_users(scenario)
    save_scenario(args.out, users, scenario)
    print(args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='deploy', description='UAV base station deployment experiments')
    sub = parser.add_subparsers(dest='command', required=True)

    def with_config(p, required=False):
        p.add_argument('--config', type=Path, required=required, help='YAML or JSON config (keys override defaults)')
        p.add_argument('--baseline-fixed-altitude', type=float, default=None,
                       help='Fly K-Means and Voronoi UAVs at this altitude instead of the beam-derived one')

    p = sub.add_parser('run', help='Run a sweep experiment')
    with_config(p, required=True)
    p.add_argument('--workers', type=int, default=None, help='Worker threads (overrides DEPLOY_WORKERS)')
    p.add_argument('--output', type=Path, default=None, help='CSV path (overrides experiment.output_path)')
    p.set_defaults(func=cmd_run)

    p = sub.add_parser('solve', help='Solve one scenario')
    with_config(p)
    p.add_argument('--scenario', type=Path, required=True)
    p.add_argument('--algo', choices=algorithm_names(), required=True)
    p.add_argument('--out', type=Path, default=None)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser('bench', help='Measure solve latency')
    with_config(p)
    p.add_argument('--n', type=int, required=True, help='Number of users')
    p.add_argument('--algo', choices=algorithm_names(), required=True)
    p.add_argument('--reps', type=int, default=10, help='Repetitions, the first is discarded')
    p.add_argument('--seed', type=int, default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser('validate', help='Check a deployment against the constraints')
    with_config(p)
    p.add_argument('--deployment', type=Path, required=True)
    p.add_argument('--scenario', type=Path, required=True)
    p.add_argument('--sequential-qos', action='store_true', help='Replay the per-commit edge-user QoS check')
    p.add_argument('--require-enclosure', action='store_true', help='Served users must lie inside the footprint')
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser('plot', help='Emit gnuplot columns from a results CSV')
    p.add_argument('--results', type=Path, required=True)
    p.add_argument('--metric', required=True)
    p.add_argument('--out', type=Path, default=None)
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser('generate', help='Export a generated scenario as JSON')
    with_config(p, required=True)
    p.add_argument('--out', type=Path, required=True)
    p.add_argument('--seed', type=int, default=None)
    p.set_defaults(func=cmd_generate)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DeploymentInvalid as e:
        get_logger().error("deployment invalid", algorithm=e.algorithm, violations=len(e.violations))
        for violation in e.violations:
            print(violation, file=sys.stderr)
        return EXIT_INVALID
    except (ConfigError, ValueError, OSError, KeyError) as e:
        get_logger().error(str(e), command=args.command)
        return EXIT_ERROR


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        sys.exit(130)
