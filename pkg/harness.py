#!/usr/bin/env python3
"""
Experiment harness: parameter sweeps, multi-seed trials, latency runs.

One trial is a (sweep value, trial index) pair. All algorithms of a trial
solve the same snapshot, generated from base_seed + trial index, and every
deployment goes through the validator before its metrics are taken. Trials
run on the worker pool; rows are sorted before anything is written, so the
CSV does not depend on the worker count.
"""
import csv
import io
import math
import os
import statistics
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from baselines import SolverOptions
from channel import ChannelParams, DeploymentConstraints
from event_bus import Event, EventBus, EventType
from logger import get_logger
from metrics import evaluate
from run_state import RunState, TrialFailure
from scenario import GroundUser, ScenarioConfig, generate_users, max_displacement, simulate_mobility
from solvers import get_solver, resolve_fleet_size, solve
from utils import format_number, loglog_slope, percentile, trial_seed
from validator import assert_valid
from workers import TrialWorkerPool

CSV_COLUMNS = (
    'sweep_value', 'algorithm', 'trial', 'seed', 'n_users', 'n_uavs',
    'satisfaction', 'jain', 'ee_bits_per_joule', 'throughput_bps', 'solve_ms',
)
TIMING_COLUMNS = ('solve_ms',)
METRIC_COLUMNS = ('n_users', 'n_uavs', 'satisfaction', 'jain', 'ee_bits_per_joule', 'throughput_bps', 'solve_ms')
SUMMARY_TRIAL = 'mean'

# Solvers whose output must also pass the per-commit QoS replay / footprint enclosure
SEQUENTIAL_QOS = frozenset({'scope'})
ENCLOSING = frozenset({'scope', 'ccs'})


class SweepAxis(Enum):
    """Parameter varied along an experiment."""
    USERS = "users"           # n_users
    QOS = "qos"               # r_min_rate, values in Mbps
    ALPHA = "alpha"           # Gauss-Markov memory
    BEAMWIDTH = "beamwidth"   # theta_bw, values in degrees


@dataclass(frozen=True)
class ExperimentConfig:
    """A full sweep: axis, values, algorithms, trials and the base problem."""
    sweep_axis: SweepAxis
    sweep_values: Tuple[float, ...]
    algorithms: Tuple[str, ...]
    trials: int
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    channel: ChannelParams = field(default_factory=ChannelParams)
    constraints: DeploymentConstraints = field(default_factory=DeploymentConstraints)
    options: SolverOptions = field(default_factory=SolverOptions)
    output_path: Path = Path('results/experiment.csv')
    workers: int = 1
    mobility_steps: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'sweep_values', tuple(float(v) for v in self.sweep_values))
        object.__setattr__(self, 'algorithms', tuple(self.algorithms))
        object.__setattr__(self, 'output_path', Path(self.output_path))
        if self.trials < 1:
            raise ValueError("experiment.trials must be >= 1")
        if not self.sweep_values:
            raise ValueError("experiment.sweep_values must not be empty")
        if list(self.sweep_values) != sorted(self.sweep_values):
            raise ValueError("experiment.sweep_values must be sorted ascending")
        if not self.algorithms:
            raise ValueError("experiment.algorithms must not be empty")
        for name in self.algorithms:
            get_solver(name)
        if self.workers < 1:
            raise ValueError("experiment.workers must be >= 1")
        if self.mobility_steps < 0:
            raise ValueError("experiment.mobility_steps must be >= 0")
        if self.sweep_axis is SweepAxis.USERS and any(v < 1 or not v.is_integer() for v in self.sweep_values):
            raise ValueError("user counts must be positive integers")

    def point(self, value: float) -> Tuple[ScenarioConfig, DeploymentConstraints]:
        """Scenario and constraints at one sweep value."""
        if self.sweep_axis is SweepAxis.USERS:
            return replace(self.scenario, n_users=int(value)), self.constraints
        if self.sweep_axis is SweepAxis.QOS:
            return self.scenario, replace(self.constraints, r_min_rate=value * 1e6)
        if self.sweep_axis is SweepAxis.ALPHA:
            return replace(self.scenario, alpha=value), self.constraints
        return self.scenario, replace(self.constraints, theta_bw=math.radians(value))


@dataclass(frozen=True)
class TrialTask:
    sweep_value: float
    trial: int
    seed: int


@dataclass(frozen=True)
class TrialRow:
    """One CSV line."""
    sweep_value: float
    algorithm: str
    trial: Union[int, str]
    seed: Union[int, str]
    n_users: float
    n_uavs: float
    satisfaction: float
    jain: float
    ee_bits_per_joule: float
    throughput_bps: float
    solve_ms: float

    @property
    def is_summary(self) -> bool:
        return self.trial == SUMMARY_TRIAL

    def cells(self) -> List[str]:
        return [format_number(getattr(self, c)) for c in CSV_COLUMNS]


@dataclass
class ExperimentResult:
    rows: List[TrialRow]
    summary_rows: List[TrialRow]
    output_path: Path


@dataclass(frozen=True)
class LatencyStats:
    """Solve-time statistics over repeated runs on one snapshot (seconds)."""
    algorithm: str
    n_users: int
    repetitions: int
    median: float
    p95: float
    samples: Tuple[float, ...]
    deterministic: bool
    max_displacement_m: float


# ---------------- Trials ----------------

def _snapshot(config: ExperimentConfig,
              task: TrialTask) -> Tuple[List[GroundUser], ScenarioConfig, DeploymentConstraints]:
    scenario, constraints = config.point(task.sweep_value)
    scenario = scenario.with_seed(task.seed)
    users = generate_users(scenario)
    if config.mobility_steps:
        users = simulate_mobility(users, scenario, config.mobility_steps)
    return users, scenario, constraints


def run_trial(config: ExperimentConfig, task: TrialTask) -> List[TrialRow]:
    """Solve, validate and evaluate every algorithm on one snapshot.

    Raises:
        DeploymentInvalid: If any deployment breaks a hard constraint
    """
    users, scenario, constraints = _snapshot(config, task)
    options = replace(config.options, seed=task.seed, area=scenario.area)
    fleet_sizes: Dict[str, int] = {}
    rows = []

    for algorithm in config.algorithms:
        donor = get_solver(algorithm).fleet_from
        k = None
        if donor is not None:
            if donor not in fleet_sizes:
                fleet_sizes[donor] = resolve_fleet_size(algorithm, users, constraints, config.channel, options)
            k = fleet_sizes[donor]

        deployment = solve(algorithm, users, constraints, config.channel, options, k=k)
        if donor is None:
            fleet_sizes[algorithm] = len(deployment.uavs)

        assert_valid(deployment, users, constraints, config.channel,
                     sequential_qos=algorithm in SEQUENTIAL_QOS,
                     require_enclosure=algorithm in ENCLOSING)
        report = evaluate(deployment, users, constraints, config.channel)
        rows.append(TrialRow(
            sweep_value=task.sweep_value,
            algorithm=algorithm,
            trial=task.trial,
            seed=task.seed,
            n_users=len(users),
            n_uavs=report.active_uavs,
            satisfaction=report.satisfaction,
            jain=report.jain_index,
            ee_bits_per_joule=report.energy_efficiency,
            throughput_bps=report.total_throughput,
            solve_ms=deployment.solve_time * 1e3,
        ))
    return rows


def _check_output_path(path: Path):
    if path.exists() and path.is_dir():
        raise OSError(f"output path is a directory: {path}")
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise OSError(f"cannot create output directory {path.parent}: {e}") from e
    if not os.access(path.parent, os.W_OK):
        raise OSError(f"output directory not writable: {path.parent}")


def _row_key(algorithms: Sequence[str]):
    order = {name: i for i, name in enumerate(algorithms)}

    def key(row: TrialRow):
        trial = math.inf if row.is_summary else row.trial
        return (row.sweep_value, order.get(row.algorithm, len(order)), row.algorithm, trial)
    return key


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None,
                   event_bus: Optional[EventBus] = None) -> ExperimentResult:
    """Run the whole sweep and write the CSV.

    Args:
        config: Experiment definition
        workers: Worker threads (default: config.workers)
        event_bus: Bus to report on (default: a private one)

    Returns:
        ExperimentResult with sorted data rows and the per-(value, algorithm) means

    Raises:
        OSError: If the output path cannot be written (checked before any trial)
        DeploymentInvalid: If any deployment fails validation; the run stops
    """
    logger = get_logger()
    _check_output_path(config.output_path)
    if config.sweep_axis is SweepAxis.ALPHA and config.mobility_steps == 0:
        logger.warning("alpha sweep without mobility steps; snapshots will not depend on alpha")

    tasks = [
        TrialTask(value, t, trial_seed(config.scenario.seed, t))
        for value in config.sweep_values for t in range(config.trials)
    ]
    n_workers = workers if workers is not None else config.workers
    bus = event_bus or EventBus()
    state = RunState(len(tasks), config.trials)

    def on_started(event: Event):
        state.mark_started()

    def on_completed(event: Event):
        task = event.payload['task']
        if state.add_rows(task.sweep_value, event.payload['rows']):
            bus.emit(EventType.SWEEP_POINT_COMPLETED, {'sweep_value': task.sweep_value}, source='harness')

    def on_failed(event: Event):
        task, error = event.payload['task'], event.payload['error']
        state.record_failure(TrialFailure(task.sweep_value, task.trial, task.seed, error))
        logger.error("trial failed", sweep_value=task.sweep_value, trial=task.trial,
                     seed=task.seed, error=str(error))

    def on_point(event: Event):
        logger.info("sweep point done", axis=config.sweep_axis.value,
                    value=event.payload['sweep_value'], **state.get_progress())

    bus.subscribe(EventType.TRIAL_STARTED, on_started)
    bus.subscribe(EventType.TRIAL_COMPLETED, on_completed)
    bus.subscribe(EventType.TRIAL_FAILED, on_failed)
    bus.subscribe(EventType.SWEEP_POINT_COMPLETED, on_point)

    logger.info("experiment started", axis=config.sweep_axis.value, values=len(config.sweep_values),
                algorithms=','.join(config.algorithms), trials=config.trials, workers=n_workers)
    pool = TrialWorkerPool(lambda task: run_trial(config, task), bus, n_workers)
    pool.start(tasks)
    try:
        while not state.is_done():
            bus.process_events(timeout=0.05)
    finally:
        pool.stop()
        bus.process_events(max_events=10_000)
        bus.shutdown()

    failure = state.first_failure()
    if failure is not None:
        raise failure.error

    rows = sorted(state.rows(), key=_row_key(config.algorithms))
    summary_rows = summary_means(rows, config.algorithms)
    write_csv(config.output_path, rows + summary_rows)
    logger.info("experiment finished", rows=len(rows), output=str(config.output_path), **bus.get_metrics())
    return ExperimentResult(rows, summary_rows, config.output_path)


# ---------------- Aggregation and output ----------------

def summarize(rows: Sequence[TrialRow]) -> Dict[Tuple[float, str], Dict[str, Tuple[float, float]]]:
    """Mean and sample standard deviation of every metric per (sweep value, algorithm).

    Summary rows in the input are ignored. The standard deviation of a single
    trial is 0.0.
    """
    groups: Dict[Tuple[float, str], List[TrialRow]] = {}
    for row in rows:
        if not row.is_summary:
            groups.setdefault((row.sweep_value, row.algorithm), []).append(row)

    out = {}
    for key, members in groups.items():
        stats = {}
        for column in METRIC_COLUMNS:
            values = [float(getattr(r, column)) for r in members]
            std = statistics.stdev(values) if len(values) > 1 else 0.0
            stats[column] = (statistics.fmean(values), std)
        out[key] = stats
    return out


def summary_means(rows: Sequence[TrialRow], algorithms: Sequence[str]) -> List[TrialRow]:
    rows_out = []
    for (value, algorithm), stats in summarize(rows).items():
        means = {column: stats[column][0] for column in METRIC_COLUMNS}
        rows_out.append(TrialRow(sweep_value=value, algorithm=algorithm, trial=SUMMARY_TRIAL, seed='', **means))
    return sorted(rows_out, key=_row_key(algorithms))


def write_csv(path: Path, rows: Sequence[TrialRow]):
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(row.cells())


def read_csv(path: Path) -> List[TrialRow]:
    """Read rows written by write_csv(); summary rows keep trial == 'mean'."""
    rows = []
    with open(path, newline='') as f:
        for record in csv.DictReader(f):
            summary = record['trial'] == SUMMARY_TRIAL
            rows.append(TrialRow(
                sweep_value=float(record['sweep_value']),
                algorithm=record['algorithm'],
                trial=SUMMARY_TRIAL if summary else int(record['trial']),
                seed='' if summary else int(record['seed']),
                **{c: float(record[c]) for c in METRIC_COLUMNS},
            ))
    return rows


def format_gnuplot(rows: Sequence[TrialRow], metric: str, algorithms: Optional[Sequence[str]] = None) -> str:
    """Whitespace-separated columns for gnuplot: sweep value, then mean and stddev per algorithm.

    Raises:
        ValueError: If metric is not a metric column
    """
    if metric not in METRIC_COLUMNS:
        raise ValueError(f"unknown metric '{metric}' (choose from {', '.join(METRIC_COLUMNS)})")
    stats = summarize(rows)
    if algorithms is None:
        seen: Dict[str, None] = {}
        for row in rows:
            seen.setdefault(row.algorithm, None)
        algorithms = list(seen)
    values = sorted({value for value, _ in stats})

    out = io.StringIO()
    header = ['sweep_value'] + [f"{a}_{suffix}" for a in algorithms for suffix in ('mean', 'std')]
    out.write('# ' + ' '.join(header) + '\n')
    for value in values:
        cells = [format_number(value)]
        for algorithm in algorithms:
            mean, std = stats.get((value, algorithm), {}).get(metric, (math.nan, math.nan))
            cells += [format_number(mean), format_number(std)]
        out.write(' '.join(cells) + '\n')
    return out.getvalue()


# ---------------- Latency ----------------

def measure_latency(algorithm: str, users: List[GroundUser], constraints: DeploymentConstraints,
                    params: ChannelParams, repetitions: int = 10,
                    options: SolverOptions = SolverOptions()) -> LatencyStats:
    """Time repeated solves of one snapshot on the calling thread.

    The first run is a warm-up and is discarded. Fleet-borrowing solvers get
    their k once, before any timed run.

    Raises:
        ValueError: If repetitions < 3
    """
    if repetitions < 3:
        raise ValueError("repetitions must be >= 3")
    k = resolve_fleet_size(algorithm, users, constraints, params, options)

    runs = [solve(algorithm, users, constraints, params, options, k=k) for _ in range(repetitions)]
    samples = tuple(d.solve_time for d in runs[1:])
    median = statistics.median(samples)
    deterministic = all(d.same_solution(runs[0]) for d in runs[1:])

    stats = LatencyStats(
        algorithm=algorithm,
        n_users=len(users),
        repetitions=len(samples),
        median=median,
        p95=percentile(samples, 95),
        samples=samples,
        deterministic=deterministic,
        max_displacement_m=max_displacement(users, median),
    )
    get_logger().info("latency measured", algorithm=algorithm, users=len(users),
                      median_ms=round(median * 1e3, 3), p95_ms=round(stats.p95 * 1e3, 3))
    return stats


def fit_scaling_exponent(ns: Sequence[float], times: Sequence[float]) -> float:
    """Empirical exponent b in time ~ N^b from a log-log least-squares fit."""
    return loglog_slope(ns, times)
