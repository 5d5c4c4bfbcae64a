# cli/runner.py

"""
Experiment Runner

run() executes one ExperimentConfig in its own run directory:

    <output_dir>/<kind>-<hash12>/
        config.json     byte-exact copy of the submitted config
        <table>.csv     result tables (columns in docs/EXPERIMENTS.md)
        summary.json    resolved parameters and headline values
        manifest.json   config hash, versions, timestamps, outputs, checks

Handlers are registered per experiment kind in EXPERIMENTS. Each receives a
RunContext, writes its tables through it and records invariant checks on the
context's monitor.
"""

import csv
import hashlib
import json
import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict

from src.cli.experiments import (
    ConfigValidationError,
    ExperimentConfig,
    ExperimentKind,
    parse_config,
    preflight,
)
from src.cli.persistence import save_meta_measure
from src.core.errors import ErgoLabError, InvariantViolation
from src.core.registry import ExperimentRegistry
from src.core.settings import LabSettings
from src.core.state_manager import RunState, RunStateManager
from src.diagnostics import (
    NON_STATISTICAL,
    NOT_FLAGGED,
    DivergenceKind,
    bifurcation_probe,
    decay_fit,
    divergence_curve,
    estimate_from_table,
    hk_parameter_scan,
    meta_gap_curve,
    oscillation_score,
    triangle_terms,
)
from src.empirics import (
    arc_uniform_target,
    arcsine_reference,
    boundary_measure,
    dirac_target,
    empirical_measure,
    empirical_path,
    meta_empirical,
    uniform_measure,
)
from src.monitoring import InvariantMonitor
from src.phase_space import PhaseSpace, Point, SpaceKind, diameter, sample_reference
from src.systems import (
    BowenSurrogate,
    Logistic,
    OrbitBudget,
    Rotation,
    ShiftOnBlocks,
    SystemSpec,
    ak_map,
    band_occupancy,
    bowen_running_averages,
    build_bump_diffeo,
    commutation_residual,
    covering_residual,
    lift_diffeo,
    orbit,
    rational_residual,
    roundtrip_error,
    total_time,
    verify_sublemma,
)
from src.transport import EmpiricalMeasure, MetaMeasure, coarsen, fmt, lifted_w1, w1

logger = logging.getLogger(__name__)

SUMMARY_SCHEMA_VERSION = 1
CONFIG_NAME = "config.json"
SUMMARY_NAME = "summary.json"
MANIFEST_NAME = "manifest.json"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INVALID = 2
EXIT_INVARIANT = 3

CONTRACTION_TOLERANCE = 1e-12
ORDER_TOLERANCE = 1e-12
RESIDUAL_BOUND = 1e-9
BOWEN_TOLERANCE = 0.02
REFERENCE_RESOLUTION = 4096

EXPERIMENTS = ExperimentRegistry("experiment")


class RunManifest(BaseModel):
    """What a run directory contains and how the run ended"""
    model_config = ConfigDict(frozen=True)

    kind: str
    seed: int
    directory: str
    config_file: str = CONFIG_NAME
    config_hash: str
    artifact_version: str
    summary_schema_version: int = SUMMARY_SCHEMA_VERSION
    started_at: str
    finished_at: str
    status: str
    exit_code: int
    outputs: List[str]
    invariant_checks: List[Dict[str, Any]]
    state_history: List[Dict[str, Any]]
    error: Optional[str] = None

    @property
    def failed_checks(self) -> List[Dict[str, Any]]:
        return [c for c in self.invariant_checks if c['status'] == 'failed']


@dataclass
class RunContext:
    """Everything a handler needs: config, settings, output directory and monitor"""
    config: ExperimentConfig
    settings: LabSettings
    directory: Path
    monitor: InvariantMonitor = field(default_factory=InvariantMonitor)
    summary: Dict[str, Any] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)

    @property
    def workers(self) -> int:
        return self.settings.workers

    @property
    def atom_cap(self) -> int:
        return self.settings.transport.atom_cap

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
        with open(self.directory / name, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            writer.writerows(rows)
        self.outputs.append(name)

    def budget(self, horizon: int) -> Optional[OrbitBudget]:
        """Explicit budget when the config pins precision, else None (smallest sufficient)"""
        if self.config.precision_bits is None:
            return None
        return OrbitBudget(iterations=horizon, precision_bits=self.config.precision_bits)

    def sample(self, spec: SystemSpec) -> List[Optional[Point]]:
        """Reference-measure sample; the block-point orbit has the single start omega"""
        if isinstance(spec.family, ShiftOnBlocks):
            return [None]
        return sample_reference(spec.space, self.config.seed, self.config.samples(self.settings))


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def _x0(config: ExperimentConfig) -> Optional[Point]:
    x0 = config.x0
    if isinstance(x0, list):
        return tuple(float(v) for v in x0)
    if isinstance(x0, (int, float)):
        return float(x0)
    return x0


def _point_header(space: PhaseSpace) -> List[str]:
    if space.kind == SpaceKind.ANNULUS:
        return ['r', 'theta']
    if space.kind == SpaceKind.BINARY_SHIFT:
        return ['word']
    return ['x']


def _point_cells(point: Point) -> List[str]:
    if isinstance(point, tuple):
        return [fmt(point[0]), fmt(point[1])]
    if isinstance(point, str):
        return [point]
    return [fmt(point)]


def _reference_measure(spec: SystemSpec) -> Optional[EmpiricalMeasure]:
    """Known invariant measure to compare e_n against, if any"""
    if isinstance(spec.family, Logistic) and spec.family.lam == 4.0:
        return arcsine_reference(REFERENCE_RESOLUTION)
    if isinstance(spec.family, Rotation) and spec.family.alpha > 0.0:
        return uniform_measure(spec.space, REFERENCE_RESOLUTION)
    return None


# ---------------------------------------------------------------------------
# Handlers


@EXPERIMENTS.decorator(ExperimentKind.ORBIT.value, tables=['orbit.csv'])
def run_orbit(ctx: RunContext) -> None:
    config = ctx.config
    spec = config.system
    budget = ctx.budget(config.n) or OrbitBudget.for_system(spec, config.n)
    points = orbit(spec, _x0(config), budget)
    ctx.write_csv('orbit.csv', ['k'] + _point_header(spec.space),
                  ([k] + _point_cells(p) for k, p in enumerate(points)))
    ctx.monitor.check_true('orbit_length', len(points) == config.n, n=config.n)
    ctx.summary.update(system=spec.label, n=config.n, precision_bits=budget.precision_bits)


@EXPERIMENTS.decorator(ExperimentKind.EMPIRICAL.value, tables=['measure.csv'])
def run_empirical(ctx: RunContext) -> None:
    config = ctx.config
    spec = config.system
    x0 = _x0(config)
    n = config.n
    measure = empirical_measure(spec, x0, n, ctx.budget(n))
    ctx.write_csv('measure.csv', measure.csv_header(), measure.csv_rows())
    ctx.summary.update(system=spec.label, n=n, atoms=measure.size)

    if n >= 2:
        if spec.space.kind == SpaceKind.ANNULUS and n > ctx.atom_cap:
            logger.info(f"Skipping contraction check: {n} annulus atoms exceed the atom cap")
        else:
            path = empirical_path(spec, x0, [n - 1, n], ctx.budget(n))
            gap = w1(path.measure(0), path.measure(1), ctx.atom_cap)
            ctx.monitor.check_at_most('contraction', gap, diameter(spec.space) / n,
                                      tolerance=CONTRACTION_TOLERANCE, n=n - 1)
            ctx.summary['last_step_w1'] = gap

    reference = _reference_measure(spec)
    if reference is not None:
        ctx.summary['w1_to_reference'] = w1(measure, reference, ctx.atom_cap)
        ctx.summary['reference_resolution'] = REFERENCE_RESOLUTION


@EXPERIMENTS.decorator(ExperimentKind.OSCILLATION.value, tables=['oscillation.csv'])
def run_oscillation(ctx: RunContext) -> None:
    config = ctx.config
    settings = ctx.settings
    spec = config.system
    if isinstance(spec.family, BowenSurrogate):
        spec = SystemSpec.bowen(config.bowen_params(settings))
        x0: Optional[Point] = float(config.x0)
        budget: Optional[OrbitBudget] = OrbitBudget(iterations=config.passages)
    else:
        x0 = _x0(config)
        budget = ctx.budget(config.M)

    report = oscillation_score(spec, x0, config.N, config.M, budget=budget,
                               ratio=config.ratio(settings), mesh=config.mesh,
                               threshold=config.threshold(settings))
    ctx.write_csv('oscillation.csv', ['N', 'M', 'n', 'm', 'w1'],
                  ([config.N, config.M, n, m, fmt(v)] for n, m, v in report.pairs))

    tail_scores = [report.restricted(s, config.M) for s in report.schedule]
    ctx.monitor.check_true('score_nonincreasing_in_N',
                           all(b <= a for a, b in zip(tail_scores, tail_scores[1:])))
    ctx.monitor.check_at_most('score_within_diameter', report.score,
                              diameter(spec.space) + report.mesh_error,
                              tolerance=CONTRACTION_TOLERANCE)
    ctx.summary.update(system=spec.label, **report.to_dict())


@EXPERIMENTS.decorator(ExperimentKind.DELTA.value, tables=['delta.csv', 'delta_pairs.csv'])
def run_delta(ctx: RunContext) -> None:
    config = ctx.config
    settings = ctx.settings
    spec_h = config.system
    spec_g = config.perturbed or spec_h
    N_list = config.N_list or [config.N]
    M = config.M
    ratio = config.ratio(settings)
    mesh = config.grid_mesh(settings, spec_h.space)
    sample = ctx.sample(spec_h)
    budget = ctx.budget(M)

    curve = divergence_curve(spec_h, spec_g, N_list, M, sample, budget, config.seed, ratio,
                             mesh, ctx.workers, DivergenceKind.DELTA_E)
    l1 = [estimate_from_table(DivergenceKind.DELTA_L1, curve.table, spec_h, N, M,
                              curve.schedule, config.seed, mesh) for N in N_list]
    estimates = curve.estimates + l1
    ctx.write_csv(
        'delta.csv',
        ['kind', 'N', 'M', 'value', 'interpolation_bound', 'mesh_error', 'sample_size',
         'schedule_length'],
        ([e.kind.value, e.N, e.M, fmt(e.value), fmt(e.interpolation_bound), fmt(e.mesh_error),
          e.sample_size, e.schedule_length] for e in estimates),
    )
    # one row per scheduled (n, m): sample mean and sample max of w1(e_n^h, e_m^g)
    pair_mean = curve.table.mean(axis=0)
    pair_max = curve.table.max(axis=0)
    ctx.write_csv(
        'delta_pairs.csv',
        ['n', 'm', 'mean_w1', 'max_w1'],
        ([n, m, fmt(pair_mean[i, j]), fmt(pair_max[i, j])]
         for i, n in enumerate(curve.schedule) for j, m in enumerate(curve.schedule)),
    )

    ctx.monitor.check_true('delta_e_nonincreasing_in_N', curve.is_nonincreasing(),
                           curve=[[n, v] for n, v in curve.points])
    for e_est, l1_est in zip(curve.estimates, l1):
        ctx.monitor.check_at_most('delta_l1_below_delta_e', l1_est.value, e_est.value,
                                  tolerance=ORDER_TOLERANCE, N=e_est.N)

    ctx.summary.update(
        system=spec_h.label,
        perturbed=spec_g.label,
        sample_size=len(sample),
        schedule_length=len(curve.schedule),
        delta_e=[{'N': e.N, 'value': e.value} for e in curve.estimates],
        delta_l1=[{'N': e.N, 'value': e.value} for e in l1],
    )
    if spec_g == spec_h:
        threshold = config.threshold(settings)
        flagged = all(value > threshold for _, value in curve.points)
        ctx.summary['verdict'] = NON_STATISTICAL if flagged else NOT_FLAGGED
        ctx.summary['d_threshold'] = threshold
    else:
        terms = triangle_terms(spec_h, spec_g, N_list[0], M, sample, budget, ratio, mesh,
                               ctx.workers)
        ctx.monitor.check_at_most('triangle_decomposition', terms['lhs'], terms['rhs'],
                                  tolerance=ORDER_TOLERANCE, N=N_list[0])
        ctx.summary['triangle'] = terms


@EXPERIMENTS.decorator(ExperimentKind.META_GAP.value, tables=['meta_gap.csv'])
def run_meta_gap(ctx: RunContext) -> None:
    config = ctx.config
    spec = config.system
    mesh = config.grid_mesh(ctx.settings, spec.space)
    sample = ctx.sample(spec)
    budget = ctx.budget(config.n_list[-1] + 1)

    records = meta_gap_curve(spec, sample, config.n_list, budget, mesh, ctx.workers, ctx.atom_cap)
    ctx.write_csv('meta_gap.csv', ['n', 'gap', 'bound', 'mesh_error', 'matched_l1'],
                  ([r.n, fmt(r.gap), fmt(r.bound), fmt(r.mesh_error), fmt(r.matched_l1)]
                   for r in records))
    for r in records:
        ctx.monitor.record('lifted_gap_within_bound', r.within_bound, r.gap,
                           r.bound + r.mesh_error, n=r.n)
        ctx.monitor.record('lifted_below_matched_l1', r.ordered, r.gap, r.matched_l1, n=r.n)

    if config.save_meta:
        meta = meta_empirical(spec, sample, config.n_list[-1], budget, ctx.workers)
        names = save_meta_measure(meta, ctx.directory / 'meta')
        ctx.outputs.extend(f"meta/{name}" for name in names)
    ctx.summary.update(system=spec.label, sample_size=len(sample),
                       records=[r.to_dict() for r in records])


@EXPERIMENTS.decorator(ExperimentKind.BIFURCATION_PROBE.value, tables=['probe.csv'])
def run_bifurcation_probe(ctx: RunContext) -> None:
    config = ctx.config
    block = config.bifurcation
    circle = PhaseSpace.circle()
    sample = sample_reference(circle, config.seed, config.samples(ctx.settings))
    mesh = config.grid_mesh(ctx.settings, circle)

    family = [SystemSpec.rotation((1.0 / k) % 1.0) for k in block.ks]
    horizons = [block.horizon(k) for k in block.ks]
    target = arc_uniform_target(sample, block.s, block.resolution)
    distances = bifurcation_probe(family, horizons, target, sample, mesh=mesh,
                                  workers=ctx.workers, atom_cap=ctx.atom_cap)
    ctx.write_csv('probe.csv', ['k', 'n_k', 'distance'],
                  ([k, n, fmt(d)] for k, n, d in zip(block.ks, horizons, distances)))

    ctx.summary.update(s=block.s, sample_size=len(sample), final_distance=distances[-1],
                       mesh_error=mesh or 0.0)
    series = [(float(k), d) for k, d in zip(block.ks, distances) if d > 0.0]
    if len(series) >= 3:
        constant, exponent = decay_fit(series)
        ctx.summary['decay_fit'] = {'C': constant, 'exponent': exponent}


@EXPERIMENTS.decorator(ExperimentKind.BOWEN.value, tables=['bowen.csv'])
def run_bowen(ctx: RunContext) -> None:
    config = ctx.config
    params = config.bowen_params(ctx.settings)
    u0 = float(config.x0)
    records = bowen_running_averages(params, u0, config.passages)
    ctx.write_csv('bowen.csv', ['passage', 'saddle', 'sojourn', 'exit_time', 'average'],
                  ([r.passage, r.saddle.value, fmt(r.sojourn), fmt(r.exit_time), fmt(r.average)]
                   for r in records))

    lo, hi = config.window
    window = [r.average for r in records[lo - 1:hi]]
    simulated_sup, simulated_inf = max(window), min(window)
    elapsed = total_time(params, u0, config.passages)

    ctx.monitor.check_true('time_accounting',
                           elapsed == records[-1].exit_time + params.transit_time,
                           total_time=elapsed)
    ctx.monitor.check_within('running_sup_near_limsup', simulated_sup, params.upper_average,
                             tolerance=BOWEN_TOLERANCE, window=list(config.window))
    ctx.monitor.check_within('running_inf_near_liminf', simulated_inf, params.lower_average,
                             tolerance=BOWEN_TOLERANCE, window=list(config.window))
    ctx.summary.update(
        lam=params.lam,
        sigma=params.sigma,
        non_degenerate=params.non_degenerate,
        limsup_closed_form=params.upper_average,
        liminf_closed_form=params.lower_average,
        simulated_sup=simulated_sup,
        simulated_inf=simulated_inf,
        oscillation_width=simulated_sup - simulated_inf,
        window=list(config.window),
        passages=config.passages,
        total_time=elapsed,
    )


@EXPERIMENTS.decorator(ExperimentKind.ANOSOV_KATOK.value, tables=['anosov_katok.csv'])
def run_anosov_katok(ctx: RunContext) -> None:
    config = ctx.config
    b = config.anosov_katok
    monitor = ctx.monitor

    g_hat = build_bump_diffeo(b.r1, b.r2, b.theta, b.eps, b.sigma_area)
    report = verify_sublemma(g_hat, b.r1, b.r2, b.theta, b.eps, b.sigma_area, b.grid_n)
    g = lift_diffeo(g_hat, b.q)
    residuals = {
        'commutation_residual': commutation_residual(g, b.p, b.q, b.grid_n),
        'covering_residual': covering_residual(g_hat, b.q, b.grid_n),
        'roundtrip_error': roundtrip_error(g),
        'rational_residual': rational_residual(g, b.p, b.q, b.grid_n),
    }
    spec = ak_map(None, g, b.alpha_prime)
    occupancy = band_occupancy(spec, tuple(b.x0), b.iterations, b.theta, b.q)

    monitor.record('sublemma_identity_near_boundary', report.identity_ok,
                   report.identity_displacement, report.identity_margin)
    monitor.record('sublemma_band_area', report.area_ok, report.area_estimate, b.sigma_area,
                   area_error=report.area_error)
    monitor.record('sublemma_squeeze', report.squeeze_ok, report.max_radius, b.eps)
    for name, value in residuals.items():
        monitor.check_at_most(name, value, RESIDUAL_BOUND)

    # lifted distance of e_n(f') to the Dirac mass at the boundary measure
    annulus = spec.space
    target = coarsen(boundary_measure(spec, b.boundary_resolution), b.boundary_mesh)
    sample = sample_reference(annulus, config.seed, config.samples(ctx.settings))
    meta = meta_empirical(spec, sample, b.horizon, workers=ctx.workers)
    coarse = MetaMeasure(tuple(coarsen(m, b.boundary_mesh) for m in meta.atoms), meta.weights)
    boundary_distance = lifted_w1(coarse, dirac_target(target), atom_cap=ctx.atom_cap,
                                  workers=ctx.workers)

    rows = [
        ['identity_displacement', fmt(report.identity_displacement), fmt(0.0)],
        ['band_area', fmt(report.area_estimate), fmt(b.sigma_area)],
        ['max_radius', fmt(report.max_radius), fmt(b.eps)],
    ]
    rows += [[name, fmt(value), fmt(RESIDUAL_BOUND)] for name, value in residuals.items()]
    rows += [['band_occupancy', fmt(occupancy), fmt(b.theta)],
             ['boundary_lifted_distance', fmt(boundary_distance), fmt(diameter(annulus))]]
    ctx.write_csv('anosov_katok.csv', ['quantity', 'value', 'reference'], rows)

    ctx.summary.update(
        sublemma=report.to_dict(),
        **residuals,
        alpha_prime=b.alpha_prime,
        band_occupancy=occupancy,
        band_occupancy_error=abs(occupancy - b.theta),
        boundary_lifted_distance=boundary_distance,
        boundary_mesh=b.boundary_mesh,
        horizon=b.horizon,
        sample_size=len(sample),
    )


@EXPERIMENTS.decorator(ExperimentKind.HK_SCAN.value, tables=['hk_scan.csv'])
def run_hk_scan(ctx: RunContext) -> None:
    config = ctx.config
    settings = ctx.settings
    interval = PhaseSpace.unit_interval()
    sample = sample_reference(interval, config.seed, config.samples(settings))
    mesh = config.grid_mesh(settings, interval)

    rows = hk_parameter_scan(config.lambda_grid, config.N, config.M, sample,
                             ratio=config.ratio(settings), mesh=mesh, workers=ctx.workers)
    ctx.write_csv('hk_scan.csv', ['lam', 'N', 'M', 'delta_e', 'q50', 'q90', 'max_score'],
                  ([fmt(r.lam), config.N, config.M, fmt(r.delta_e), fmt(r.q50), fmt(r.q90),
                    fmt(r.max_score)] for r in rows))
    for r in rows:
        ctx.monitor.check_true('quantiles_ordered', r.q50 <= r.q90 <= r.max_score, lam=r.lam)
    worst = max(rows, key=lambda r: r.delta_e)
    ctx.summary.update(sample_size=len(sample), lambdas=len(rows), max_delta_e=worst.delta_e,
                       max_delta_e_lam=worst.lam, mesh_error=mesh or 0.0)


# ---------------------------------------------------------------------------
# Driver


def _resolved(config: ExperimentConfig, settings: LabSettings) -> Dict[str, Any]:
    if config.system is not None:
        space = config.system.space
    elif config.kind == ExperimentKind.ANOSOV_KATOK:
        space = PhaseSpace.annulus()
    elif config.kind == ExperimentKind.BIFURCATION_PROBE:
        space = PhaseSpace.circle()
    else:
        space = PhaseSpace.unit_interval()
    return {
        'schedule_ratio': config.ratio(settings),
        'sample_size': config.samples(settings),
        'mesh': config.grid_mesh(settings, space),
        'd_threshold': config.threshold(settings),
        'atom_cap': settings.transport.atom_cap,
        'workers': settings.workers,
    }


def _write_summary(ctx: RunContext, config_hash: str) -> None:
    summary = {
        'schema_version': SUMMARY_SCHEMA_VERSION,
        'kind': ctx.config.kind.value,
        'seed': ctx.config.seed,
        'config_hash': config_hash,
        'resolved': _resolved(ctx.config, ctx.settings),
        'results': ctx.summary,
        'invariants': ctx.monitor.summary(),
    }
    with open(ctx.directory / SUMMARY_NAME, 'w') as f:
        json.dump(summary, f, indent=2, default=_json_default)
        f.write('\n')
    ctx.outputs.append(SUMMARY_NAME)


def run(config: ExperimentConfig, config_bytes: Optional[bytes] = None,
        output_root: Optional[Path] = None, settings: Optional[LabSettings] = None) -> RunManifest:
    """
    Execute one experiment and write its run directory.

    Args:
        config: Parsed experiment config
        config_bytes: Exact bytes of the submitted config file (re-serialized if None)
        output_root: Parent of the run directory (config.output_dir if None)
        settings: Lab settings (built-in defaults if None)

    Returns:
        The manifest written to the run directory; exit_code is 3 when an
        invariant check failed and 1 when the computation raised

    Raises:
        ConfigValidationError: the config fails preflight
    """
    settings = settings or LabSettings()
    problems = preflight(config, settings)
    if problems:
        raise ConfigValidationError(problems)

    if config_bytes is None:
        config_bytes = config.model_dump_json(indent=2).encode('utf-8')
    config_hash = hashlib.sha256(config_bytes).hexdigest()
    root = Path(output_root) if output_root is not None else Path(config.output_dir)
    directory = root / f"{config.kind.value}-{config_hash[:12]}"
    if directory.exists():
        logger.warning(f"Run directory {directory} exists, its files will be replaced")
    directory.mkdir(parents=True, exist_ok=True)
    (directory / CONFIG_NAME).write_bytes(config_bytes)

    state = RunStateManager()
    started = _now()
    state.transition_to(RunState.VALIDATED, "config validated")
    ctx = RunContext(config=config, settings=settings, directory=directory)
    ctx.outputs.append(CONFIG_NAME)
    handler = EXPERIMENTS.get(config.kind.value)

    logger.info(f"Starting {config.kind.value} experiment in {directory}")
    state.transition_to(RunState.RUNNING, f"{config.kind.value} experiment")
    error: Optional[str] = None
    exit_code = EXIT_OK
    try:
        handler(ctx)
        state.transition_to(RunState.CHECKING, "handler finished")
        _write_summary(ctx, config_hash)
        ctx.monitor.raise_if_failed()
        state.transition_to(RunState.COMPLETED, "all invariant checks passed")
    except InvariantViolation as e:
        if ctx.monitor.all_passed:
            ctx.monitor.record('runtime_invariant', False, **e.record)
        error = str(e)
        exit_code = EXIT_INVARIANT
        state.transition_to(RunState.FAILED, error)
    except ErgoLabError as e:
        logger.error(f"{config.kind.value} experiment failed: {e}")
        error = f"{type(e).__name__}: {e}"
        exit_code = EXIT_ERROR
        state.transition_to(RunState.FAILED, error)
    except Exception as e:
        logger.exception(f"{config.kind.value} experiment crashed: {e}")
        error = f"{type(e).__name__}: {e}"
        exit_code = EXIT_ERROR
        state.transition_to(RunState.FAILED, error)

    manifest = RunManifest(
        kind=config.kind.value,
        seed=config.seed,
        directory=str(directory),
        config_hash=config_hash,
        artifact_version=settings.artifact_version,
        started_at=started,
        finished_at=_now(),
        status=state.current_state.value,
        exit_code=exit_code,
        outputs=list(ctx.outputs),
        invariant_checks=ctx.monitor.to_records(),
        state_history=state.history_records(),
        error=error,
    )
    with open(directory / MANIFEST_NAME, 'w') as f:
        f.write(manifest.model_dump_json(indent=2))
        f.write('\n')
    summary = ctx.monitor.summary()
    logger.info(
        f"Finished {config.kind.value}: {state.current_state.value}, "
        f"{summary['passed']}/{summary['total']} invariant checks passed"
    )
    return manifest


def execute(config_path: Path, output_root: Optional[Path] = None,
            settings: Optional[LabSettings] = None) -> int:
    """
    ``ergolab run``: read, validate and run a config file.

    Returns:
        Exit status: 0 ok, 1 computation error, 2 invalid config, 3 invariant violated
    """
    settings = settings or LabSettings()
    path = Path(config_path)
    try:
        raw = path.read_bytes()
        data = json.loads(raw)
    except (OSError, ValueError) as e:
        print(f"config: cannot read {path}: {e}", file=sys.stderr)
        return EXIT_INVALID

    try:
        config = parse_config(data, settings)
        manifest = run(config, raw, output_root, settings)
    except ConfigValidationError as e:
        for problem in e.problems:
            print(problem, file=sys.stderr)
        logger.error(f"{path}: {len(e.problems)} validation problem(s)")
        return EXIT_INVALID

    print(manifest.directory)
    if manifest.exit_code == EXIT_INVARIANT:
        for record in manifest.failed_checks:
            print(json.dumps(record, default=_json_default), file=sys.stderr)
    elif manifest.exit_code == EXIT_ERROR:
        print(manifest.error, file=sys.stderr)
    return manifest.exit_code
