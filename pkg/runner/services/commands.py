"""Subcommand drivers: each turns an experiment config into output files."""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from runner.infrastructure.output_writer import (
    build_metadata,
    write_csv,
    write_edge_list,
    write_instance_dump,
    write_json,
)
from runner.services.sweep import failures, run_sweep
from shared.config.config import config
from shared.domain.consts import (
    ChannelName,
    CommandName,
    OracleTask,
    OutputFiles,
    PriorPreset,
    TransitionOrder,
)
from shared.domain.models import DiscretePrior, Instance, QuadratureRule, SweepPoint
from shared.domain.payloads import ExperimentConfig, RunMetadata, Thresholds
from shared.factories import create_channel
from shared.factories.prior_factory import prior_builder, prior_from_spec
from simulation.services.amp import amp_run
from simulation.services.community import (
    as_instance,
    generate_community_graph,
    mu_for_delta,
)
from simulation.services.instances import generate_coupled_instance, generate_instance
from simulation.services.metrics import overlap
from simulation.services.oracle import finite_size_mmse_curve, mc_mmse, nishimori_check
from simulation.services.spectral import spectral_estimate
from theory.services.channels import community_detection_prior, effective_noise
from theory.services.coupling import (
    coupled_se_run,
    coupling_conditions,
    interior_blocks,
    shift_diagnostic,
    threshold_saturation_experiment,
    triangle_coupling,
)
from theory.services.potential import (
    fixed_point_residual,
    matrix_mmse,
    matrix_mmse_limits,
    mutual_information,
    potential_curve,
    stationary_points,
)
from theory.services.prior import gauss_hermite, mmse
from theory.services.state_evolution import se_run
from theory.services.thresholds import (
    compute_thresholds,
    find_first_order_boundary,
    good_branch,
    vector_mmse,
)

logger = logging.getLogger(__name__)

# Density grid of the small-rho probe (community prior)
SMALL_RHO_GRID = tuple(float(rho) for rho in np.geomspace(1e-2, 1e-4, 7))
BOUNDARY_TOL = 1e-5


class CommandResult(NamedTuple):
    files: List[Path]
    errors: List[dict]

    @property
    def ok(self) -> bool:
        return not self.errors


@dataclass
class CommandContext:
    """Everything a driver needs besides the config itself."""
    command: CommandName
    experiment: ExperimentConfig
    out_dir: Path
    workers: Optional[int] = None
    quad: Optional[QuadratureRule] = None

    @property
    def metadata(self) -> RunMetadata:
        return build_metadata(self.command.value, self.experiment)

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def prior(self, rho: Optional[float] = None) -> DiscretePrior:
        return prior_from_spec(self.experiment.prior, rho)

    def sweep(self, task: Callable[[object], object], parameters: Sequence[object],
              label: str) -> List[SweepPoint]:
        return run_sweep(task, parameters, self.workers, label=f"{self.command.value} {label}")

    def run_seed(self, index: int) -> int:
        """Master seed of the index-th independent run."""
        return self.experiment.seed + index


def create_context(command: CommandName, experiment: ExperimentConfig, out_dir: Path,
                   workers: Optional[int] = None) -> CommandContext:
    quad = gauss_hermite(experiment.quad_order) if experiment.quad_order else None
    return CommandContext(command=command, experiment=experiment, out_dir=Path(out_dir),
                          workers=workers, quad=quad)


def _labelled(points: Sequence[SweepPoint], label: str) -> List[dict]:
    return [{"stage": label, **error} for error in failures(points)]


def _thresholds_record(thresholds: Thresholds) -> dict:
    return thresholds.model_dump()


def cmd_potential(ctx: CommandContext) -> CommandResult:
    """i_RS(E; delta) on an E grid for every delta, with the stationary points marked."""
    experiment = ctx.experiment
    prior = ctx.prior()

    def task(delta: float):
        curve = potential_curve(prior, delta, experiment.curve_points, ctx.quad)
        return curve, stationary_points(prior, delta, ctx.quad)

    points = ctx.sweep(task, experiment.deltas(), "curves")
    rows = []
    for point in points:
        if not point.ok:
            continue
        curve, stationary = point.result
        rows.extend((curve.delta, e, value, None, None) for e, value in zip(curve.energies, curve.values))
        rows.extend((stationary.delta, s.energy, s.potential, s.kind, s.branch) for s in stationary.points)
        logger.info(f"delta={curve.delta:.6g}: {stationary.count} stationary point(s) at {stationary.energies}")
    rows.sort(key=lambda row: (row[0], row[1]))

    path = write_csv(
        ctx.path(OutputFiles.POTENTIAL),
        ["delta", "energy", "i_rs", "stationary", "branch"],
        rows,
        ctx.metadata,
    )
    return CommandResult([path], _labelled(points, "curves"))


def cmd_thresholds(ctx: CommandContext) -> CommandResult:
    """Thresholds of the configured prior, plus min i_RS and the MMSEs on the delta grid."""
    experiment = ctx.experiment
    prior = ctx.prior()
    thresholds = compute_thresholds(prior, ctx.quad)
    v = prior.second_moment

    def task(delta: float) -> dict:
        info = mutual_information(prior, delta, ctx.quad)
        estimate = vector_mmse(prior, delta, thresholds, ctx.quad)
        return {
            "delta": delta,
            "mutual_information": info.value,
            "minimizers": list(info.minimizers),
            "matrix_mmse": v**2 - (v - info.argmin) ** 2,
            "vector_mmse": estimate.value,
            "validity": estimate.validity,
        }

    deltas = list(experiment.delta_grid) or ([experiment.delta] if experiment.delta else [])
    points = ctx.sweep(task, deltas, "delta grid") if deltas else []

    payload: Dict[str, object] = {
        "prior": prior.to_record(),
        "mean": prior.mean,
        "second_moment": v,
        "thresholds": _thresholds_record(thresholds),
        "points": [p.result for p in points if p.ok],
    }
    if thresholds.transition_order == TransitionOrder.FIRST and math.isfinite(thresholds.delta_rs):
        below, above = matrix_mmse_limits(prior, thresholds.delta_rs, ctx.quad)
        payload["matrix_mmse_at_delta_rs"] = {"left": below, "right": above}

    path = write_json(ctx.path(OutputFiles.THRESHOLDS), payload, ctx.metadata)
    return CommandResult([path], _labelled(points, "delta grid"))


def _phase_row(point: SweepPoint) -> tuple:
    if not point.ok:
        return (point.parameter, None, None, None, None, None, point.status, point.error)
    t: Thresholds = point.result
    return (point.parameter, t.delta_amp, t.delta_rs, t.delta_spectral, t.delta_spinodal,
            t.transition_order, point.status, None)


def _first_order_boundaries(build: Callable[[float], DiscretePrior], points: Sequence[SweepPoint],
                            quad: Optional[QuadratureRule]) -> List[float]:
    """Bisect every grid interval across which the transition stops (or starts) being first order."""
    done = sorted((p for p in points if p.ok), key=lambda p: p.parameter)
    boundaries = []
    for left, right in zip(done, done[1:]):
        left_first = left.result.transition_order == TransitionOrder.FIRST
        right_first = right.result.transition_order == TransitionOrder.FIRST
        if left_first == right_first:
            continue
        try:
            boundary = find_first_order_boundary(build, left.parameter, right.parameter, BOUNDARY_TOL, quad)
        except ValueError as e:
            logger.warning(f"Boundary search on [{left.parameter}, {right.parameter}] failed: {e}")
            continue
        logger.info(f"First-order boundary at rho={boundary:.6g}")
        boundaries.append(boundary)
    return boundaries


def _small_rho_probe(ctx: CommandContext) -> CommandResult:
    """Delta_Opt(rho) * 4 rho |log rho| for the community prior down to rho = 1e-4."""
    build = prior_builder(PriorPreset.COMMUNITY)
    points = ctx.sweep(lambda rho: compute_thresholds(build(rho), ctx.quad).delta_opt,
                       SMALL_RHO_GRID, "small-rho probe")
    rows = [
        (p.parameter, p.result, p.result * 4.0 * p.parameter * abs(math.log(p.parameter)))
        for p in points
        if p.ok
    ]
    path = write_csv(
        ctx.path(OutputFiles.SMALL_RHO),
        ["rho", "delta_opt", "scaled_delta_opt"],
        rows,
        ctx.metadata,
    )
    return CommandResult([path], _labelled(points, "small-rho probe"))


def cmd_phase_diagram(ctx: CommandContext) -> CommandResult:
    """Thresholds across the density grid, with first-order boundaries located by bisection."""
    experiment = ctx.experiment
    preset = experiment.prior.preset
    if preset == PriorPreset.CUSTOM:
        raise ValueError("phase-diagram needs a one-parameter prior preset, got custom")
    build = prior_builder(preset)

    points = ctx.sweep(lambda rho: compute_thresholds(build(rho), ctx.quad), experiment.rhos(), "rho grid")
    files = [write_csv(
        ctx.path(OutputFiles.PHASE_DIAGRAM),
        ["rho", "delta_amp", "delta_rs", "delta_spectral", "delta_spinodal",
         "transition_order", "status", "error"],
        [_phase_row(p) for p in points],
        ctx.metadata,
    )]
    errors = _labelled(points, "rho grid")

    summary = {
        "preset": preset.value,
        "points": len(points),
        "failed": len(errors),
        "first_order_boundaries": _first_order_boundaries(build, points, ctx.quad),
    }
    if experiment.small_rho_probe:
        probe = _small_rho_probe(ctx)
        files.extend(probe.files)
        errors.extend(probe.errors)
    files.append(write_json(ctx.path(OutputFiles.PHASE_SUMMARY), summary, ctx.metadata))
    return CommandResult(files, errors)


def cmd_se(ctx: CommandContext) -> CommandResult:
    """Scalar state evolution from E = v for every delta."""
    experiment = ctx.experiment
    prior = ctx.prior()

    def task(delta: float):
        trajectory = se_run(prior, delta, experiment.tol, experiment.max_iter, ctx.quad)
        residual = fixed_point_residual(prior, trajectory.fixed_point, delta, ctx.quad)
        return trajectory, residual

    points = ctx.sweep(task, experiment.deltas(), "deltas")
    rows, runs = [], []
    for point in points:
        if not point.ok:
            continue
        trajectory, residual = point.result
        rows.extend((trajectory.delta, t, e) for t, e in enumerate(trajectory.iterates))
        runs.append({
            "delta": trajectory.delta,
            "fixed_point": trajectory.fixed_point,
            "iterations": int(trajectory.iterates.size - 1),
            "status": trajectory.status,
            "residual": residual,
        })

    files = [
        write_csv(ctx.path(OutputFiles.SE_TRAJECTORY), ["delta", "iteration", "energy"], rows, ctx.metadata),
        write_json(ctx.path(OutputFiles.SE_SUMMARY), {"runs": runs}, ctx.metadata),
    ]
    return CommandResult(files, _labelled(points, "deltas"))


def _ring_length(experiment: ExperimentConfig) -> int:
    return experiment.ring_length or config.BLOCKS_PER_WINDOW * experiment.window


def cmd_coupled_se(ctx: CommandContext) -> CommandResult:
    """Coupled state evolution profiles and, on request, the threshold-saturation scan."""
    experiment = ctx.experiment
    window = experiment.window
    if window < 1:
        raise ValueError(f"coupled-se needs window >= 1, got {window}")
    length = _ring_length(experiment)
    prior = ctx.prior()
    coupling = triangle_coupling(length, window)
    thresholds = compute_thresholds(prior, ctx.quad)

    def task(delta: float) -> dict:
        run = coupled_se_run(prior, length, window, delta, experiment.tol, experiment.max_iter,
                             ctx.quad, coupling)
        worst = float(np.max(interior_blocks(run.profile), initial=0.0))
        record = {"delta": delta, "iterations": run.iterations, "status": run.status,
                  "max_interior": worst, "shift": None}
        e_good = good_branch(prior, delta, thresholds, ctx.quad)
        if e_good is not None and worst > e_good + config.SATURATION_TOL:
            diagnostic = shift_diagnostic(prior, run.profile, window, delta, e_good, ctx.quad)
            record["shift"] = {
                "mu_infinity": diagnostic.mu_infinity,
                "mu_max": diagnostic.mu_max,
                "potential_difference": diagnostic.potential_difference,
                "predicted_difference": diagnostic.predicted_difference,
            }
        return run, record

    points = ctx.sweep(task, experiment.deltas(), "deltas")
    rows, runs = [], []
    for point in points:
        if not point.ok:
            continue
        run, record = point.result
        seed = run.profile.seed_mask
        rows.extend((record["delta"], mu, e, bool(seed[mu])) for mu, e in enumerate(run.profile.values))
        runs.append(record)

    files = [write_csv(ctx.path(OutputFiles.COUPLED_PROFILE), ["delta", "block", "energy", "seed"],
                       rows, ctx.metadata, extra={"window": window, "length": length})]
    summary: Dict[str, object] = {
        "window": window,
        "length": length,
        "coupling_conditions": coupling_conditions(coupling),
        "thresholds": _thresholds_record(thresholds),
        "runs": runs,
    }

    if experiment.saturation:
        result = threshold_saturation_experiment(
            prior, window, length, experiment.deltas(), thresholds,
            experiment.tol, experiment.max_iter, quad=ctx.quad,
        )
        files.append(write_csv(
            ctx.path(OutputFiles.SATURATION),
            ["delta", "max_interior", "e_good", "saturated", "status"],
            [(p.delta, p.max_interior, p.e_good, p.saturated, p.status) for p in result.points],
            ctx.metadata,
            extra={"window": window, "length": length},
        ))
        summary["saturation"] = {
            "delta_amp_coupled": result.delta_amp_coupled,
            "bracketed": result.bracketed,
            "ratio_to_delta_rs": result.delta_amp_coupled / thresholds.delta_rs,
        }
    files.append(write_json(ctx.path(OutputFiles.COUPLED_SUMMARY), summary, ctx.metadata))
    return CommandResult(files, _labelled(points, "deltas"))


def _make_instance(ctx: CommandContext, prior: DiscretePrior, delta: float, seed: int) -> Instance:
    experiment = ctx.experiment
    if experiment.window > 0:
        return generate_coupled_instance(prior, experiment.n, _ring_length(experiment),
                                         experiment.window, delta, seed)
    return generate_instance(prior, experiment.n, delta, seed)


def _se_prediction(ctx: CommandContext, prior: DiscretePrior, delta: float) -> np.ndarray:
    """Per-iteration MSE predicted by (coupled) state evolution, indexed by SE time."""
    experiment = ctx.experiment
    if experiment.window > 0:
        run = coupled_se_run(prior, _ring_length(experiment), experiment.window, delta,
                             experiment.tol, experiment.max_iter, ctx.quad, record_history=True)
        return run.history.mean(axis=1)
    return np.asarray(se_run(prior, delta, experiment.tol, experiment.max_iter, ctx.quad).iterates)


def _seed_grid(experiment: ExperimentConfig) -> List[tuple]:
    return [(d, delta, k) for d, delta in enumerate(experiment.deltas()) for k in range(experiment.num_seeds)]


def cmd_amp(ctx: CommandContext) -> CommandResult:
    """AMP on fresh instances for every (delta, seed), traced against state evolution."""
    experiment = ctx.experiment
    prior = ctx.prior()
    files: List[Path] = []

    def task(params: tuple) -> dict:
        d, delta, k = params
        seed = ctx.run_seed(k)
        instance = _make_instance(ctx, prior, delta, seed)
        if experiment.dump_instances:
            files.append(write_instance_dump(ctx.path(f"instance_{d}_{k}.npz"), instance))
        state = amp_run(instance, prior, experiment.max_iter, experiment.tol, experiment.damping,
                        experiment.noise_mode, seed, ctx.quad)
        return {
            "delta": delta,
            "seed": seed,
            "mse_trace": list(state.mse_trace),
            "iterations": state.iterations,
            "status": state.status,
            "overlap": overlap(state.estimate, instance.signal),
        }

    points = ctx.sweep(task, _seed_grid(experiment), "runs")
    predictions = {delta: _se_prediction(ctx, prior, delta) for delta in experiment.deltas()}

    rows, runs = [], []
    for point in points:
        if not point.ok:
            continue
        run = point.result
        se = predictions[run["delta"]]
        for t, value in enumerate(run.pop("mse_trace")):
            rows.append((run["delta"], run["seed"], t, value, se[min(t + 1, se.size - 1)]))
        runs.append(run)

    files.append(write_csv(ctx.path(OutputFiles.AMP_TRACE),
                           ["delta", "seed", "iteration", "mse", "se_prediction"], rows, ctx.metadata))
    files.append(write_json(ctx.path(OutputFiles.AMP_SUMMARY), {"runs": runs}, ctx.metadata))
    return CommandResult(sorted(files), _labelled(points, "runs"))


def cmd_spectral(ctx: CommandContext) -> CommandResult:
    """Top-eigenvector overlaps for every (delta, seed)."""
    experiment = ctx.experiment
    prior = ctx.prior()

    def task(params: tuple):
        _, delta, k = params
        seed = ctx.run_seed(k)
        instance = generate_instance(prior, experiment.n, delta, seed)
        return seed, spectral_estimate(instance, prior, seed, experiment.tol, experiment.max_iter)

    points = ctx.sweep(task, _seed_grid(experiment), "runs")
    rows = []
    overlaps: Dict[float, List[float]] = {}
    for point in points:
        if not point.ok:
            continue
        _, delta, _ = point.parameter
        seed, result = point.result
        rows.append((delta, seed, result.overlap, result.eigenvalue, result.iterations, result.status))
        overlaps.setdefault(delta, []).append(result.overlap)

    medians = {repr(delta): float(np.median(values)) for delta, values in sorted(overlaps.items())}
    logger.info(f"Median spectral overlaps: {medians} (delta_spectral={prior.second_moment**2:.6g})")
    path = write_csv(ctx.path(OutputFiles.SPECTRAL),
                     ["delta", "seed", "overlap", "eigenvalue", "iterations", "status"],
                     rows, ctx.metadata, extra={"delta_spectral": prior.second_moment**2})
    return CommandResult([path], _labelled(points, "runs"))


def cmd_community(ctx: CommandContext) -> CommandResult:
    """Plant a two-group graph, then run AMP and the spectral baseline on its equivalent matrix."""
    experiment = ctx.experiment
    spec = experiment.prior
    if spec.preset != PriorPreset.COMMUNITY:
        raise ValueError(f"community needs the community prior preset, got {spec.preset.value}")
    mu = experiment.mu if experiment.mu is not None else mu_for_delta(experiment.p, experiment.deltas()[0])

    graph = generate_community_graph(spec.rho, experiment.p, mu, experiment.n, experiment.seed)
    files = [write_edge_list(ctx.path(OutputFiles.COMMUNITY_EDGES), graph.adjacency, ctx.metadata)]

    channel = create_channel(ChannelName.BERNOULLI_EDGE, p=experiment.p, mu=mu)
    noise = effective_noise(channel, seed=experiment.seed)
    prior = community_detection_prior(spec.rho)
    thresholds = compute_thresholds(prior, ctx.quad)
    instance = as_instance(graph)
    if experiment.dump_instances:
        files.append(write_instance_dump(ctx.path("community_instance.npz"), instance))

    state = amp_run(instance, prior, experiment.max_iter, experiment.tol, experiment.damping,
                    experiment.noise_mode, experiment.seed, ctx.quad)
    spectral = spectral_estimate(instance, prior, experiment.seed, experiment.tol, experiment.max_iter)
    summary = {
        "rho": spec.rho,
        "p": experiment.p,
        "mu": mu,
        "n": graph.n,
        "edges": int(np.triu(graph.adjacency, 1).sum()),
        "delta_eff": graph.delta_eff,
        "channel_effective_noise": {"value": noise.value, "stderr": noise.stderr, "method": noise.method},
        "thresholds": _thresholds_record(thresholds),
        "amp": {"overlap": overlap(state.estimate, graph.signal), "iterations": state.iterations,
                "status": state.status},
        "spectral": {"overlap": spectral.overlap, "eigenvalue": spectral.eigenvalue,
                     "status": spectral.status},
    }
    logger.info(
        f"Community n={graph.n} delta_eff={graph.delta_eff:.6g}: "
        f"AMP overlap {summary['amp']['overlap']:.4f}, spectral overlap {spectral.overlap:.4f}"
    )
    files.append(write_json(ctx.path(OutputFiles.COMMUNITY_SUMMARY), summary, ctx.metadata))
    return CommandResult(files, [])


def _within(lhs: float, rhs: float, stderr: float) -> bool:
    return abs(lhs - rhs) <= 3.0 * stderr


def cmd_oracle(ctx: CommandContext) -> CommandResult:
    """Small-system ground truth: Nishimori identity, finite-n MMSE curve or Monte Carlo mmse."""
    experiment = ctx.experiment
    prior = ctx.prior()
    path = ctx.path(OutputFiles.ORACLE)
    task_name = experiment.oracle_task

    if task_name == OracleTask.NISHIMORI:
        points = ctx.sweep(
            lambda delta: nishimori_check(prior, experiment.n, delta, experiment.num_instances, experiment.seed),
            experiment.deltas(), "nishimori",
        )
        rows = [
            (p.parameter, p.result.lhs, p.result.rhs, p.result.stderr,
             _within(p.result.lhs, p.result.rhs, p.result.stderr))
            for p in points if p.ok
        ]
        header = ["delta", "lhs", "rhs", "stderr", "within_3_stderr"]
        errors = _labelled(points, "nishimori")
    elif task_name == OracleTask.MMSE_CURVE:
        curve = finite_size_mmse_curve(prior, experiment.n, experiment.deltas(),
                                       experiment.num_instances, experiment.seed)
        rows = [
            (c.delta, c.matrix_mmse, c.matrix_stderr, c.vector_mmse, c.vector_stderr,
             matrix_mmse(prior, c.delta, ctx.quad))
            for c in curve
        ]
        header = ["delta", "matrix_mmse", "matrix_stderr", "vector_mmse", "vector_stderr",
                  "asymptotic_matrix_mmse"]
        errors = []
    else:
        grid = list(experiment.snr_grid)
        if not grid:
            raise ValueError("oracle mc_mmse needs a non-empty snr_grid")
        points = ctx.sweep(
            lambda item: mc_mmse(prior, item[1], experiment.samples, ctx.run_seed(item[0])),
            list(enumerate(grid)), "mc_mmse",
        )
        rows = []
        for p in points:
            if not p.ok:
                continue
            snr = p.parameter[1]
            exact = float(mmse(prior, snr, ctx.quad))
            rows.append((snr, exact, p.result.estimate, p.result.stderr,
                         _within(exact, p.result.estimate, p.result.stderr)))
        header = ["snr", "quadrature", "estimate", "stderr", "within_3_stderr"]
        errors = _labelled(points, "mc_mmse")

    written = write_csv(path, header, rows, ctx.metadata,
                        extra={"task": task_name, "n": experiment.n})
    return CommandResult([written], errors)


COMMANDS: Dict[CommandName, Callable[[CommandContext], CommandResult]] = {
    CommandName.POTENTIAL: cmd_potential,
    CommandName.THRESHOLDS: cmd_thresholds,
    CommandName.PHASE_DIAGRAM: cmd_phase_diagram,
    CommandName.SE: cmd_se,
    CommandName.COUPLED_SE: cmd_coupled_se,
    CommandName.AMP: cmd_amp,
    CommandName.SPECTRAL: cmd_spectral,
    CommandName.COMMUNITY: cmd_community,
    CommandName.ORACLE: cmd_oracle,
}
