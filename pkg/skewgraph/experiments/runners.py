"""Experiment runners: one method per experiment kind, plus the artifact plumbing."""

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from skewgraph import __version__
from skewgraph.config import Settings, get_settings
from skewgraph.exceptions import NotConvergedError, ValidationError
from skewgraph.experiments.plot import PlotSpec, Series, render_svg
from skewgraph.experiments.resolve import build_window, fiber_law, fiber_point, resolve_system
from skewgraph.experiments.schema import ExperimentConfig, ExperimentKind, config_digest
from skewgraph.models.base import format_fraction
from skewgraph.models.measure import EmpiricalMeasure
from skewgraph.models.sets import FiberSet
from skewgraph.models.symbols import Cylinder, SymbolWindow
from skewgraph.models.zoo import ZooEntry
from skewgraph.services import AttractorService, MeasureService, SplittingService, ZooService
from skewgraph.services.symbolic import make_rng
from skewgraph.storage import DATA_FILE, PLOT_FILE, RESULTS_FILE, ArtifactStore
from skewgraph.storage.measure_io import format_measure, read_measure

logger = logging.getLogger(__name__)

MEASURE_FILE = "measure.txt"
SET_HEADER = ("component", "coordinate", "low", "high")

DEFAULT_SPINE_DEPTH = 200
DEFAULT_TARGET_TOL = 1e-9
DEFAULT_DECAY_DEPTHS = tuple(range(10, 201, 10))
DEFAULT_CURVE_DEPTHS = tuple(range(0, 61, 5))
DEFAULT_SYNC_DEPTHS = (0, 1, 2, 5, 10, 20, 50, 100)
DEFAULT_MILNOR_DEPTHS = (0, 10, 20, 50, 100)
DEFAULT_MILNOR_TOL = 1e-6


@dataclass
class ExperimentOutput:
    """What an experiment produced, before it is written to disk."""

    summary: dict[str, Any]
    header: tuple[str, ...]
    rows: list[tuple]
    plot: PlotSpec | None = None
    extra_files: dict[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class RunRecord:
    directory: Path
    summary: dict[str, Any]
    config_sha256: str


def _set_rows(u: FiberSet, label: str | None = None) -> list[tuple]:
    prefix = (label,) if label is not None else ()
    return [
        prefix + (row["component"], row["coordinate"], row["low"], row["high"])
        for row in u.to_rows()
    ]


def _floats(point) -> list[float]:
    return [float(c) for c in point]


def _word_text(word) -> str:
    return "".join(str(s) for s in word)


@dataclass
class _Context:
    config: ExperimentConfig
    entry: ZooEntry
    seed: int

    @property
    def params(self):
        return self.config.parameters

    @property
    def system(self):
        return self.entry.system


class ExperimentRunner:
    """Runs one configured experiment and writes results.json, data.csv and plot.svg."""

    def __init__(self, settings: Settings | None = None):
        """
        Initialize the runner.

        Args:
            settings: Runtime settings. If None, uses the process-wide settings.
        """
        self.settings = settings or get_settings()
        self.zoo = ZooService(self.settings)
        self.attractor = AttractorService(self.settings)
        self.splitting = SplittingService(self.settings)
        self.measures = MeasureService(self.settings, self.attractor)
        self._dispatch: dict[ExperimentKind, Callable[[_Context], ExperimentOutput]] = {
            ExperimentKind.CODE: self._code,
            ExperimentKind.SPINE: self._spine,
            ExperimentKind.TARGET: self._target,
            ExperimentKind.SPLIT_CHECK: self._split_check,
            ExperimentKind.DECAY: self._decay,
            ExperimentKind.WASSERSTEIN_CURVE: self._wasserstein_curve,
            ExperimentKind.SYNC_CURVE: self._sync_curve,
            ExperimentKind.OMEGA: self._omega,
            ExperimentKind.GRAPH_SAMPLE: self._graph_sample,
            ExperimentKind.MILNOR: self._milnor,
            ExperimentKind.DISINTEGRATION: self._disintegration,
            ExperimentKind.PERTURBATION: self._perturbation,
        }

    def execute(self, config: ExperimentConfig) -> ExperimentOutput:
        """
        Run the experiment without touching the filesystem (except for an input measure).

        Raises:
            ValidationError: If the seed is missing or the system cannot be built
        """
        if config.seed is None:
            raise ValidationError("seed required", "seed")
        entry = resolve_system(config, self.zoo)
        context = _Context(config, entry, config.seed)
        logger.info(
            f"Running {config.experiment.value} on {entry.name} (k={entry.system.k}, "
            f"m={entry.system.fiber_dimension}, seed={config.seed})"
        )
        return self._dispatch[config.experiment](context)

    def run(self, config: ExperimentConfig, output_dir: Path | str | None = None) -> RunRecord:
        """
        Run the experiment and commit its artifacts to the output directory.

        Args:
            config: Resolved configuration
            output_dir: Overrides `config.output` (default "results")

        Returns:
            RunRecord with the directory, the summary and the config hash

        Raises:
            ValidationError: If the configuration cannot be run
            ConvergenceError: If an iteration exhausts its budget
            BudgetExceededError: If a transport problem is too large
            ArtifactError: If the outputs cannot be written
        """
        directory = Path(output_dir or config.output or "results")
        output = self.execute(config)
        digest = config_digest(config)
        results = {
            "experiment": config.experiment.value,
            "summary": output.summary,
            "provenance": {
                "config_sha256": digest,
                "seed": config.seed,
                "version": __version__,
                "config": config.model_dump(mode="json"),
            },
        }
        with ArtifactStore(directory).transaction() as staged:
            staged.write_json(RESULTS_FILE, results)
            staged.write_csv(DATA_FILE, output.header, output.rows)
            if output.plot is not None:
                staged.write_text(PLOT_FILE, render_svg(output.plot))
            for name, text in output.extra_files.items():
                staged.write_text(name, text)
        return RunRecord(directory, output.summary, digest)

    # Helpers

    def _window(self, ctx: _Context, forward: int = 1) -> SymbolWindow:
        word_length = ctx.params.word_length or self.settings.default_word_length
        return build_window(ctx.params.theta, ctx.system, ctx.seed, forward, word_length)

    def _initial_measure(self, ctx: _Context) -> EmpiricalMeasure:
        params = ctx.params
        if params.measure_path is not None:
            measure = read_measure(params.measure_path)
            if measure.alphabet_size != ctx.system.k:
                raise ValidationError(
                    f"Measure alphabet {measure.alphabet_size} does not match {ctx.system.k}",
                    "parameters.measure_path",
                )
            return measure
        return self.measures.sample_with_marginal(
            ctx.system,
            params.n_atoms,
            fiber_law(params, ctx.system.fiber_dimension),
            params.word_length,
            ctx.seed,
        )

    def _target_base(self, ctx: _Context) -> FiberSet:
        result = self.attractor.target_set(
            ctx.system,
            max_iter=ctx.params.max_iter,
            tol=ctx.params.tol if ctx.params.tol is not None else DEFAULT_TARGET_TOL,
            start=ctx.entry.trapping_region,
        )
        return result.set

    # Topology

    def _code(self, ctx: _Context) -> ExperimentOutput:
        window = self._window(ctx)
        result = self.attractor.code(
            window,
            ctx.system,
            max_depth=ctx.params.max_depth,
            singleton_tol=ctx.params.tol,
            exact=ctx.params.exact,
        )
        if not result.converged:
            raise NotConvergedError("code", result.depth_used, result.final_diameter)
        summary = {
            "status": result.status.value,
            "point": _floats(result.point),
            "depth_used": result.depth_used,
            "final_diameter": result.final_diameter,
            "window": window,
        }
        if ctx.params.exact:
            summary["point_exact"] = [format_fraction(c) for c in result.point]
        rows = [
            (s, lo, hi, result.point[s]) for s, (lo, hi) in enumerate(result.enclosure)
        ]
        return ExperimentOutput(summary, ("coordinate", "low", "high", "point"), rows)

    def _spine(self, ctx: _Context) -> ExperimentOutput:
        window = self._window(ctx)
        depth = ctx.params.depth or DEFAULT_SPINE_DEPTH
        base = ctx.system.full_space() if ctx.params.base == "full" else self._target_base(ctx)
        spine = self.attractor.spine(window, ctx.system, base, depth)
        summary = {
            "depth": depth,
            "base": ctx.params.base,
            "n_components": len(spine),
            "diameter": spine.diameter(),
            "components": spine,
            "window": window,
        }
        return ExperimentOutput(summary, SET_HEADER, _set_rows(spine))

    def _target(self, ctx: _Context) -> ExperimentOutput:
        result = self.attractor.target_set(
            ctx.system,
            max_iter=ctx.params.max_iter,
            tol=ctx.params.tol if ctx.params.tol is not None else 0.0,
            start=ctx.entry.trapping_region,
        )
        summary: dict[str, Any] = {
            "iterations": result.iterations,
            "converged": result.converged,
            "last_step": result.last_step,
            "n_components": len(result.set),
        }
        if ctx.entry.intervals is not None:
            summary["distance_to_intervals"] = float(
                result.set.hausdorff_distance(ctx.entry.intervals)
            )
        return ExperimentOutput(summary, SET_HEADER, _set_rows(result.set))

    def _split_check(self, ctx: _Context) -> ExperimentOutput:
        words = ctx.params.words or ctx.entry.splitting_words
        if words is None or len(words) != 2:
            raise ValidationError("split-check needs exactly two words", "parameters.words")
        certificate = self.splitting.check_split(ctx.system, words[0], words[1])
        summary: dict[str, Any] = {
            "word_a": certificate.word_a,
            "word_b": certificate.word_b,
            "gaps": certificate.gaps,
            "monotone_certified": certificate.monotone_certified,
        }
        if ctx.params.n_words > 0:
            summary["sweep_words"] = ctx.params.n_words
            summary["sweep_overlaps"] = self.splitting.separation_sweep(
                ctx.system, certificate, ctx.params.n_words, ctx.params.max_length, ctx.seed
            )
        rows = _set_rows(certificate.image_a, _word_text(certificate.word_a)) + _set_rows(
            certificate.image_b, _word_text(certificate.word_b)
        )
        return ExperimentOutput(summary, ("word",) + SET_HEADER, rows)

    # Monte-Carlo rates

    def _decay(self, ctx: _Context) -> ExperimentOutput:
        depths = ctx.params.depths or list(DEFAULT_DECAY_DEPTHS)
        estimate = self.splitting.decay_estimate(ctx.system, depths, ctx.params.n_samples, ctx.seed)
        rows = list(zip(estimate.depths, estimate.mean_diams, estimate.std_errors))
        plot = PlotSpec(
            title=f"Backward image diameters ({ctx.entry.name})",
            xlabel="depth n",
            ylabel="mean diameter",
            series=(Series("mean", estimate.depths, estimate.mean_diams, estimate.std_errors),),
            log_y=True,
        )
        summary = {
            "fitted_lambda": estimate.fitted_lambda,
            "fit_r2": estimate.fit_r2,
            "n_samples": estimate.n_samples,
        }
        return ExperimentOutput(summary, ("depth", "mean_diameter", "std_error"), rows, plot)

    def _wasserstein_curve(self, ctx: _Context) -> ExperimentOutput:
        mu0 = self._initial_measure(ctx)
        depths = ctx.params.depths or list(DEFAULT_CURVE_DEPTHS)
        curve = self.measures.convergence_curve(
            ctx.system,
            mu0,
            depths,
            ctx.seed,
            base_depth=ctx.params.base_depth,
            tol=ctx.params.tol,
            word_length=ctx.params.word_length,
            reference=ctx.params.reference,
        )
        summary: dict[str, Any] = {"n_atoms": len(mu0), "reference": ctx.params.reference}
        positive = [r for r in curve if r.distance > 0]
        if len(positive) >= 2:
            fit = self.measures.fit_log_decay(
                [r.n for r in positive], [r.distance for r in positive]
            )
            summary.update({"fit_slope": fit.slope, "fit_rate": fit.rate, "fit_r2": fit.r2})
        rows = [(r.n, r.distance, r.error_bound) for r in curve]
        plot = PlotSpec(
            title=f"Wasserstein distance to the attracting measure ({ctx.entry.name})",
            xlabel="n",
            ylabel="d_W",
            series=(
                Series(
                    "d_W",
                    [r.n for r in curve],
                    [r.distance for r in curve],
                    [r.error_bound for r in curve],
                ),
            ),
            log_y=True,
        )
        return ExperimentOutput(
            summary,
            ("n", "distance", "error_bound"),
            rows,
            plot,
            {MEASURE_FILE: format_measure(mu0)},
        )

    def _sync_curve(self, ctx: _Context) -> ExperimentOutput:
        depths = ctx.params.depths or list(DEFAULT_SYNC_DEPTHS)
        window = self._window(ctx, forward=max(depths) + 1)
        x = fiber_point(ctx.params, ctx.system.fiber_dimension)
        rows = self.measures.pointwise_sync_curve(ctx.system, window, x, depths, ctx.params.tol)
        coded = [r for r in rows if r.converged]
        plot = PlotSpec(
            title=f"Distance to the graph along the orbit ({ctx.entry.name})",
            xlabel="n",
            ylabel="d(F^n(θ,x), graph)",
            series=(Series("distance", [r.n for r in coded], [r.distance for r in coded]),),
            log_y=True,
        )
        summary = {
            "window": window,
            "x": x,
            "n_not_coded": len(rows) - len(coded),
            "final_distance": coded[-1].distance if coded else None,
        }
        data = [(r.n, r.distance, r.converged) for r in rows]
        return ExperimentOutput(summary, ("n", "distance", "converged"), data, plot)

    def _omega(self, ctx: _Context) -> ExperimentOutput:
        params = ctx.params
        total = params.burn_in + params.n_iter
        window = self._window(ctx, forward=total)
        x = fiber_point(params, ctx.system.fiber_dimension)
        cloud = self.attractor.omega_limit_sample(
            (window, x), ctx.system, params.burn_in, params.n_iter
        )
        graph = self.attractor.graph_sample(
            ctx.system, params.n_points, params.word_length, ctx.seed, params.tol, params.max_depth
        )
        distances = self.attractor.graph_distances(graph, cloud, params.cylinder_depth)
        depth = params.cylinder_depth
        summary = {
            "n_iter": params.n_iter,
            "burn_in": params.burn_in,
            "cylinder_depth": params.cylinder_depth,
            "graph_points": len(graph.pairs),
            "coverage": max(distances),
        }
        rows = [
            (i, _word_text(w.symbols(-depth, depth + 1)), *_floats(p), d)
            for i, ((w, p), d) in enumerate(zip(graph.pairs, distances))
        ]
        coords = tuple(f"x{s + 1}" for s in range(ctx.system.fiber_dimension))
        return ExperimentOutput(summary, ("index", "word") + coords + ("distance",), rows)

    def _graph_sample(self, ctx: _Context) -> ExperimentOutput:
        params = ctx.params
        graph = self.attractor.graph_sample(
            ctx.system, params.n_points, params.word_length, ctx.seed, params.tol, params.max_depth
        )
        summary = {
            "n_drawn": graph.n_drawn,
            "n_not_converged": graph.n_not_converged,
            "convergence_fraction": graph.convergence_fraction,
            "max_residual": graph.max_residual,
        }
        depth = params.cylinder_depth
        rows = [
            (i, _word_text(w.backward_word(depth)), *_floats(p), r)
            for i, ((w, p), r) in enumerate(zip(graph.pairs, graph.residuals))
        ]
        coords = tuple(f"x{s + 1}" for s in range(ctx.system.fiber_dimension))
        return ExperimentOutput(summary, ("index", "past") + coords + ("residual",), rows)

    # Measures

    def _milnor(self, ctx: _Context) -> ExperimentOutput:
        mu = self._initial_measure(ctx)
        depths = ctx.params.depths or list(DEFAULT_MILNOR_DEPTHS)
        tol = ctx.params.tol if ctx.params.tol is not None else DEFAULT_MILNOR_TOL
        rows = [
            (n, self.measures.realm_of_attraction_fraction(mu, ctx.system, n, tol)) for n in depths
        ]
        plot = PlotSpec(
            title=f"Mass within {tol:g} of the graph ({ctx.entry.name})",
            xlabel="n",
            ylabel="fraction",
            series=(Series("fraction", [n for n, _ in rows], [f for _, f in rows]),),
        )
        summary = {"tol": tol, "n_atoms": len(mu), "final_fraction": rows[-1][1]}
        return ExperimentOutput(summary, ("n", "fraction"), rows, plot)

    def _random_cylinders(self, ctx: _Context, mu: EmpiricalMeasure) -> list[tuple[Cylinder, int]]:
        """Cylinders read off pushed atoms, so each one carries mass."""
        rng = make_rng(ctx.seed, "disintegration-cylinders")
        params = ctx.params
        cylinders = []
        for _ in range(params.n_checks):
            n = int(rng.integers(1, params.max_n + 1))
            length = int(rng.integers(1, params.cylinder_depth + 1))
            start = int(rng.integers(-length, 1))
            atom = mu.atoms[int(rng.integers(len(mu)))]
            word = atom.window.shift(n).symbols(start, start + length)
            cylinders.append((Cylinder(start, word), n))
        return cylinders

    def _disintegration(self, ctx: _Context) -> ExperimentOutput:
        mu = self._initial_measure(ctx)
        if ctx.params.cylinders is not None:
            checks = [(Cylinder(c.start, tuple(c.word)), c.n) for c in ctx.params.cylinders]
        else:
            checks = self._random_cylinders(ctx, mu)
        rows = []
        for i, (cylinder, n) in enumerate(checks):
            check = self.measures.disintegration_pushforward_check(mu, ctx.system, n, cylinder)
            rows.append(
                (
                    i,
                    n,
                    cylinder.start_index,
                    _word_text(cylinder.word),
                    len(check.forward),
                    len(check.backward),
                    check.equal,
                )
            )
        summary = {
            "checks": len(rows),
            "passed": sum(1 for r in rows if r[-1]),
            "all_equal": all(r[-1] for r in rows),
        }
        header = ("check", "n", "start", "word", "forward_atoms", "backward_atoms", "equal")
        files = {MEASURE_FILE: format_measure(mu)}
        return ExperimentOutput(summary, header, rows, extra_files=files)

    # Robustness

    def _spine_components(self, entry: ZooEntry, depth: int) -> int | None:
        if entry.adversarial_tail is None:
            return None
        window = SymbolWindow.from_past(entry.system.k, (), entry.adversarial_tail)
        base = entry.trapping_region or entry.system.full_space()
        return len(self.attractor.spine(window, entry.system, base, depth))

    def _perturbation(self, ctx: _Context) -> ExperimentOutput:
        depth = ctx.params.depth or DEFAULT_SPINE_DEPTH
        reports = self.zoo.perturbation_reports(ctx.entry, ctx.params.delta, ctx.params.seeds)
        baseline = self._spine_components(ctx.entry, depth)
        rows = []
        for report in reports:
            components = (
                self._spine_components(report.entry, depth) if report.entry is not None else None
            )
            rows.append(
                (
                    report.seed,
                    report.valid,
                    len(report.findings),
                    report.cover_gap,
                    components,
                    "; ".join(report.findings),
                )
            )
        summary = {
            "delta": reports[0].delta if reports else ctx.params.delta,
            "valid": sum(1 for r in reports if r.valid),
            "reports": len(reports),
            "baseline_spine_components": baseline,
            "spine_components_unchanged": all(r[4] == baseline for r in rows),
        }
        header = ("seed", "valid", "n_findings", "cover_gap", "spine_components", "findings")
        return ExperimentOutput(summary, header, rows)
