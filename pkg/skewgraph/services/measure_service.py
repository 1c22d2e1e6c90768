"""Measures with Markov marginal: pushforwards, the attracting measure and Wasserstein distances."""

import itertools
import logging
from collections.abc import Sequence
from fractions import Fraction

import numpy as np
import ot

from skewgraph.config import Settings, get_settings
from skewgraph.exceptions import (
    BudgetExceededError,
    DiscardFractionTooHighError,
    EmptyCylinderError,
    SkewGraphError,
    ValidationError,
)
from skewgraph.models.base import to_fraction
from skewgraph.models.measure import Atom, EmpiricalMeasure, FiberLaw, FiberLawKind
from skewgraph.models.results import (
    ConcentrationResult,
    ConvergenceRow,
    DisintegrationCheck,
    SyncRow,
    TransportPlan,
)
from skewgraph.models.sets import as_point
from skewgraph.models.symbols import Cylinder, SymbolWindow
from skewgraph.models.system import SkewSystem
from skewgraph.services import fiber
from skewgraph.services.attractor_service import AttractorService
from skewgraph.services.engine import FloatEngine, box_arrays, right_aligned_words
from skewgraph.services.parallel import parallel_map
from skewgraph.services.splitting_service import fit_log_decay
from skewgraph.services.symbolic import make_rng, sample_windows

logger = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 8
OT_MAX_ITER = 1_000_000


def _symbol_matrix(windows: Sequence[SymbolWindow], base_depth: int) -> np.ndarray:
    """Symbols at indices 0, -1, 1, -2, 2, ..., ordered by |i|."""
    order = [0] + [i for n in range(1, base_depth + 1) for i in (-n, n)]
    raw = np.array([w.symbols(-base_depth, base_depth + 1) for w in windows], dtype=np.int64)
    return raw[:, [i + base_depth for i in order]]


def base_distance_matrix(
    left: Sequence[SymbolWindow], right: Sequence[SymbolWindow], base_depth: int
) -> np.ndarray:
    """
    d0 between every pair of windows, decided on |i| ≤ base_depth.

    Pairs that agree on the whole range get 0; their true distance is at most
    2^{-(base_depth+1)}.
    """
    a = _symbol_matrix(left, base_depth)
    b = _symbol_matrix(right, base_depth)
    weights = [1.0] + [2.0**-n for n in range(1, base_depth + 1) for _ in (0, 1)]
    distance = np.zeros((len(left), len(right)))
    undecided = np.ones_like(distance, dtype=bool)
    for col, weight in enumerate(weights):
        differ = a[:, None, col] != b[None, :, col]
        distance[undecided & differ] = weight
        undecided &= ~differ
        if not undecided.any():
            break
    return distance


def fiber_distance_matrix(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """d1 (sum metric) between every pair of fiber points."""
    return np.abs(left[:, None, :] - right[None, :, :]).sum(axis=2)


def _clipped(point) -> tuple[float, ...]:
    """Float engine midpoints can overshoot [0,1] by rounding."""
    return tuple(min(1.0, max(0.0, float(c))) for c in point)


def truncation_bound(base_depth: int) -> float:
    return 2.0 ** -(base_depth + 1)


class MeasureService:
    """Operations on empirical measures over Σ_k × [0,1]^m."""

    def __init__(self, settings: Settings | None = None, attractor: AttractorService | None = None):
        """
        Initialize the measure service.

        Args:
            settings: Runtime settings. If None, uses the process-wide settings.
            attractor: Service used for coding. If None, one is built from settings.
        """
        self.settings = settings or get_settings()
        self.attractor = attractor or AttractorService(self.settings)

    # Sampling

    def sample_with_marginal(
        self,
        sys: SkewSystem,
        n_atoms: int,
        fiber_law: FiberLaw,
        word_length: int | None = None,
        seed: int = 0,
    ) -> EmpiricalMeasure:
        """
        Equal-weight atoms with stationary Markov base windows and fiber points drawn from
        `fiber_law`.
        """
        if n_atoms < 1:
            raise ValidationError("n_atoms must be at least 1", "n_atoms")
        word_length = word_length or self.settings.default_word_length
        m = sys.fiber_dimension
        windows = sample_windows(sys.markov, n_atoms, word_length, seed, stream="marginal")
        if fiber_law.kind == FiberLawKind.DIRAC:
            point = as_point(list(fiber_law.point), m)
            points = [point] * n_atoms
        elif fiber_law.kind == FiberLawKind.GRID:
            g = fiber_law.grid_size
            cells = list(itertools.product(range(g), repeat=m))
            points = [
                tuple(Fraction(2 * c + 1, 2 * g) for c in cells[i % len(cells)])
                for i in range(n_atoms)
            ]
        else:
            draws = make_rng(seed, "fiber-uniform").random((n_atoms, m))
            points = [tuple(Fraction(float(x)) for x in row) for row in draws]
        return EmpiricalMeasure.uniform(windows, points)

    def attracting_measure_sample(
        self,
        sys: SkewSystem,
        n_atoms: int,
        word_length: int | None = None,
        tol: float | None = None,
        seed: int = 0,
        stream: str = "attracting",
    ) -> EmpiricalMeasure:
        """
        Sample ρ̂_*P: code stationary windows and keep the converged atoms (θ, ρ(θ)).

        Raises:
            DiscardFractionTooHighError: If too many windows fail to code
        """
        if n_atoms < 1:
            raise ValidationError("n_atoms must be at least 1", "n_atoms")
        word_length = word_length or self.settings.default_word_length
        windows = sample_windows(sys.markov, n_atoms, word_length, seed, stream=stream)
        codings = self.attractor.code_batch(windows, sys, singleton_tol=tol)
        kept = [(w, c.point) for w, c in zip(windows, codings) if c.converged]
        discarded = 1.0 - len(kept) / n_atoms
        limit = self.settings.discard_fraction_limit
        logger.info(f"Attracting sample of {sys.name}: discarded {discarded:.2%} of {n_atoms}")
        if discarded > limit or not kept:
            raise DiscardFractionTooHighError(discarded, limit)
        return EmpiricalMeasure.renormalized(
            [w for w, _ in kept],
            [_clipped(p) for _, p in kept],
            [1] * len(kept),
            discarded_fraction=discarded,
        )

    # Dynamics

    @staticmethod
    def _push_atom(sys: SkewSystem, atom: Atom, n: int) -> Atom:
        point = atom.point
        for symbol in atom.window.forward_word(n):
            point = sys.fiber_map(symbol).apply_point(point)
        return Atom(atom.window.shift(n), point, atom.weight)

    def pushforward(self, mu: EmpiricalMeasure, sys: SkewSystem, n: int) -> EmpiricalMeasure:
        """F^n_* μ atom by atom: (θ, x) ↦ (σ^n θ, f_{θ_{n-1}} ∘ ... ∘ f_{θ_0}(x)), exactly."""
        if n < 0:
            raise ValidationError("n must be nonnegative", "n")
        if n == 0:
            return mu
        return EmpiricalMeasure(
            tuple(self._push_atom(sys, a, n) for a in mu.atoms), mu.discarded_fraction
        )

    def disintegration_pushforward_check(
        self, mu: EmpiricalMeasure, sys: SkewSystem, n: int, cylinder: Cylinder
    ) -> DisintegrationCheck:
        """
        Fiber samples of F^n_* μ above a cylinder, built two ways.

        The forward sample pushes atoms step by step and keeps those landing in the
        cylinder. The backward sample selects atoms of μ in σ^{-n}(cylinder) and applies
        the composed map of the backward word of their image base point.

        Raises:
            EmptyCylinderError: If no atom lies above the cylinder
        """
        pushed = self.pushforward(mu, sys, n)
        forward = tuple(a.point for a in pushed.atoms if cylinder.contains(a.window))
        source = cylinder.preimage(n)
        backward = []
        for atom in mu.atoms:
            if not source.contains(atom.window):
                continue
            word = atom.window.shift(n).backward_word(n)
            backward.append(fiber.compose(word, sys).apply_point(atom.point))
        if not forward or not backward:
            raise EmptyCylinderError(cylinder)
        return DisintegrationCheck(forward, tuple(backward))

    # Transport

    def _cost_matrix(
        self, mu: EmpiricalMeasure, nu: EmpiricalMeasure, base_depth: int
    ) -> np.ndarray:
        return base_distance_matrix(mu.windows(), nu.windows(), base_depth) + fiber_distance_matrix(
            mu.points_array(), nu.points_array()
        )

    def _check_budget(self, mu: EmpiricalMeasure, nu: EmpiricalMeasure) -> None:
        requested = len(mu) + len(nu)
        budget = self.settings.ot_atom_budget
        if requested > budget:
            raise BudgetExceededError("Transport atom", requested, budget)
        if mu.dimension != nu.dimension:
            raise ValidationError("Measures live on fibers of different dimension", "nu")

    def transport_plan(
        self, mu: EmpiricalMeasure, nu: EmpiricalMeasure, base_depth: int | None = None
    ) -> TransportPlan:
        """Optimal coupling under d2 = d0 + d1, solved exactly by network simplex."""
        base_depth = base_depth if base_depth is not None else self.settings.default_base_depth
        self._check_budget(mu, nu)
        cost = self._cost_matrix(mu, nu, base_depth)
        a, b = mu.weights_array(), nu.weights_array()
        coupling = ot.emd(a / a.sum(), b / b.sum(), cost, numItermax=OT_MAX_ITER)
        return TransportPlan(
            coupling=coupling,
            cost=float(np.sum(coupling * cost)),
            error_bound=truncation_bound(base_depth),
        )

    def wasserstein_d2(
        self, mu: EmpiricalMeasure, nu: EmpiricalMeasure, base_depth: int | None = None
    ) -> float:
        """
        Wasserstein-1 distance under d2 = d0 + d1.

        d0 is decided on |i| ≤ base_depth; the truncation adds at most 2^{-(base_depth+1)}.

        Raises:
            BudgetExceededError: If the combined atom count exceeds the solver budget
        """
        base_depth = base_depth if base_depth is not None else self.settings.default_base_depth
        self._check_budget(mu, nu)
        cost = self._cost_matrix(mu, nu, base_depth)
        a, b = mu.weights_array(), nu.weights_array()
        return float(ot.emd2(a / a.sum(), b / b.sum(), cost, numItermax=OT_MAX_ITER))

    def brute_force_wasserstein(
        self, mu: EmpiricalMeasure, nu: EmpiricalMeasure, base_depth: int | None = None
    ) -> float:
        """Minimum over permutation couplings of two equal-weight measures of equal size."""
        base_depth = base_depth if base_depth is not None else self.settings.default_base_depth
        n = len(mu)
        if n != len(nu) or n > BRUTE_FORCE_LIMIT:
            raise ValidationError(
                f"Brute force needs equal sizes of at most {BRUTE_FORCE_LIMIT} atoms", "nu"
            )
        if len({a.weight for a in mu.atoms + nu.atoms}) != 1:
            raise ValidationError("Brute force needs equal weights", "nu")
        cost = self._cost_matrix(mu, nu, base_depth)
        return min(
            sum(cost[i, j] for i, j in enumerate(perm)) / n
            for perm in itertools.permutations(range(n))
        )

    def convergence_curve(
        self,
        sys: SkewSystem,
        mu0: EmpiricalMeasure,
        depths: Sequence[int],
        seed: int,
        base_depth: int | None = None,
        tol: float | None = None,
        word_length: int | None = None,
        reference: str = "fresh",
    ) -> list[ConvergenceRow]:
        """
        d_W(F^n_* μ0, ρ̂_* P) per depth.

        With reference="fresh" every depth is compared against its own independent sample
        of the attracting measure, and the error bound is the distance between two further
        independent samples plus the truncation bound. With reference="paired" the
        comparison measure codes the pushed base points themselves, which removes the base
        sampling noise; its error bound is the coding tolerance plus truncation.
        """
        if reference not in ("fresh", "paired"):
            raise ValidationError("reference must be 'fresh' or 'paired'", "reference")
        base_depth = base_depth if base_depth is not None else self.settings.default_base_depth
        tol = tol if tol is not None else self.settings.singleton_tol
        n_atoms = len(mu0)
        truncation = truncation_bound(base_depth)

        if reference == "fresh":
            floor = self.wasserstein_d2(
                self.attracting_measure_sample(sys, n_atoms, word_length, tol, seed, "noise-a"),
                self.attracting_measure_sample(sys, n_atoms, word_length, tol, seed, "noise-b"),
                base_depth,
            )
            bound = floor + truncation
        else:
            bound = 2 * tol + truncation

        def row(n: int) -> ConvergenceRow:
            pushed = self.pushforward(mu0, sys, n)
            if reference == "fresh":
                target = self.attracting_measure_sample(
                    sys, n_atoms, word_length, tol, seed, f"reference-{n}"
                )
            else:
                target = self._graph_measure(sys, pushed, tol)
            distance = self.wasserstein_d2(pushed, target, base_depth)
            logger.debug(f"Convergence curve n={n}: {distance:.4g}")
            return ConvergenceRow(int(n), distance, bound)

        rows = parallel_map(row, [int(n) for n in depths], self.settings.worker_count())
        logger.info(f"Convergence curve for {sys.name} over {len(rows)} depths")
        return rows

    def _graph_measure(
        self, sys: SkewSystem, mu: EmpiricalMeasure, tol: float
    ) -> EmpiricalMeasure:
        """Atoms (θ, ρ(θ)) over the base points of μ, keeping μ's weights."""
        codings = self.attractor.code_batch(mu.windows(), sys, singleton_tol=tol)
        kept = [(a, c) for a, c in zip(mu.atoms, codings) if c.converged]
        if not kept:
            raise DiscardFractionTooHighError(1.0, self.settings.discard_fraction_limit)
        return EmpiricalMeasure.renormalized(
            [a.window for a, _ in kept],
            [_clipped(c.point) for _, c in kept],
            [a.weight for a, _ in kept],
        )

    # Pointwise behaviour

    @staticmethod
    def _orbit_float(sys: SkewSystem, theta: SymbolWindow, x, n: int) -> np.ndarray:
        point = np.array([[float(c) for c in as_point(x, sys.fiber_dimension)]])
        engine = FloatEngine(sys)
        words = np.array([theta.forward_word(n)], dtype=np.int64).reshape(1, n)
        lo, _ = engine.run(words, point, np.zeros_like(point))
        return lo[0]

    def pointwise_sync_curve(
        self,
        sys: SkewSystem,
        theta: SymbolWindow,
        x,
        depths: Sequence[int],
        tol: float | None = None,
    ) -> list[SyncRow]:
        """d2(F^n(θ, x), ρ̂(σ^n θ)) per depth; rows whose base does not code carry None."""
        tol = tol if tol is not None else self.settings.singleton_tol
        depths = [int(n) for n in depths]
        shifted = [theta.shift(n) for n in depths]
        codings = self.attractor.code_batch(shifted, sys, singleton_tol=tol)
        rows = []
        for n, coding in zip(depths, codings):
            if not coding.converged:
                rows.append(SyncRow(n, None, False))
                continue
            orbit = self._orbit_float(sys, theta, x, n)
            distance = float(np.abs(orbit - np.asarray(coding.point, dtype=float)).sum())
            rows.append(SyncRow(n, distance, True))
        return rows

    def realm_of_attraction_fraction(
        self, mu: EmpiricalMeasure, sys: SkewSystem, n: int, tol: float
    ) -> float:
        """
        μ-mass of atoms whose n-th iterate lies within tol of the graph above σ^n θ.

        Atoms whose shifted base does not code count as outside.
        """
        if n < 0:
            raise ValidationError("n must be nonnegative", "n")
        windows = [a.window.shift(n) for a in mu.atoms]
        codings = self.attractor.code_batch(windows, sys, singleton_tol=min(tol / 2, 1e-9))
        engine = FloatEngine(sys)
        points = mu.points_array()
        if n > 0:
            words = np.array([a.window.forward_word(n) for a in mu.atoms], dtype=np.int64)
            points, _ = engine.run(words, points, np.zeros_like(points))
        inside = 0.0
        for atom, coding, point in zip(mu.atoms, codings, points):
            if coding.converged and np.abs(point - np.asarray(coding.point)).sum() <= tol:
                inside += float(atom.weight)
        return inside

    def lemma_concentration(
        self,
        theta: SymbolWindow,
        sys: SkewSystem,
        fiber_samples: Sequence,
        depth: int,
    ) -> ConcentrationResult:
        """
        Push arbitrary fiber points through f_{θ_{-1}} ∘ ... ∘ f_{θ_{-depth}} and compare their
        spread with the backward image of M at the same depth.
        """
        if depth < 1:
            raise ValidationError("depth must be positive", "depth")
        if len(fiber_samples) == 0:
            raise SkewGraphError("No fiber samples to push")
        m = sys.fiber_dimension
        samples = np.array(
            [[float(c) for c in as_point(x, m)] for x in fiber_samples], dtype=float
        )
        engine = FloatEngine(sys)
        words = right_aligned_words([theta] * len(samples), [depth] * len(samples))
        images, _ = engine.run(words, samples, np.zeros_like(samples))
        box_lo, box_width = engine.run(words[:1], *box_arrays(sys.full_space(), 1))
        center = box_lo[0] + box_width[0] / 2
        coding = self.attractor.code(theta, sys, singleton_tol=self.settings.singleton_tol)
        spread = float(images.std(axis=0).sum())
        deviation = float(np.abs(images - center).sum(axis=1).max())
        return ConcentrationResult(
            spread=spread,
            max_deviation=deviation,
            final_diameter=float(box_width[0].sum()),
            depth=depth,
            coding=coding,
        )

    @staticmethod
    def fit_log_decay(depths: Sequence[int], values: Sequence[float]):
        """Log-linear fit (slope, rate, r²) of a decaying series."""
        return fit_log_decay(depths, values)


def measure_from_points(
    windows: Sequence[SymbolWindow], points: Sequence, weights: Sequence | None = None
) -> EmpiricalMeasure:
    """Convenience constructor accepting floats or literals."""
    if weights is None:
        return EmpiricalMeasure.uniform(windows, [tuple(to_fraction(c) for c in p) for p in points])
    return EmpiricalMeasure.renormalized(windows, points, weights)
