"""Attractor service: Barnsley-Hutchinson iteration, coding map, spines and graph sampling."""

import logging
from collections import defaultdict

import numpy as np

from skewgraph.config import Settings, get_settings
from skewgraph.exceptions import SkewGraphError, ValidationError
from skewgraph.models.results import (
    CodingResult,
    CodingStatus,
    GraphSample,
    OmegaCloud,
    TargetSetResult,
)
from skewgraph.models.sets import BoxUnion, FiberSet, IntervalUnion, as_point
from skewgraph.models.symbols import SymbolWindow
from skewgraph.models.system import SkewSystem
from skewgraph.services import fiber
from skewgraph.services.engine import CHUNK_SIZE, INITIAL_DEPTH, FloatEngine, code_windows
from skewgraph.services.parallel import chunked, parallel_map
from skewgraph.services.symbolic import sample_windows

logger = logging.getLogger(__name__)


class AttractorValidator:
    """Validates arguments of attractor operations."""

    @staticmethod
    def validate_depth(depth: int, name: str = "depth") -> None:
        """
        Validate an iteration depth.

        Raises:
            ValidationError: If depth < 1
        """
        if not isinstance(depth, (int, np.integer)) or depth < 1:
            raise ValidationError(f"{name} must be a positive integer", name)

    @staticmethod
    def validate_tol(tol: float, name: str = "tol") -> None:
        if tol is None or tol < 0:
            raise ValidationError(f"{name} must be nonnegative", name)

    @staticmethod
    def validate_set(sys: SkewSystem, u: FiberSet) -> None:
        if u.dimension != sys.fiber_dimension:
            raise ValidationError(
                f"Set of dimension {u.dimension} does not match fiber dimension "
                f"{sys.fiber_dimension}",
                "u",
            )


def _union_all(sets: list[FiberSet], dimension: int) -> FiberSet:
    if all(isinstance(s, IntervalUnion) for s in sets):
        return IntervalUnion(tuple(i for s in sets for i in s.intervals))
    return BoxUnion(tuple(b for s in sets for b in s.boxes), dimension)


def _d1(a, b) -> float:
    return float(np.sum(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))))


class AttractorService:
    """Topological operations on a skew product: target sets, coding and spines."""

    def __init__(self, settings: Settings | None = None):
        """
        Initialize the attractor service.

        Args:
            settings: Runtime settings. If None, uses the process-wide settings.
        """
        self.settings = settings or get_settings()
        self.validator = AttractorValidator()

    # Barnsley-Hutchinson operator

    def bh_step(self, sys: SkewSystem, u: FiberSet) -> FiberSet:
        """B_F(u) = f_1(u) ∪ ... ∪ f_k(u), normalized to disjoint components."""
        self.validator.validate_set(sys, u)
        return _union_all([fiber.image(f, u) for f in sys.fiber_maps], sys.fiber_dimension)

    def target_set(
        self,
        sys: SkewSystem,
        max_iter: int | None = None,
        tol: float = 0.0,
        start: FiberSet | None = None,
    ) -> TargetSetResult:
        """
        Iterate B_F from a forward-invariant start set until successive iterates are close.

        The iterates are nested, so every iterate contains the closure of the target set.
        In general the limit can be strictly larger; zoo systems supply a trapping region as
        `start` where iterating from M would not approach it.

        Args:
            sys: The skew product
            max_iter: Iteration budget (default from settings)
            tol: Hausdorff tolerance between successive iterates
            start: Start set with B_F(start) ⊆ start (default M)

        Returns:
            TargetSetResult with the last iterate and a converged flag

        Raises:
            ValidationError: If the start set is not forward invariant
        """
        max_iter = max_iter if max_iter is not None else self.settings.target_max_iter
        self.validator.validate_depth(max_iter, "max_iter")
        self.validator.validate_tol(tol)
        current = start if start is not None else sys.full_space()
        self.validator.validate_set(sys, current)
        nxt = self.bh_step(sys, current)
        if not current.contains(nxt):
            raise ValidationError("Start set is not forward invariant under B_F", "start")

        step = current.hausdorff_distance(nxt)
        for n in range(1, max_iter + 1):
            if step <= tol:
                logger.info(f"Target set of {sys.name} converged after {n} iterations")
                return TargetSetResult(nxt, n, float(step), True)
            if n == max_iter:
                break
            current, nxt = nxt, self.bh_step(sys, nxt)
            step = current.hausdorff_distance(nxt)
            logger.debug(f"B_F iteration {n + 1}: {len(nxt)} components, step {float(step):.3g}")
        logger.info(f"Target set of {sys.name} not converged after {max_iter} iterations")
        return TargetSetResult(nxt, max_iter, float(step), False)

    # Coding map

    def code(
        self,
        theta: SymbolWindow,
        sys: SkewSystem,
        max_depth: int | None = None,
        singleton_tol: float | None = None,
        exact: bool = False,
        start: FiberSet | None = None,
    ) -> CodingResult:
        """
        Approximate ρ(θ) by the backward images f_{θ_{-1}} ∘ ... ∘ f_{θ_{-n}}(M).

        The depth is the least n whose image has diameter ≤ singleton_tol; the point is the
        midpoint of the image of `start` (default M) at that depth.

        Args:
            theta: Base point
            sys: The skew product
            max_depth: Depth budget (default from settings)
            singleton_tol: Diameter counted as a point (default from settings)
            exact: Use rational endpoint propagation instead of the float engine
            start: Optional set whose image gives the reported point

        Returns:
            CodingResult
        """
        max_depth = max_depth if max_depth is not None else self.settings.max_depth
        tol = singleton_tol if singleton_tol is not None else self.settings.singleton_tol
        self.validator.validate_depth(max_depth, "max_depth")
        self.validator.validate_tol(tol, "singleton_tol")
        if theta.alphabet_size != sys.k:
            raise ValidationError(
                f"Window alphabet {theta.alphabet_size} does not match {sys.k} fiber maps",
                "theta",
            )
        if exact:
            return self._code_exact(theta, sys, max_depth, tol, start)
        return self.code_batch([theta], sys, max_depth, tol, start=start)[0]

    def code_batch(
        self,
        windows: list[SymbolWindow],
        sys: SkewSystem,
        max_depth: int | None = None,
        singleton_tol: float | None = None,
        start: FiberSet | None = None,
    ) -> list[CodingResult]:
        """Code many windows with the vectorized float engine."""
        max_depth = max_depth if max_depth is not None else self.settings.max_depth
        tol = singleton_tol if singleton_tol is not None else self.settings.singleton_tol
        engine = FloatEngine(sys)

        def run(chunk):
            return code_windows(engine, chunk, max_depth, tol, start)

        results: list[CodingResult] = []
        chunks = chunked(windows, CHUNK_SIZE)
        for batch in parallel_map(run, chunks, self.settings.worker_count()):
            for i in range(len(batch.depth)):
                lo, width = batch.low[i], batch.width[i]
                hi = lo + width
                converged = bool(batch.converged[i])
                results.append(
                    CodingResult(
                        status=CodingStatus.CONVERGED if converged else CodingStatus.NOT_CONVERGED,
                        point=tuple(float(x) for x in lo + width / 2) if converged else None,
                        depth_used=int(batch.depth[i]),
                        final_diameter=float(width.sum()),
                        enclosure=tuple((float(a), float(b)) for a, b in zip(lo, hi)),
                    )
                )
        return results

    def _backward_image(
        self, theta: SymbolWindow, sys: SkewSystem, depth: int, base: FiberSet
    ) -> FiberSet:
        return fiber.image_along(theta.backward_word(depth), sys, base)

    def _code_exact(
        self,
        theta: SymbolWindow,
        sys: SkewSystem,
        max_depth: int,
        tol: float,
        start: FiberSet | None,
    ) -> CodingResult:
        full = sys.full_space()
        failed = 0
        depth = min(INITIAL_DEPTH, max_depth)
        while True:
            u = self._backward_image(theta, sys, depth, full)
            if u.diameter() <= tol:
                break
            failed = depth
            if depth >= max_depth:
                return self._coding_result(u, max_depth, converged=False)
            depth = min(2 * depth, max_depth)
        while depth - failed > 1:
            mid = (depth + failed) // 2
            if self._backward_image(theta, sys, mid, full).diameter() <= tol:
                depth = mid
            else:
                failed = mid
        u = self._backward_image(theta, sys, depth, start if start is not None else full)
        return self._coding_result(u, depth, converged=True)

    @staticmethod
    def _coding_result(u: FiberSet, depth: int, converged: bool) -> CodingResult:
        hull = u.enclosing()
        if isinstance(u, IntervalUnion):
            hull = (hull,)
        return CodingResult(
            status=CodingStatus.CONVERGED if converged else CodingStatus.NOT_CONVERGED,
            point=u.midpoint() if converged else None,
            depth_used=depth,
            final_diameter=float(u.diameter()),
            enclosure=tuple(hull),
        )

    # Spines

    def spine(self, theta: SymbolWindow, sys: SkewSystem, base: FiberSet, depth: int) -> FiberSet:
        """
        f_{θ_{-1}} ∘ ... ∘ f_{θ_{-depth}}(base): an outer approximation of the spine.

        With base = M this approximates the θ-fiber of the maximal attractor; with the
        target set it approximates the spine relative to the target set.
        """
        self.validator.validate_depth(depth)
        self.validator.validate_set(sys, base)
        return self._backward_image(theta, sys, depth, base)

    def maximal_attractor_fiber(self, theta: SymbolWindow, sys: SkewSystem, depth: int) -> FiberSet:
        """The spine over M."""
        return self.spine(theta, sys, sys.full_space(), depth)

    # Graph of the coding map

    def graph_sample(
        self,
        sys: SkewSystem,
        n_points: int,
        word_length: int | None = None,
        seed: int = 0,
        tol: float | None = None,
        max_depth: int | None = None,
    ) -> GraphSample:
        """
        Sample stationary windows, code θ and σθ, and record equivariance residuals.

        θ is coded to tol / max(1, Lip f_{θ_0}) so that f_{θ_0}(ρ(θ)) and ρ(σθ) are both
        pinned down to tol/2.
        """
        self.validator.validate_depth(n_points, "n_points")
        word_length = word_length or self.settings.default_word_length
        tol = tol if tol is not None else self.settings.singleton_tol
        windows = sample_windows(sys.markov, n_points, word_length, seed, stream="graph")
        return self._graph_from_windows(sys, windows, tol, max_depth)

    def _graph_from_windows(
        self,
        sys: SkewSystem,
        windows: list[SymbolWindow],
        tol: float,
        max_depth: int | None = None,
    ) -> GraphSample:
        lips = [max(1.0, float(f.lipschitz_bound)) for f in sys.fiber_maps]
        by_symbol: dict[int, list[int]] = defaultdict(list)
        for i, w in enumerate(windows):
            by_symbol[w.symbol_at(0)].append(i)
        codings: list[CodingResult | None] = [None] * len(windows)
        for symbol, rows in by_symbol.items():
            coded = self.code_batch(
                [windows[i] for i in rows], sys, max_depth, tol / lips[symbol - 1]
            )
            for i, c in zip(rows, coded):
                codings[i] = c
        shifted = self.code_batch([w.shift(1) for w in windows], sys, max_depth, tol)

        pairs = []
        residuals = []
        for w, c, s in zip(windows, codings, shifted):
            if not (c.converged and s.converged):
                continue
            image = self.apply_float(sys, w.symbol_at(0), c.point)
            pairs.append((w, c.point))
            residuals.append(_d1(image, s.point))
        n_bad = len(windows) - len(pairs)
        logger.info(
            f"Graph sample of {sys.name}: {len(pairs)}/{len(windows)} converged, "
            f"max residual {max(residuals, default=0.0):.3g}"
        )
        return GraphSample(tuple(pairs), tuple(residuals), len(windows), n_bad)

    @staticmethod
    def apply_float(sys: SkewSystem, symbol: int, point) -> tuple[float, ...]:
        """f_symbol at a float point."""
        f = sys.fiber_map(symbol)
        return tuple(
            float(g.apply_float(np.array([float(x)]))[0]) for g, x in zip(f.factors, point)
        )

    def omega_limit_sample(
        self,
        z: tuple[SymbolWindow, object],
        sys: SkewSystem,
        burn_in: int,
        n_iter: int,
    ) -> OmegaCloud:
        """
        Iterate F forward from z = (θ, x) and record the orbit after a burn-in.

        Returns:
            OmegaCloud with shifts burn_in, ..., burn_in + n_iter - 1
        """
        theta, x = z
        self.validator.validate_depth(n_iter, "n_iter")
        if burn_in < 0:
            raise ValidationError("burn_in must be nonnegative", "burn_in")
        point = np.array([float(c) for c in as_point(x, sys.fiber_dimension)])
        total = burn_in + n_iter
        word = theta.forward_word(total)
        tables = [[g.float_tables for g in f.factors] for f in sys.fiber_maps]
        points = np.empty((n_iter, sys.fiber_dimension))
        for n, symbol in enumerate(word):
            if n >= burn_in:
                points[n - burn_in] = point
            for c, (xs, ys, slopes) in enumerate(tables[symbol - 1]):
                i = int(np.searchsorted(xs, point[c], side="right")) - 1
                i = min(max(i, 0), len(slopes) - 1)
                point[c] = ys[i] + slopes[i] * (point[c] - xs[i])
        logger.debug(f"Recorded {n_iter} orbit points after burn-in {burn_in}")
        return OmegaCloud(theta, np.arange(burn_in, total, dtype=np.int64), points)

    def graph_distances(
        self, graph: GraphSample, cloud: OmegaCloud, cylinder_depth: int
    ) -> list[float]:
        """
        d2 distance from each graph point to the orbit cloud.

        d2 = d0 + d1 with d0 read off the two-sided words around θ_0: an orbit point whose
        window first differs from the graph window at |i| = r + 1 has d0 = 2^-(r+1). Windows
        that agree on all of [-cylinder_depth, cylinder_depth] are charged the bound
        2^-(cylinder_depth+1), so each value is exact up to that truncation.
        """
        self.validator.validate_depth(cylinder_depth, "cylinder_depth")
        if not graph.pairs:
            raise SkewGraphError("Graph sample is empty")
        centre = cylinder_depth
        cloud_words = cloud.words(cylinder_depth)
        distances = []
        for window, point in graph.pairs:
            word = window.symbols(-cylinder_depth, cylinder_depth + 1)
            d1 = np.abs(cloud.points - np.asarray(point, dtype=float)).sum(axis=1)
            best = 1.0 + float(d1.min())
            rows = np.arange(len(cloud))
            for r in range(cylinder_depth + 1):
                keep = (cloud_words[rows, centre - r] == word[centre - r]) & (
                    cloud_words[rows, centre + r] == word[centre + r]
                )
                rows = rows[keep]
                if rows.size == 0:
                    break
                best = min(best, 2.0 ** -(r + 1) + float(d1[rows].min()))
            distances.append(best)
        logger.debug(
            f"Graph distances at cylinder depth {cylinder_depth}: max {max(distances):.3g}"
        )
        return distances

    def graph_coverage(
        self, graph: GraphSample, cloud: OmegaCloud, cylinder_depth: int
    ) -> float:
        """Largest distance from a graph point to the orbit cloud; see graph_distances."""
        return max(self.graph_distances(graph, cloud, cylinder_depth))
