"""Splitting certificates and Monte-Carlo checks of average contraction."""

import logging
from collections.abc import Sequence
from fractions import Fraction

import numpy as np
from scipy import stats

from skewgraph.config import Settings, get_settings
from skewgraph.exceptions import (
    InadmissibleWordError,
    LastSymbolMismatchError,
    ProjectionsOverlapError,
    ValidationError,
)
from skewgraph.models.results import DecayEstimate, LogFit, SplitCertificate
from skewgraph.models.sets import FiberSet
from skewgraph.models.system import SkewSystem
from skewgraph.services import fiber
from skewgraph.services.engine import CHUNK_SIZE, FloatEngine
from skewgraph.services.parallel import parallel_map
from skewgraph.services.symbolic import (
    MarkovValidator,
    first_inadmissible_position,
    make_rng,
    sample_markov_batch,
)

logger = logging.getLogger(__name__)

MIN_SAMPLES = 100


def fit_log_decay(depths: Sequence[int], values: Sequence[float]) -> LogFit:
    """
    Least-squares line through (n, log value).

    A constant series is a perfect fit with slope 0.
    """
    x = np.asarray(depths, dtype=float)
    y = np.log(np.maximum(np.asarray(values, dtype=float), np.finfo(float).tiny))
    if len(x) < 2:
        raise ValidationError("Need at least two points to fit a decay rate", "depths")
    if np.ptp(y) == 0.0:
        return LogFit(slope=0.0, intercept=float(y[0]), r2=1.0)
    fit = stats.linregress(x, y)
    return LogFit(slope=float(fit.slope), intercept=float(fit.intercept), r2=float(fit.rvalue**2))


def _projection_gap(a: FiberSet, b: FiberSet, s: int) -> Fraction:
    """Signed gap between π_s(a) and π_s(b); negative or zero when they meet."""
    pa, pb = a.project(s).enclosing(), b.project(s).enclosing()
    return max(pb[0] - pa[1], pa[0] - pb[1])


def _separated(a: FiberSet, b: FiberSet) -> bool:
    return all(_projection_gap(a, b, s) > 0 for s in range(a.dimension))


class SplittingService:
    """Certifies the splitting property and estimates the resulting contraction rates."""

    def __init__(self, settings: Settings | None = None):
        self.settings = settings or get_settings()

    def check_split(
        self, sys: SkewSystem, word_a: Sequence[int], word_b: Sequence[int]
    ) -> SplitCertificate:
        """
        Check two words for the splitting property.

        M_1 and M_2 are the images of M with the first symbol of each word applied first.
        For coordinatewise increasing maps, separated projections stay separated under every
        further composition, so the finite check certifies the whole condition.

        Args:
            sys: The skew product
            word_a: (a_1, ..., a_l)
            word_b: (b_1, ..., b_r)

        Returns:
            SplitCertificate with exact images and per-coordinate gaps

        Raises:
            InadmissibleWordError: If a word uses a zero-probability transition
            LastSymbolMismatchError: If a_l != b_r
            ProjectionsOverlapError: If some coordinate projections intersect
        """
        word_a = MarkovValidator.validate_word(word_a, sys.k)
        word_b = MarkovValidator.validate_word(word_b, sys.k)
        for word in (word_a, word_b):
            position = first_inadmissible_position(word, sys.markov)
            if position is not None:
                raise InadmissibleWordError(word, position)
        if word_a[-1] != word_b[-1]:
            raise LastSymbolMismatchError(word_a[-1], word_b[-1])

        full = sys.full_space()
        image_a = fiber.image_along(word_a, sys, full)
        image_b = fiber.image_along(word_b, sys, full)
        gaps = []
        for s in range(sys.fiber_dimension):
            gap = _projection_gap(image_a, image_b, s)
            if gap <= 0:
                raise ProjectionsOverlapError(s, float(-gap))
            gaps.append(gap)
        certificate = SplitCertificate(
            word_a=word_a,
            word_b=word_b,
            image_a=image_a,
            image_b=image_b,
            gaps=tuple(gaps),
            monotone_certified=sys.strictly_increasing(),
        )
        logger.info(
            f"Split certificate for {sys.name}: min gap {float(min(gaps)):.3g}, "
            f"monotone {certificate.monotone_certified}"
        )
        return certificate

    def separation_sweep(
        self,
        sys: SkewSystem,
        certificate: SplitCertificate,
        n_words: int = 1000,
        max_length: int = 20,
        seed: int = 0,
    ) -> int:
        """
        Push both certified images through random words and count overlapping projections.

        Words are uniform over all symbols with lengths 1..max_length; arithmetic is exact.
        """
        rng = make_rng(seed, "separation-sweep")
        overlaps = 0
        for _ in range(n_words):
            length = int(rng.integers(1, max_length + 1))
            word = tuple(int(s) for s in rng.integers(1, sys.k + 1, size=length))
            a = fiber.image_along(word, sys, certificate.image_a)
            b = fiber.image_along(word, sys, certificate.image_b)
            if not _separated(a, b):
                overlaps += 1
                logger.debug(f"Projections meet after word {word}")
        logger.info(f"Separation sweep: {overlaps} overlaps in {n_words} words")
        return overlaps

    def _sample_widths(
        self, sys: SkewSystem, depths: Sequence[int], n_samples: int, seed: int, stream: str
    ) -> tuple[np.ndarray, np.ndarray]:
        """
        Boxes f_{w_n} ∘ ... ∘ f_{w_1}(M) for stationary Markov words w, at each depth.

        For a stationary chain the word (θ_{-n}, ..., θ_{-1}) has the same law as
        (θ_0, ..., θ_{n-1}), so these boxes are distributed like the backward images.
        """
        engine = FloatEngine(sys)
        max_depth = max(depths)
        blocks = [
            (b, min(CHUNK_SIZE, n_samples - b * CHUNK_SIZE))
            for b in range((n_samples + CHUNK_SIZE - 1) // CHUNK_SIZE)
        ]

        def run(block):
            index, size = block
            words = sample_markov_batch(
                sys.markov, size, max_depth, make_rng(seed, stream, index)
            )
            return engine.forward_widths(words, depths)

        parts = parallel_map(run, blocks, self.settings.worker_count())
        return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])

    @staticmethod
    def _validate_depths(depths: Sequence[int]) -> list[int]:
        depths = [int(d) for d in depths]
        if not depths or any(d < 1 for d in depths):
            raise ValidationError("Depths must be positive", "depths")
        if any(b <= a for a, b in zip(depths, depths[1:])):
            raise ValidationError("Depths must be strictly increasing", "depths")
        return depths

    def decay_estimate(
        self, sys: SkewSystem, depths: Sequence[int], n_samples: int, seed: int
    ) -> DecayEstimate:
        """
        Mean diameter of backward images of M per depth, with a log-linear fit.

        The fit uses the later half of the depths only.

        Raises:
            ValidationError: If depths are not increasing or n_samples < 100
        """
        depths = self._validate_depths(depths)
        if n_samples < MIN_SAMPLES:
            raise ValidationError(f"n_samples must be at least {MIN_SAMPLES}", "n_samples")
        _, widths = self._sample_widths(sys, depths, n_samples, seed, "decay")
        diams = widths.sum(axis=2)
        means = diams.mean(axis=0)
        errors = diams.std(axis=0, ddof=1) / np.sqrt(n_samples)

        tail = len(depths) // 2
        if len(depths) - tail < 2:
            tail = max(0, len(depths) - 2)
        if len(depths) >= 2:
            fit = fit_log_decay(depths[tail:], means[tail:])
            fitted_lambda = float(min(1.0, max(fit.rate, np.finfo(float).tiny)))
            r2 = fit.r2
        else:
            fitted_lambda, r2 = float("nan"), float("nan")
        logger.info(
            f"Decay estimate for {sys.name}: lambda {fitted_lambda:.6g}, r2 {r2:.4f} "
            f"({n_samples} samples)"
        )
        return DecayEstimate(
            depths=tuple(depths),
            mean_diams=tuple(float(v) for v in means),
            std_errors=tuple(float(v) for v in errors),
            fitted_lambda=fitted_lambda,
            fit_r2=r2,
            n_samples=n_samples,
            seed=seed,
        )

    def coverage_probability(
        self,
        sys: SkewSystem,
        x,
        coordinate: int,
        depth: int,
        n_samples: int,
        seed: int,
    ) -> float:
        """Estimate P(x ∈ π_s(f_{θ_{n-1}} ∘ ... ∘ f_{θ_0}(M)))."""
        if not 0 <= coordinate < sys.fiber_dimension:
            raise ValidationError(f"Coordinate {coordinate} out of range", "coordinate")
        value = float(x[coordinate]) if isinstance(x, (tuple, list)) else float(x)
        if not 0.0 <= value <= 1.0:
            raise ValidationError("Point must lie in [0,1]", "x")
        lows, widths = self._sample_widths(
            sys, [self._validate_depths([depth])[0]], n_samples, seed, "coverage"
        )
        lo = lows[:, 0, coordinate]
        hi = lo + widths[:, 0, coordinate]
        return float(np.mean((lo <= value) & (value <= hi)))

    def weak_hyperbolicity_fraction(
        self, sys: SkewSystem, depth: int, tol: float, n_samples: int, seed: int
    ) -> float:
        """Share of sampled tails whose depth-n backward image has diameter ≤ tol."""
        if tol < 0:
            raise ValidationError("tol must be nonnegative", "tol")
        _, widths = self._sample_widths(
            sys, self._validate_depths([depth]), n_samples, seed, "weak-hyperbolicity"
        )
        fraction = float(np.mean(widths[:, 0].sum(axis=1) <= tol))
        logger.info(f"Weak hyperbolicity of {sys.name} at depth {depth}: {fraction:.4f}")
        return fraction
