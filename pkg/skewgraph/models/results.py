"""Result records returned by the attractor, splitting and measure services."""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from skewgraph.models.sets import FiberSet
from skewgraph.models.symbols import SymbolWindow

PointLike = tuple[float | Fraction, ...]


class CodingStatus(str, Enum):
    """Outcome of iterating backward images toward a point."""

    CONVERGED = "converged"
    NOT_CONVERGED = "not_converged_at_depth"


@dataclass(frozen=True)
class CodingResult:
    """ρ(θ) as the midpoint of the depth-n backward image, with its enclosure."""

    status: CodingStatus
    point: PointLike | None
    depth_used: int
    final_diameter: float
    enclosure: tuple[tuple[float | Fraction, float | Fraction], ...] | None = None

    @property
    def converged(self) -> bool:
        return self.status == CodingStatus.CONVERGED


@dataclass(frozen=True)
class TargetSetResult:
    """B_F^n(start) at the stopping iteration."""

    set: FiberSet
    iterations: int
    last_step: float
    converged: bool


@dataclass(frozen=True, eq=False)
class GraphSample:
    """Converged (θ, ρ(θ)) pairs with their equivariance residuals."""

    pairs: tuple[tuple[SymbolWindow, PointLike], ...]
    residuals: tuple[float, ...]
    n_drawn: int
    n_not_converged: int

    @property
    def convergence_fraction(self) -> float:
        return (self.n_drawn - self.n_not_converged) / self.n_drawn if self.n_drawn else 0.0

    @property
    def max_residual(self) -> float:
        return max(self.residuals, default=0.0)


@dataclass(frozen=True, eq=False)
class OmegaCloud:
    """Forward orbit points F^n(z) recorded after a burn-in.

    Row i is the fiber point above σ^{shifts[i]} of the starting window.
    """

    window: SymbolWindow
    shifts: np.ndarray
    points: np.ndarray

    def __len__(self) -> int:
        return len(self.shifts)

    def window_at(self, i: int) -> SymbolWindow:
        return self.window.shift(int(self.shifts[i]))

    def words(self, radius: int) -> np.ndarray:
        """Row i holds (θ_{n-radius}, ..., θ_{n+radius}) for n = shifts[i]."""
        start = int(self.shifts.min()) - radius
        stop = int(self.shifts.max()) + radius + 1
        symbols = np.asarray(self.window.symbols(start, stop), dtype=np.int64)
        offsets = self.shifts - radius - start
        return symbols[offsets[:, None] + np.arange(2 * radius + 1)[None, :]]


@dataclass(frozen=True)
class SplitCertificate:
    """Two admissible words with a common last symbol whose images have separated projections."""

    word_a: tuple[int, ...]
    word_b: tuple[int, ...]
    image_a: FiberSet
    image_b: FiberSet
    gaps: tuple[Fraction, ...]
    monotone_certified: bool


@dataclass(frozen=True, eq=False)
class DecayEstimate:
    """Monte-Carlo means of backward-image diameters and their log-linear fit."""

    depths: tuple[int, ...]
    mean_diams: tuple[float, ...]
    std_errors: tuple[float, ...]
    fitted_lambda: float
    fit_r2: float
    n_samples: int
    seed: int


@dataclass(frozen=True)
class LogFit:
    """Least-squares fit of log(value) = intercept + slope·n."""

    slope: float
    intercept: float
    r2: float

    @property
    def rate(self) -> float:
        return float(np.exp(self.slope))


@dataclass(frozen=True)
class ConvergenceRow:
    n: int
    distance: float
    error_bound: float


@dataclass(frozen=True)
class SyncRow:
    """Distance of F^n(θ, x) to the graph point above σ^n θ; None when σ^n θ did not code."""

    n: int
    distance: float | None
    converged: bool


@dataclass(frozen=True, eq=False)
class TransportPlan:
    coupling: np.ndarray
    cost: float
    error_bound: float = 0.0


@dataclass(frozen=True)
class DisintegrationCheck:
    """Fiber samples above a cylinder built forward and through the backward word."""

    forward: tuple[tuple[Fraction, ...], ...]
    backward: tuple[tuple[Fraction, ...], ...]

    @property
    def equal(self) -> bool:
        return sorted(self.forward) == sorted(self.backward)


@dataclass(frozen=True)
class ConcentrationResult:
    """Spread of arbitrary fiber samples pushed through a backward word.

    final_diameter belongs to the depth-`depth` backward image of M; `coding` is ρ(θ) at the
    configured singleton tolerance.
    """

    spread: float
    max_deviation: float
    final_diameter: float
    depth: int
    coding: CodingResult = field(compare=False)
