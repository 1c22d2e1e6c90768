"""Exact monotone piecewise-linear fiber maps on [0,1] and coordinatewise products on [0,1]^m."""

import bisect
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Union

import numpy as np

from skewgraph.exceptions import ValidationError
from skewgraph.models.base import ONE, ZERO, RationalLike, format_fraction, to_fraction

Point = tuple[Fraction, ...]


def _fractions(values: Sequence[RationalLike], name: str) -> tuple[Fraction, ...]:
    try:
        return tuple(to_fraction(v) for v in values)
    except (ValueError, ZeroDivisionError) as e:
        raise ValidationError(f"Cannot parse {name}: {e}", name) from e


def _merge_collinear(
    xs: list[Fraction], ys: list[Fraction]
) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Drop interior breakpoints where adjacent pieces share a slope."""
    out_x = [xs[0]]
    out_y = [ys[0]]
    for i in range(1, len(xs) - 1):
        left = (ys[i] - out_y[-1]) / (xs[i] - out_x[-1])
        right = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])
        if left != right:
            out_x.append(xs[i])
            out_y.append(ys[i])
    out_x.append(xs[-1])
    out_y.append(ys[-1])
    return tuple(out_x), tuple(out_y)


@dataclass(frozen=True, eq=False)
class PLMap:
    """A continuous nondecreasing piecewise-linear self-map of [0,1].

    The graph interpolates (breakpoints[i], values[i]). All coordinates are exact rationals.
    """

    breakpoints: tuple[Fraction, ...]
    values: tuple[Fraction, ...]
    injective: bool = False

    def __post_init__(self) -> None:
        xs = _fractions(self.breakpoints, "breakpoints")
        ys = _fractions(self.values, "values")
        if len(xs) < 2 or len(xs) != len(ys):
            raise ValidationError(
                "A PL map needs at least two breakpoints and one value per breakpoint", "values"
            )
        if xs[0] != ZERO or xs[-1] != ONE:
            raise ValidationError("Breakpoints must start at 0 and end at 1", "breakpoints")
        for a, b in zip(xs, xs[1:]):
            if not a < b:
                raise ValidationError("Breakpoints must be strictly increasing", "breakpoints")
        for y in ys:
            if not ZERO <= y <= ONE:
                raise ValidationError(f"Value {format_fraction(y)} leaves [0,1]", "values")
        for i, (a, b) in enumerate(zip(ys, ys[1:])):
            if b < a:
                raise ValidationError(
                    f"Map decreases on piece {i} ({format_fraction(a)} -> {format_fraction(b)}); "
                    "only nondecreasing maps are supported",
                    "values",
                )
            if self.injective and b == a:
                raise ValidationError(f"Map declared injective is constant on piece {i}", "values")
        object.__setattr__(self, "breakpoints", xs)
        object.__setattr__(self, "values", ys)

    @classmethod
    def identity(cls) -> "PLMap":
        return cls((ZERO, ONE), (ZERO, ONE), injective=True)

    @classmethod
    def affine(cls, slope: RationalLike, intercept: RationalLike = 0) -> "PLMap":
        """x ↦ slope·x + intercept on [0,1]."""
        slope = to_fraction(slope)
        intercept = to_fraction(intercept)
        return cls((ZERO, ONE), (intercept, intercept + slope), injective=slope > 0)

    @classmethod
    def from_pairs(
        cls, pairs: Sequence[tuple[RationalLike, RationalLike]], injective: bool | None = None
    ) -> "PLMap":
        """Build from (x, y) graph vertices; injectivity is inferred when not given."""
        xs = _fractions([p[0] for p in pairs], "breakpoints")
        ys = _fractions([p[1] for p in pairs], "values")
        if injective is None:
            injective = all(a < b for a, b in zip(ys, ys[1:]))
        return cls(xs, ys, injective=injective)

    @classmethod
    def from_strings(
        cls, xs: Sequence[str], ys: Sequence[str], injective: bool | None = None
    ) -> "PLMap":
        """Parse parallel arrays of decimal or "p/q" literals."""
        return cls.from_pairs(list(zip(xs, ys)), injective=injective)

    # Geometry

    @property
    def dimension(self) -> int:
        return 1

    @property
    def factors(self) -> tuple["PLMap", ...]:
        return (self,)

    @cached_property
    def slopes(self) -> tuple[Fraction, ...]:
        xs, ys = self.breakpoints, self.values
        return tuple((ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) for i in range(len(xs) - 1))

    @cached_property
    def lipschitz_bound(self) -> Fraction:
        """Largest slope over the pieces."""
        return max(self.slopes)

    @cached_property
    def strictly_increasing(self) -> bool:
        return all(s > 0 for s in self.slopes)

    def _piece(self, x: Fraction) -> int:
        i = bisect.bisect_right(self.breakpoints, x) - 1
        return min(max(i, 0), len(self.breakpoints) - 2)

    def _check_domain(self, x: Fraction) -> None:
        if not ZERO <= x <= ONE:
            raise ValidationError(f"Point {format_fraction(x)} is outside [0,1]", "x")

    def apply(self, x: RationalLike) -> Fraction:
        """Exact evaluation."""
        x = to_fraction(x)
        self._check_domain(x)
        i = self._piece(x)
        return self.values[i] + self.slopes[i] * (x - self.breakpoints[i])

    def __call__(self, x: RationalLike) -> Fraction:
        return self.apply(x)

    def apply_point(self, point: Sequence[RationalLike]) -> Point:
        if len(point) != 1:
            raise ValidationError(f"Expected a 1-dimensional point, got {len(point)}", "x")
        return (self.apply(point[0]),)

    def image_interval(self, a: Fraction, b: Fraction) -> tuple[Fraction, Fraction]:
        """[f(a), f(b)] (monotone image of [a, b])."""
        return self.apply(a), self.apply(b)

    def slope_left(self, x: RationalLike) -> Fraction:
        """Slope of the piece ending at x (x > 0)."""
        x = to_fraction(x)
        if x <= ZERO:
            raise ValidationError("Left slope is undefined at 0", "x")
        i = bisect.bisect_left(self.breakpoints, x) - 1
        return self.slopes[i]

    def slope_right(self, x: RationalLike) -> Fraction:
        """Slope of the piece starting at x (x < 1)."""
        x = to_fraction(x)
        if x >= ONE:
            raise ValidationError("Right slope is undefined at 1", "x")
        return self.slopes[self._piece(x)]

    def fixed_points(self) -> tuple[Fraction, ...]:
        """Isolated fixed points, plus endpoints of pieces lying on the diagonal."""
        found: set[Fraction] = set()
        xs, ys = self.breakpoints, self.values
        for i, slope in enumerate(self.slopes):
            d0 = ys[i] - xs[i]
            d1 = ys[i + 1] - xs[i + 1]
            if d0 == 0:
                found.add(xs[i])
            if d1 == 0:
                found.add(xs[i + 1])
            if d0 * d1 < 0:
                # solve ys[i] + slope (x - xs[i]) = x
                found.add(xs[i] + d0 / (1 - slope))
        return tuple(sorted(found))

    # Composition

    def compose(self, inner: "PLMap") -> "PLMap":
        """self ∘ inner, with collinear pieces merged."""
        xs = set(inner.breakpoints)
        for i in range(len(inner.breakpoints) - 1):
            y0, y1 = inner.values[i], inner.values[i + 1]
            if y0 == y1:
                continue
            x0, x1 = inner.breakpoints[i], inner.breakpoints[i + 1]
            lo = bisect.bisect_right(self.breakpoints, y0)
            hi = bisect.bisect_left(self.breakpoints, y1)
            for b in self.breakpoints[lo:hi]:
                xs.add(x0 + (b - y0) * (x1 - x0) / (y1 - y0))
        ordered = sorted(xs)
        ys = [self.apply(inner.apply(x)) for x in ordered]
        bx, by = _merge_collinear(ordered, ys)
        return PLMap(bx, by, injective=self.injective and inner.injective)

    # Float engine

    @cached_property
    def float_tables(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Breakpoints, values and slopes as float arrays."""
        xs = np.array([float(x) for x in self.breakpoints])
        ys = np.array([float(y) for y in self.values])
        slopes = np.array([float(s) for s in self.slopes])
        return xs, ys, slopes

    def apply_float(self, x: np.ndarray) -> np.ndarray:
        """Vectorized float evaluation."""
        xs, ys, slopes = self.float_tables
        x = np.asarray(x, dtype=float)
        i = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(slopes) - 1)
        return ys[i] + slopes[i] * (x - xs[i])

    def propagate_float(self, lo: np.ndarray, width: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """
        Image of intervals [lo, lo + width] tracked as (low end, width).

        When an interval sits inside one piece its width is scaled by the slope, so widths keep
        their relative accuracy far below the spacing of floats near the low end.
        """
        xs, ys, slopes = self.float_tables
        last = len(slopes) - 1
        hi = lo + width
        i_lo = np.clip(np.searchsorted(xs, lo, side="right") - 1, 0, last)
        i_hi = np.clip(np.searchsorted(xs, hi, side="left") - 1, 0, last)
        new_lo = ys[i_lo] + slopes[i_lo] * (lo - xs[i_lo])
        new_hi = ys[i_hi] + slopes[i_hi] * (hi - xs[i_hi])
        new_width = np.where(i_lo == i_hi, slopes[i_lo] * width, np.maximum(new_hi - new_lo, 0.0))
        return np.clip(new_lo, 0.0, 1.0), new_width

    def to_dict(self) -> dict:
        return {
            "x": [format_fraction(x) for x in self.breakpoints],
            "y": [format_fraction(y) for y in self.values],
        }

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PLMap):
            return NotImplemented
        return self.breakpoints == other.breakpoints and self.values == other.values

    def __hash__(self) -> int:
        return hash((self.breakpoints, self.values))

    def __repr__(self) -> str:
        pairs = ", ".join(
            f"({format_fraction(x)}, {format_fraction(y)})"
            for x, y in zip(self.breakpoints, self.values)
        )
        return f"PLMap[{pairs}]"


@dataclass(frozen=True, eq=False)
class ProductMap:
    """Coordinatewise map (x_1..x_m) ↦ (g_1(x_1), ..., g_m(x_m)) on [0,1]^m."""

    factors: tuple[PLMap, ...]

    def __post_init__(self) -> None:
        factors = tuple(self.factors)
        if not factors:
            raise ValidationError("A product map needs at least one factor", "factors")
        for f in factors:
            if not isinstance(f, PLMap):
                raise ValidationError("Product factors must be PL maps", "factors")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def identity(cls, m: int) -> "ProductMap":
        return cls(tuple(PLMap.identity() for _ in range(m)))

    @property
    def dimension(self) -> int:
        return len(self.factors)

    @property
    def injective(self) -> bool:
        return all(f.injective for f in self.factors)

    @property
    def strictly_increasing(self) -> bool:
        return all(f.strictly_increasing for f in self.factors)

    @property
    def lipschitz_bound(self) -> Fraction:
        return max(f.lipschitz_bound for f in self.factors)

    def apply_point(self, point: Sequence[RationalLike]) -> Point:
        if len(point) != self.dimension:
            raise ValidationError(
                f"Expected a {self.dimension}-dimensional point, got {len(point)}", "x"
            )
        return tuple(f.apply(x) for f, x in zip(self.factors, point))

    def apply(self, point: Sequence[RationalLike]) -> Point:
        return self.apply_point(point)

    def __call__(self, point: Sequence[RationalLike]) -> Point:
        return self.apply_point(point)

    def compose(self, inner: "ProductMap") -> "ProductMap":
        """self ∘ inner, factor by factor."""
        if inner.dimension != self.dimension:
            raise ValidationError("Cannot compose maps of different dimension", "factors")
        return ProductMap(tuple(f.compose(g) for f, g in zip(self.factors, inner.factors)))

    def to_dict(self) -> dict:
        return {"factors": [f.to_dict() for f in self.factors]}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProductMap):
            return NotImplemented
        return self.factors == other.factors

    def __hash__(self) -> int:
        return hash(self.factors)

    def __repr__(self) -> str:
        return f"ProductMap({', '.join(repr(f) for f in self.factors)})"


FiberMap = Union[PLMap, ProductMap]


def identity_map(m: int) -> FiberMap:
    """Identity on [0,1]^m (a PLMap when m == 1)."""
    return PLMap.identity() if m == 1 else ProductMap.identity(m)
