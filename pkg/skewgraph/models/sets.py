"""Finite unions of closed intervals and axis-aligned boxes with exact rational endpoints."""

import bisect
import itertools
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from skewgraph.exceptions import ValidationError
from skewgraph.models.base import ONE, ZERO, RationalLike, format_fraction, to_fraction

Interval = tuple[Fraction, Fraction]
Box = tuple[Interval, ...]

INFINITY = float("inf")


def _interval(a: RationalLike, b: RationalLike) -> Interval:
    lo, hi = to_fraction(a), to_fraction(b)
    if hi < lo:
        raise ValidationError(
            f"Interval [{format_fraction(lo)}, {format_fraction(hi)}] is reversed", "intervals"
        )
    if lo < ZERO or hi > ONE:
        raise ValidationError(
            f"Interval [{format_fraction(lo)}, {format_fraction(hi)}] leaves [0,1]", "intervals"
        )
    return lo, hi


def merge_intervals(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    """Sort and merge intervals that overlap or touch."""
    ordered = sorted(intervals)
    merged: list[list[Fraction]] = []
    for a, b in ordered:
        if merged and a <= merged[-1][1]:
            if b > merged[-1][1]:
                merged[-1][1] = b
        else:
            merged.append([a, b])
    return tuple((a, b) for a, b in merged)


@dataclass(frozen=True)
class IntervalUnion:
    """A finite union of disjoint closed intervals in [0,1], sorted left to right."""

    intervals: tuple[Interval, ...] = ()

    def __post_init__(self) -> None:
        cleaned = merge_intervals(_interval(a, b) for a, b in self.intervals)
        object.__setattr__(self, "intervals", cleaned)

    @classmethod
    def of(cls, *pairs: tuple[RationalLike, RationalLike]) -> "IntervalUnion":
        return cls(tuple(pairs))

    @classmethod
    def full(cls) -> "IntervalUnion":
        return cls(((ZERO, ONE),))

    @classmethod
    def empty(cls) -> "IntervalUnion":
        return cls(())

    @classmethod
    def point(cls, x: RationalLike) -> "IntervalUnion":
        x = to_fraction(x)
        return cls(((x, x),))

    @property
    def dimension(self) -> int:
        return 1

    @property
    def components(self) -> tuple[Interval, ...]:
        return self.intervals

    def is_empty(self) -> bool:
        return not self.intervals

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def lengths(self) -> tuple[Fraction, ...]:
        return tuple(b - a for a, b in self.intervals)

    def enclosing(self) -> Interval | None:
        """Smallest interval containing the union, None when empty."""
        if not self.intervals:
            return None
        return self.intervals[0][0], self.intervals[-1][1]

    def diameter(self) -> Fraction:
        hull = self.enclosing()
        return ZERO if hull is None else hull[1] - hull[0]

    def midpoint(self) -> tuple[Fraction, ...]:
        lo, hi = self.enclosing()
        return ((lo + hi) / 2,)

    def project(self, coordinate: int = 0) -> "IntervalUnion":
        if coordinate != 0:
            raise ValidationError(f"Coordinate {coordinate} out of range for dimension 1", "s")
        return self

    def union(self, other: "IntervalUnion") -> "IntervalUnion":
        return IntervalUnion(self.intervals + other.intervals)

    def intersection(self, other: "IntervalUnion") -> "IntervalUnion":
        pieces = []
        for a, b in self.intervals:
            for c, d in other.intervals:
                lo, hi = max(a, c), min(b, d)
                if lo <= hi:
                    pieces.append((lo, hi))
        return IntervalUnion(tuple(pieces))

    def contains_point(self, x: RationalLike | Sequence[RationalLike]) -> bool:
        if isinstance(x, (tuple, list)):
            x = x[0]
        x = to_fraction(x)
        i = bisect.bisect_right(self.intervals, (x, ONE + 1)) - 1
        return i >= 0 and self.intervals[i][0] <= x <= self.intervals[i][1]

    def contains(self, other: "IntervalUnion") -> bool:
        """Set inclusion other ⊆ self."""
        return all(
            any(a <= c and d <= b for a, b in self.intervals) for c, d in other.intervals
        )

    def distance_to_point(self, x: Fraction) -> Fraction:
        """Distance from x to the union (nonempty)."""
        i = bisect.bisect_right(self.intervals, (x, ONE + 1))
        best = None
        for j in (i - 1, i):
            if 0 <= j < len(self.intervals):
                a, b = self.intervals[j]
                d = ZERO if a <= x <= b else min(abs(x - a), abs(x - b))
                best = d if best is None else min(best, d)
        return best

    def _directed_hausdorff(self, other: "IntervalUnion") -> Fraction:
        candidates = [x for interval in self.intervals for x in interval]
        for (_, b), (c, _) in zip(other.intervals, other.intervals[1:]):
            mid = (b + c) / 2
            if self.contains_point(mid):
                candidates.append(mid)
        return max(other.distance_to_point(x) for x in candidates)

    def hausdorff_distance(self, other: "IntervalUnion") -> Fraction | float:
        """Exact Hausdorff distance; infinite when exactly one side is empty."""
        if self.is_empty() and other.is_empty():
            return ZERO
        if self.is_empty() or other.is_empty():
            return INFINITY
        return max(self._directed_hausdorff(other), other._directed_hausdorff(self))

    def inflate(self, eps: RationalLike) -> "IntervalUnion":
        """Grow every component by eps on both sides, clipped to [0,1]."""
        eps = to_fraction(eps)
        return IntervalUnion(
            tuple((max(ZERO, a - eps), min(ONE, b + eps)) for a, b in self.intervals)
        )

    def to_rows(self) -> list[dict]:
        return [
            {"component": i, "coordinate": 0, "low": a, "high": b}
            for i, (a, b) in enumerate(self.intervals)
        ]

    def __repr__(self) -> str:
        body = " ∪ ".join(f"[{format_fraction(a)}, {format_fraction(b)}]" for a, b in self.intervals)
        return f"IntervalUnion({body or '∅'})"


def _box(intervals: Sequence[tuple[RationalLike, RationalLike]]) -> Box:
    if not intervals:
        raise ValidationError("A box needs at least one coordinate", "boxes")
    return tuple(_interval(a, b) for a, b in intervals)


def _has_interior_overlap(a: Box, b: Box) -> bool:
    return all(max(x[0], y[0]) < min(x[1], y[1]) for x, y in zip(a, b))


def _box_contains(outer: Box, inner: Box) -> bool:
    return all(o[0] <= i[0] and i[1] <= o[1] for o, i in zip(outer, inner))


def _subtract(piece: Box, cut: Box) -> list[Box]:
    """Split `piece` into closed boxes covering piece minus the interior of `cut`."""
    if _box_contains(cut, piece):
        return []
    if not _has_interior_overlap(piece, cut):
        return [piece]
    out: list[Box] = []
    remaining = list(piece)
    for s, ((lo, hi), (c_lo, c_hi)) in enumerate(zip(piece, cut)):
        if lo < c_lo:
            below = list(remaining)
            below[s] = (lo, c_lo)
            out.append(tuple(below))
        if c_hi < hi:
            above = list(remaining)
            above[s] = (c_hi, hi)
            out.append(tuple(above))
        remaining[s] = (max(lo, c_lo), min(hi, c_hi))
    return out


def _try_merge(a: Box, b: Box) -> Box | None:
    """Union of a and b when it is itself a box."""
    if _box_contains(a, b):
        return a
    if _box_contains(b, a):
        return b
    differing = [s for s in range(len(a)) if a[s] != b[s]]
    if len(differing) != 1:
        return None
    s = differing[0]
    (a_lo, a_hi), (b_lo, b_hi) = a[s], b[s]
    if max(a_lo, b_lo) > min(a_hi, b_hi):
        return None
    merged = list(a)
    merged[s] = (min(a_lo, b_lo), max(a_hi, b_hi))
    return tuple(merged)


def normalize_boxes(boxes: Iterable[Box]) -> tuple[Box, ...]:
    """
    Interior-disjoint pieces covering the union, with box-shaped pairs merged.

    Closed pieces may still share a face: an L-shape needs two boxes that touch along an
    edge, and no set of pairwise disjoint closed boxes covers it.
    """
    pieces: list[Box] = []
    for box in boxes:
        fresh = [box]
        for existing in pieces:
            fresh = [part for f in fresh for part in _subtract(f, existing)]
            if not fresh:
                break
        pieces.extend(fresh)
    changed = True
    while changed:
        changed = False
        for i, j in itertools.combinations(range(len(pieces)), 2):
            merged = _try_merge(pieces[i], pieces[j])
            if merged is not None:
                pieces[i] = merged
                del pieces[j]
                changed = True
                break
    return tuple(sorted(pieces))


def _interval_distance(x: Fraction, interval: Interval) -> Fraction:
    a, b = interval
    if x < a:
        return a - x
    if x > b:
        return x - b
    return ZERO


@dataclass(frozen=True, eq=False)
class BoxUnion:
    """A finite union of axis-aligned closed boxes in [0,1]^m with disjoint interiors.

    Boxes may touch along faces. `components` lists these boxes, so its length counts
    pieces rather than connected components.
    """

    boxes: tuple[Box, ...]
    dimension: int

    def __post_init__(self) -> None:
        if self.dimension < 1:
            raise ValidationError("Dimension must be positive", "dimension")
        boxes = tuple(_box(b) for b in self.boxes)
        for b in boxes:
            if len(b) != self.dimension:
                raise ValidationError(
                    f"Box has {len(b)} coordinates, expected {self.dimension}", "boxes"
                )
        object.__setattr__(self, "boxes", normalize_boxes(boxes))

    @classmethod
    def full(cls, m: int) -> "BoxUnion":
        return cls((tuple((ZERO, ONE) for _ in range(m)),), m)

    @classmethod
    def empty(cls, m: int) -> "BoxUnion":
        return cls((), m)

    @classmethod
    def single(cls, intervals: Sequence[tuple[RationalLike, RationalLike]]) -> "BoxUnion":
        return cls((_box(intervals),), len(intervals))

    @classmethod
    def point(cls, point: Sequence[RationalLike]) -> "BoxUnion":
        return cls.single([(x, x) for x in point])

    @property
    def components(self) -> tuple[Box, ...]:
        return self.boxes

    def is_empty(self) -> bool:
        return not self.boxes

    def __len__(self) -> int:
        return len(self.boxes)

    def __iter__(self) -> Iterator[Box]:
        return iter(self.boxes)

    def enclosing(self) -> Box | None:
        if not self.boxes:
            return None
        return tuple(
            (min(b[s][0] for b in self.boxes), max(b[s][1] for b in self.boxes))
            for s in range(self.dimension)
        )

    def diameter(self) -> Fraction:
        """Sum-metric diameter: total extent of the enclosing box."""
        hull = self.enclosing()
        return ZERO if hull is None else sum((hi - lo for lo, hi in hull), ZERO)

    def midpoint(self) -> tuple[Fraction, ...]:
        return tuple((lo + hi) / 2 for lo, hi in self.enclosing())

    def project(self, coordinate: int) -> IntervalUnion:
        """π_s of the union."""
        if not 0 <= coordinate < self.dimension:
            raise ValidationError(
                f"Coordinate {coordinate} out of range for dimension {self.dimension}", "s"
            )
        return IntervalUnion(tuple(b[coordinate] for b in self.boxes))

    def union(self, other: "BoxUnion") -> "BoxUnion":
        if other.dimension != self.dimension:
            raise ValidationError("Cannot unite sets of different dimension", "dimension")
        return BoxUnion(self.boxes + other.boxes, self.dimension)

    def contains_point(self, point: Sequence[RationalLike]) -> bool:
        point = tuple(to_fraction(x) for x in point)
        return any(all(lo <= x <= hi for x, (lo, hi) in zip(point, b)) for b in self.boxes)

    def contains(self, other: "BoxUnion") -> bool:
        """
        Exact set inclusion other ⊆ self.

        Along each axis the endpoints of both sets cut the line into points and open gaps.
        Every product of such cells lies wholly inside or wholly outside each closed box, so
        one representative point per cell decides inclusion.
        """
        if other.is_empty():
            return True
        if self.is_empty():
            return False
        axes = []
        for s in range(self.dimension):
            cuts = sorted({x for b in self.boxes + other.boxes for x in b[s]})
            cells = list(cuts) + [(a + b) / 2 for a, b in zip(cuts, cuts[1:])]
            axes.append(cells)
        for box in other.boxes:
            local = [[c for c in axis if lo <= c <= hi] for axis, (lo, hi) in zip(axes, box)]
            for point in itertools.product(*local):
                if not self.contains_point(point):
                    return False
        return True

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BoxUnion):
            return NotImplemented
        return (
            self.dimension == other.dimension and self.contains(other) and other.contains(self)
        )

    def __hash__(self) -> int:
        return hash((self.dimension, self.enclosing()))

    def _directed_bound(self, other: "BoxUnion") -> Fraction:
        best = ZERO
        for a in self.boxes:
            nearest = min(
                sum(
                    (
                        max(_interval_distance(lo, bs), _interval_distance(hi, bs))
                        for (lo, hi), bs in zip(a, b)
                    ),
                    ZERO,
                )
                for b in other.boxes
            )
            best = max(best, nearest)
        return best

    def hausdorff_distance(self, other: "BoxUnion") -> Fraction | float:
        """
        Hausdorff distance under the sum metric.

        Exact for m == 1; for m >= 2 an upper bound built from box-to-box distances.
        """
        if self.is_empty() and other.is_empty():
            return ZERO
        if self.is_empty() or other.is_empty():
            return INFINITY
        if self.dimension == 1:
            return self.project(0).hausdorff_distance(other.project(0))
        return max(self._directed_bound(other), other._directed_bound(self))

    def inflate(self, eps: RationalLike) -> "BoxUnion":
        eps = to_fraction(eps)
        return BoxUnion(
            tuple(
                tuple((max(ZERO, lo - eps), min(ONE, hi + eps)) for lo, hi in b)
                for b in self.boxes
            ),
            self.dimension,
        )

    def to_rows(self) -> list[dict]:
        return [
            {"component": i, "coordinate": s, "low": lo, "high": hi}
            for i, b in enumerate(self.boxes)
            for s, (lo, hi) in enumerate(b)
        ]

    def __repr__(self) -> str:
        def fmt(b: Box) -> str:
            return "×".join(f"[{format_fraction(lo)}, {format_fraction(hi)}]" for lo, hi in b)

        return f"BoxUnion(m={self.dimension}, {' ∪ '.join(fmt(b) for b in self.boxes) or '∅'})"


FiberSet = Union[IntervalUnion, BoxUnion]


def full_space(m: int) -> FiberSet:
    """M = [0,1]^m (an IntervalUnion when m == 1)."""
    return IntervalUnion.full() if m == 1 else BoxUnion.full(m)


def as_point(x, m: int) -> tuple[Fraction, ...]:
    """Normalize a scalar or sequence to an m-tuple of rationals in [0,1]."""
    coords = tuple(x) if isinstance(x, (tuple, list)) else (x,)
    if len(coords) != m:
        raise ValidationError(f"Expected a {m}-dimensional point, got {len(coords)}", "x")
    point = tuple(to_fraction(c) for c in coords)
    for c in point:
        if not ZERO <= c <= ONE:
            raise ValidationError(f"Point coordinate {format_fraction(c)} is outside [0,1]", "x")
    return point
