"""Fiber operations: evaluation, composition along words, exact images and diameters."""

import logging
from collections.abc import Sequence
from fractions import Fraction

from skewgraph.exceptions import ValidationError
from skewgraph.models.base import RationalLike
from skewgraph.models.maps import FiberMap, PLMap, ProductMap, identity_map
from skewgraph.models.sets import BoxUnion, FiberSet, IntervalUnion, as_point
from skewgraph.models.system import SkewSystem

logger = logging.getLogger(__name__)


def apply(f: FiberMap, x: RationalLike | Sequence[RationalLike]) -> Fraction | tuple[Fraction, ...]:
    """
    Evaluate a fiber map exactly.

    Scalars are accepted for one-dimensional maps and give a scalar back; sequences give
    tuples.

    Raises:
        ValidationError: If x lies outside [0,1]^m or has the wrong dimension
    """
    if isinstance(x, (tuple, list)):
        return f.apply_point(as_point(x, f.dimension))
    if f.dimension != 1:
        raise ValidationError(f"Expected a {f.dimension}-dimensional point", "x")
    return f.apply(x)


def compose(word: Sequence[int], sys: SkewSystem) -> FiberMap:
    """f_{w_n} ∘ ... ∘ f_{w_1}: the first symbol of the word acts first."""
    result = identity_map(sys.fiber_dimension)
    for symbol in word:
        result = sys.fiber_map(symbol).compose(result)
    return result


def image(f: FiberMap, u: FiberSet) -> FiberSet:
    """Exact image of a union under a monotone map, taken endpoint by endpoint."""
    if isinstance(u, IntervalUnion):
        if not isinstance(f, PLMap):
            raise ValidationError("Interval unions need a one-dimensional map", "u")
        return IntervalUnion(tuple(f.image_interval(a, b) for a, b in u.intervals))
    if isinstance(u, BoxUnion):
        factors = f.factors if isinstance(f, (PLMap, ProductMap)) else ()
        if len(factors) != u.dimension:
            raise ValidationError(
                f"Map of dimension {f.dimension} cannot act on a {u.dimension}-dimensional set", "u"
            )
        boxes = tuple(
            tuple(g.image_interval(lo, hi) for g, (lo, hi) in zip(factors, box)) for box in u.boxes
        )
        return BoxUnion(boxes, u.dimension)
    raise ValidationError(f"Unsupported set type {type(u).__name__}", "u")


def image_along(word: Sequence[int], sys: SkewSystem, u: FiberSet) -> FiberSet:
    """Image of u under the word, applying one factor at a time."""
    for symbol in word:
        u = image(sys.fiber_map(symbol), u)
    return u


def diameter(u: FiberSet) -> Fraction:
    """Sum-metric diameter of the enclosing box; 0 for empty sets and points."""
    return u.diameter()


def lipschitz_bound(f: FiberMap) -> Fraction:
    """Largest slope over all pieces and coordinates."""
    return f.lipschitz_bound
