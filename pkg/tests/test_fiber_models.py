"""Tests for PL fiber maps, interval and box unions, and fiber operations."""

from fractions import Fraction

import numpy as np
import pytest

pytestmark = pytest.mark.unit

from skewgraph.exceptions import ValidationError
from skewgraph.models.maps import PLMap, ProductMap, identity_map
from skewgraph.models.sets import BoxUnion, IntervalUnion, as_point, full_space
from skewgraph.models.symbols import MarkovSpec
from skewgraph.models.system import SkewSystem
from skewgraph.services import fiber

F = Fraction
HALF = F(1, 2)


@pytest.fixture
def tent_up():
    """Increasing map through (0,0), (1/2,1/4), (1,1)."""
    return PLMap.from_pairs([(0, 0), (HALF, F(1, 4)), (1, 1)])


class TestPLMap:
    """Tests for exact piecewise-linear maps."""

    def test_apply_exact(self, tent_up):
        assert tent_up.apply(F(1, 4)) == F(1, 8)
        assert tent_up.apply("3/4") == F(5, 8)

    def test_slopes(self, tent_up):
        assert tent_up.slopes == (HALF, F(3, 2))
        assert tent_up.lipschitz_bound == F(3, 2)
        assert tent_up.slope_left(HALF) == HALF
        assert tent_up.slope_right(HALF) == F(3, 2)

    def test_fixed_points(self, tent_up):
        assert tent_up.fixed_points() == (F(0), F(1))
        assert PLMap.affine(HALF, F(1, 4)).fixed_points() == (HALF,)

    def test_compose_first_argument_acts_last(self, tent_up):
        f2 = PLMap.affine(HALF, F(1, 4))
        h = tent_up.compose(f2)
        for x in (F(0), F(1, 3), HALF, F(7, 8), F(1)):
            assert h.apply(x) == tent_up.apply(f2.apply(x))

    def test_compose_merges_collinear_pieces(self):
        f = PLMap.affine(HALF)
        assert f.compose(f).breakpoints == (F(0), F(1))

    def test_outside_domain(self, tent_up):
        with pytest.raises(ValidationError, match="outside"):
            tent_up.apply(F(3, 2))

    def test_decreasing_rejected(self):
        with pytest.raises(ValidationError, match="nondecreasing"):
            PLMap.from_pairs([(0, 1), (1, 0)])

    def test_breakpoints_must_span_unit_interval(self):
        with pytest.raises(ValidationError, match="start at 0"):
            PLMap.from_pairs([(F(1, 4), 0), (1, 1)])

    def test_from_strings(self):
        f = PLMap.from_strings(["0", "1/2", "1"], ["0", "0.25", "1"])
        assert f.apply(HALF) == F(1, 4)

    def test_float_tables_agree(self, tent_up):
        xs = np.array([0.0, 0.2, 0.5, 0.9, 1.0])
        expected = [float(tent_up.apply(F(x))) for x in xs]
        assert tent_up.apply_float(xs) == pytest.approx(expected)

    def test_propagate_keeps_small_widths(self):
        f = PLMap.affine(HALF)
        lo, width = f.propagate_float(np.array([0.25]), np.array([1e-300]))
        assert lo[0] == 0.125
        assert width[0] == pytest.approx(5e-301)

    def test_to_dict(self, tent_up):
        assert tent_up.to_dict() == {"x": ["0", "1/2", "1"], "y": ["0", "1/4", "1"]}


class TestProductMap:
    """Tests for coordinatewise maps."""

    def test_apply_point(self, tent_up):
        g = ProductMap((tent_up, PLMap.affine(HALF)))
        assert g.apply_point((HALF, HALF)) == (F(1, 4), F(1, 4))

    def test_wrong_dimension(self, tent_up):
        g = ProductMap((tent_up, tent_up))
        with pytest.raises(ValidationError):
            g.apply_point((HALF,))

    def test_identity_map(self):
        assert isinstance(identity_map(1), PLMap)
        assert identity_map(3).dimension == 3


class TestIntervalUnion:
    """Tests for finite unions of closed intervals."""

    def test_merges_touching_intervals(self):
        u = IntervalUnion.of((0, "1/4"), ("1/4", "1/2"), ("3/4", 1))
        assert u.intervals == ((F(0), HALF), (F(3, 4), F(1)))

    def test_contains(self):
        u = IntervalUnion.of((0, "1/2"))
        assert u.contains(IntervalUnion.of(("1/8", "1/4")))
        assert not u.contains(IntervalUnion.of(("1/4", "3/4")))
        assert u.contains_point(HALF)

    def test_hausdorff_distance(self):
        u = IntervalUnion.of((0, "1/4"), ("3/4", 1))
        v = IntervalUnion.of((0, 1))
        assert u.hausdorff_distance(v) == F(1, 4)
        assert v.hausdorff_distance(v) == 0

    def test_hausdorff_to_empty_is_infinite(self):
        assert IntervalUnion.full().hausdorff_distance(IntervalUnion.empty()) == float("inf")

    def test_inflate_clips_to_unit_interval(self):
        u = IntervalUnion.of((0, "1/4")).inflate("1/8")
        assert u.intervals == ((F(0), F(3, 8)),)

    def test_reversed_interval_rejected(self):
        with pytest.raises(ValidationError, match="reversed"):
            IntervalUnion.of(("1/2", "1/4"))

    def test_rows(self):
        rows = IntervalUnion.of((0, "1/4")).to_rows()
        assert rows == [{"component": 0, "coordinate": 0, "low": F(0), "high": F(1, 4)}]


class TestBoxUnion:
    """Tests for unions of boxes."""

    def test_adjacent_boxes_merge(self):
        u = BoxUnion(
            (((0, "1/2"), (0, 1)), (("1/2", 1), (0, 1))),
            2,
        )
        assert len(u) == 1
        assert u == BoxUnion.full(2)

    def test_touching_pieces_keep_disjoint_interiors(self):
        l_shape = BoxUnion((((0, 1), (0, "1/2")), ((0, "1/2"), (0, 1))), 2)
        assert len(l_shape) == 2
        first, second = l_shape.boxes
        overlap = [
            (max(a[0], b[0]), min(a[1], b[1])) for a, b in zip(first, second)
        ]
        assert all(lo <= hi for lo, hi in overlap)
        assert any(lo == hi for lo, hi in overlap)

    def test_contains_needs_every_cell(self):
        l_shape = BoxUnion((((0, 1), (0, "1/2")), ((0, "1/2"), ("1/2", 1))), 2)
        assert l_shape.contains(BoxUnion.single([(0, "1/2"), (0, 1)]))
        assert not l_shape.contains(BoxUnion.full(2))

    def test_projection(self):
        u = BoxUnion((((0, "1/4"), (0, 1)), (("3/4", 1), (0, 1))), 2)
        assert len(u.project(0)) == 2
        assert len(u.project(1)) == 1

    def test_sum_metric_diameter(self):
        assert BoxUnion.single([(0, "1/2"), ("1/4", "1/2")]).diameter() == F(3, 4)

    def test_full_space(self):
        assert isinstance(full_space(1), IntervalUnion)
        assert full_space(2).dimension == 2


class TestAsPoint:
    def test_scalar_and_sequence(self):
        assert as_point(HALF, 1) == (HALF,)
        assert as_point(["1/4", 0.5], 2) == (F(1, 4), HALF)

    def test_outside_fiber(self):
        with pytest.raises(ValidationError):
            as_point(2, 1)


class TestFiberOperations:
    """Tests for evaluation, composition along words and exact images."""

    @pytest.fixture
    def system(self, tent_up):
        return SkewSystem((tent_up, PLMap.affine(HALF, F(1, 4))), MarkovSpec.uniform(2))

    def test_compose_applies_first_symbol_first(self, system, tent_up):
        f2 = system.fiber_map(2)
        h = fiber.compose((2, 1), system)
        assert h.apply(HALF) == tent_up.apply(f2.apply(HALF))

    def test_image_along_matches_composition(self, system):
        word = (2, 2, 1, 2)
        u = fiber.image_along(word, system, IntervalUnion.full())
        h = fiber.compose(word, system)
        assert u.intervals == ((h.apply(0), h.apply(1)),)

    def test_diameter_of_backward_image(self, system):
        u = fiber.image_along((2, 2, 2), system, IntervalUnion.full())
        assert fiber.diameter(u) == F(1, 8)

    def test_box_image(self, tent_up):
        g = ProductMap((tent_up, PLMap.affine(HALF)))
        image = fiber.image(g, BoxUnion.full(2))
        assert image == BoxUnion.single([(0, 1), (0, HALF)])

    def test_apply_scalar_and_point(self, tent_up):
        assert fiber.apply(tent_up, HALF) == F(1, 4)
        assert fiber.apply(tent_up, [HALF]) == (F(1, 4),)

    def test_dimension_mismatch(self, tent_up):
        g = ProductMap((tent_up, tent_up))
        with pytest.raises(ValidationError):
            fiber.image(g, IntervalUnion.full())

    def test_system_rejects_mixed_dimensions(self, tent_up):
        with pytest.raises(ValidationError, match="disagree on dimension"):
            SkewSystem((tent_up, ProductMap((tent_up, tent_up))), MarkovSpec.uniform(2))

    def test_system_rejects_alphabet_mismatch(self, tent_up):
        with pytest.raises(ValidationError, match="symbols"):
            SkewSystem((tent_up, tent_up), MarkovSpec.uniform(3))
