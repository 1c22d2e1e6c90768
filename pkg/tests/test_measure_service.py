"""Tests for empirical measures, pushforwards and Wasserstein distances."""

from fractions import Fraction

import numpy as np
import pytest

pytestmark = pytest.mark.unit

from skewgraph.config import Settings
from skewgraph.exceptions import (
    BudgetExceededError,
    DiscardFractionTooHighError,
    EmptyCylinderError,
    ValidationError,
)
from skewgraph.models.measure import Atom, EmpiricalMeasure, FiberLaw
from skewgraph.models.symbols import Cylinder, SymbolWindow
from skewgraph.services import MeasureService
from skewgraph.services.measure_service import (
    base_distance_matrix,
    fiber_distance_matrix,
    measure_from_points,
    truncation_bound,
)
from skewgraph.services.zoo import build_identity
from tests.conftest import TestDataGenerator

F = Fraction


@pytest.fixture
def small_pair(measure_service, binary_entry):
    """Two independent three-atom measures over the binary system."""
    mu = measure_service.sample_with_marginal(
        binary_entry.system, 3, FiberLaw.uniform(), word_length=8, seed=1
    )
    nu = measure_service.sample_with_marginal(
        binary_entry.system, 3, FiberLaw.uniform(), word_length=8, seed=2
    )
    return mu, nu


class TestEmpiricalMeasure:
    """Tests for the measure model."""

    def test_uniform_weights(self):
        windows = [SymbolWindow.constant(2, 1), SymbolWindow.constant(2, 2)]
        mu = measure_from_points(windows, [(0,), ("1/2",)])
        assert [a.weight for a in mu.atoms] == [F(1, 2), F(1, 2)]

    def test_renormalized(self):
        windows = [SymbolWindow.constant(2, 1), SymbolWindow.constant(2, 2)]
        mu = measure_from_points(windows, [(0,), (1,)], weights=[1, 3])
        assert [a.weight for a in mu.atoms] == [F(1, 4), F(3, 4)]

    def test_weights_must_sum_to_one(self):
        atom = Atom(SymbolWindow.constant(2, 1), (F(0),), F(1, 2))
        with pytest.raises(ValidationError, match="sum"):
            EmpiricalMeasure((atom,))

    def test_points_stay_in_fiber(self):
        with pytest.raises(ValidationError):
            measure_from_points([SymbolWindow.constant(2, 1)], [(2,)])

    def test_empty_measure_rejected(self):
        with pytest.raises(ValidationError):
            EmpiricalMeasure(())


class TestSampling:
    """Tests for measures with the Markov marginal."""

    def test_dirac_fiber_law(self, measure_service, binary_entry):
        mu = measure_service.sample_with_marginal(
            binary_entry.system, 10, FiberLaw.dirac("1/3"), word_length=8, seed=0
        )
        assert len(mu) == 10
        assert all(a.point == (F(1, 3),) for a in mu.atoms)

    def test_grid_fiber_law(self, measure_service, binary_entry):
        mu = measure_service.sample_with_marginal(
            binary_entry.system, 4, FiberLaw.grid(4), word_length=8, seed=0
        )
        assert [a.point for a in mu.atoms] == [(F(1, 8),), (F(3, 8),), (F(5, 8),), (F(7, 8),)]

    def test_uniform_fiber_law_is_seeded(self, measure_service, binary_entry):
        first = measure_service.sample_with_marginal(
            binary_entry.system, 5, FiberLaw.uniform(), word_length=8, seed=9
        )
        again = measure_service.sample_with_marginal(
            binary_entry.system, 5, FiberLaw.uniform(), word_length=8, seed=9
        )
        assert [a.point for a in first.atoms] == [a.point for a in again.atoms]

    def test_attracting_measure_sample(self, measure_service, binary_entry):
        mu = measure_service.attracting_measure_sample(
            binary_entry.system, 20, word_length=40, seed=0
        )
        assert len(mu) == 20
        assert mu.discarded_fraction == 0.0

    def test_attracting_sample_without_contraction(self):
        service = MeasureService(Settings(max_depth=64))
        with pytest.raises(DiscardFractionTooHighError):
            service.attracting_measure_sample(build_identity().system, 10, word_length=8, seed=0)


class TestPushforward:
    """Tests for F^n_* μ."""

    def test_single_atom(self, measure_service, binary_entry):
        mu = measure_from_points([SymbolWindow.constant(2, 2)], [(0,)])
        pushed = measure_service.pushforward(mu, binary_entry.system, 3)
        assert pushed.atoms[0].point == (F(7, 8),)
        assert pushed.atoms[0].window == SymbolWindow.constant(2, 2)

    def test_shifts_the_base(self, measure_service, binary_entry):
        theta = TestDataGenerator.window(2, (), (1,), future=(2, 1, 2))
        mu = measure_from_points([theta], [("1/2",)])
        pushed = measure_service.pushforward(mu, binary_entry.system, 2)
        assert pushed.atoms[0].window == theta.shift(2)
        assert pushed.atoms[0].point == (F(3, 8),)

    def test_zero_steps(self, measure_service, binary_entry):
        mu = measure_from_points([SymbolWindow.constant(2, 2)], [(0,)])
        assert measure_service.pushforward(mu, binary_entry.system, 0) is mu

    def test_negative_steps(self, measure_service, binary_entry):
        mu = measure_from_points([SymbolWindow.constant(2, 2)], [(0,)])
        with pytest.raises(ValidationError):
            measure_service.pushforward(mu, binary_entry.system, -1)


class TestDisintegration:
    """Tests for the fiber-measure pushforward identity."""

    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_forward_equals_backward(self, measure_service, binary_entry, n):
        mu = measure_service.sample_with_marginal(
            binary_entry.system, 40, FiberLaw.grid(5), word_length=8, seed=0
        )
        word = mu.atoms[0].window.shift(n).symbols(-2, 0)
        check = measure_service.disintegration_pushforward_check(
            mu, binary_entry.system, n, Cylinder(-2, word)
        )
        assert check.forward
        assert check.equal

    def test_empty_cylinder(self, measure_service, binary_entry):
        mu = measure_from_points([SymbolWindow.constant(2, 1)], [("1/2",)])
        with pytest.raises(EmptyCylinderError):
            measure_service.disintegration_pushforward_check(
                mu, binary_entry.system, 1, Cylinder(0, (2,))
            )


class TestWasserstein:
    """Tests for the exact transport solver."""

    def test_matches_brute_force(self, measure_service, small_pair):
        mu, nu = small_pair
        exact = measure_service.wasserstein_d2(mu, nu, base_depth=8)
        brute = measure_service.brute_force_wasserstein(mu, nu, base_depth=8)
        assert exact == pytest.approx(brute, abs=1e-12)

    def test_self_distance_is_zero(self, measure_service, small_pair):
        mu, _ = small_pair
        assert measure_service.wasserstein_d2(mu, mu, base_depth=8) == pytest.approx(0.0)

    def test_symmetric(self, measure_service, small_pair):
        mu, nu = small_pair
        assert measure_service.wasserstein_d2(mu, nu) == pytest.approx(
            measure_service.wasserstein_d2(nu, mu)
        )

    def test_single_atoms(self, measure_service):
        mu = measure_from_points([SymbolWindow.constant(2, 1)], [(0,)])
        nu = measure_from_points([SymbolWindow.constant(2, 2)], [("1/4",)])
        assert measure_service.wasserstein_d2(mu, nu) == pytest.approx(1.25)

    def test_transport_plan_marginals(self, measure_service, small_pair):
        mu, nu = small_pair
        plan = measure_service.transport_plan(mu, nu, base_depth=8)
        assert plan.coupling.sum(axis=1) == pytest.approx(mu.weights_array())
        assert plan.coupling.sum(axis=0) == pytest.approx(nu.weights_array())
        assert plan.cost == pytest.approx(measure_service.wasserstein_d2(mu, nu, base_depth=8))
        assert plan.error_bound == truncation_bound(8)

    def test_budget(self, small_pair):
        mu, nu = small_pair
        service = MeasureService(Settings(ot_atom_budget=4))
        with pytest.raises(BudgetExceededError):
            service.wasserstein_d2(mu, nu)

    def test_brute_force_size_limit(self, measure_service):
        windows = [SymbolWindow.constant(2, 1)] * 9
        mu = measure_from_points(windows, [(0,)] * 9)
        with pytest.raises(ValidationError):
            measure_service.brute_force_wasserstein(mu, mu)

    def test_distance_matrices(self):
        left = [SymbolWindow.constant(2, 1)]
        right = [SymbolWindow.constant(2, 1), SymbolWindow.from_past(2, (2,), (1,))]
        assert base_distance_matrix(left, right, 4).tolist() == [[0.0, 0.5]]
        points = fiber_distance_matrix(np.array([[0.0, 0.0]]), np.array([[0.25, 0.5]]))
        assert points.tolist() == [[0.75]]


class TestConvergenceCurves:
    """Tests for convergence toward the attracting measure."""

    def test_paired_curve_decays(self, measure_service, binary_entry):
        mu0 = measure_service.sample_with_marginal(
            binary_entry.system, 20, FiberLaw.uniform(), word_length=40, seed=0
        )
        rows = measure_service.convergence_curve(
            binary_entry.system, mu0, [0, 10, 20], seed=0, base_depth=8, reference="paired"
        )
        assert [r.n for r in rows] == [0, 10, 20]
        assert rows[1].distance <= 2.0**-10 + 1e-8
        assert rows[2].distance <= 2.0**-20 + 1e-8
        assert rows[0].error_bound == pytest.approx(2e-9 + truncation_bound(8))

    def test_fresh_curve_rows(self, measure_service, binary_entry):
        mu0 = measure_service.sample_with_marginal(
            binary_entry.system, 10, FiberLaw.uniform(), word_length=20, seed=0
        )
        rows = measure_service.convergence_curve(
            binary_entry.system, mu0, [0, 5], seed=1, base_depth=4, word_length=20
        )
        assert len(rows) == 2
        assert all(r.distance >= 0 for r in rows)
        assert rows[0].error_bound == rows[1].error_bound

    def test_unknown_reference(self, measure_service, binary_entry):
        mu0 = measure_from_points([SymbolWindow.constant(2, 1)], [(0,)])
        with pytest.raises(ValidationError):
            measure_service.convergence_curve(binary_entry.system, mu0, [0], 0, reference="x")

    def test_pointwise_sync(self, measure_service, binary_entry):
        theta = TestDataGenerator.window(2, (2,), (1, 2), future=(2, 1, 1, 2))
        rows = measure_service.pointwise_sync_curve(
            binary_entry.system, theta, "1/3", [0, 5, 20]
        )
        assert all(r.converged for r in rows)
        assert rows[0].distance > rows[1].distance > rows[2].distance
        assert rows[2].distance <= 2.0**-20 + 1e-8

    def test_realm_of_attraction(self, measure_service, binary_entry):
        mu = measure_service.sample_with_marginal(
            binary_entry.system, 30, FiberLaw.uniform(), word_length=64, seed=0
        )
        fraction = measure_service.realm_of_attraction_fraction(mu, binary_entry.system, 40, 1e-6)
        assert fraction == pytest.approx(1.0)

    def test_concentration(self, measure_service, binary_entry):
        theta = TestDataGenerator.window(2, (1, 2), (2, 1))
        result = measure_service.lemma_concentration(
            theta, binary_entry.system, [0, "1/2", 1], 30
        )
        assert result.final_diameter == pytest.approx(2.0**-30)
        assert result.max_deviation <= 2.0**-30
        assert result.spread <= 2.0**-30
        assert result.coding.converged

    def test_concentration_at_shallow_depth(self, measure_service, binary_entry):
        theta = TestDataGenerator.window(2, (1, 2), (2, 1))
        result = measure_service.lemma_concentration(
            theta, binary_entry.system, [0, "1/2", 1], 5
        )
        assert result.final_diameter == pytest.approx(2.0**-5)
        assert result.max_deviation <= 2.0**-6
        assert result.coding.converged
        assert result.coding.depth_used > 5
