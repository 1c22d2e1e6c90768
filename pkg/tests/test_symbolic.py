"""Tests for symbol windows, cylinders, Markov measures and random streams."""

import hashlib

import numpy as np
import pytest

pytestmark = pytest.mark.unit

from skewgraph.exceptions import AlphabetMismatchError, ValidationError
from skewgraph.models.symbols import Cylinder, MarkovSpec, SymbolWindow
from skewgraph.services.symbolic import (
    canonical_distance,
    cylinder_measure,
    disjunctive_prefix,
    disjunctive_window,
    first_inadmissible_position,
    is_admissible,
    make_rng,
    sample_markov,
    sample_markov_batch,
    sample_window,
    sample_windows,
    stationary_vector,
    stream_id,
)

LAZY = [[0.9, 0.1], [0.5, 0.5]]
NO_REPEAT_ONE = [[0.0, 1.0], [0.5, 0.5]]


class TestSymbolWindow:
    """Tests for eventually periodic windows."""

    def test_from_past_reads_nearest_symbol_first(self):
        theta = SymbolWindow.from_past(2, (2, 1), (1,))
        assert theta.symbol_at(-1) == 2
        assert theta.symbol_at(-2) == 1
        assert theta.symbol_at(-7) == 1

    def test_backward_word_is_in_application_order(self):
        theta = SymbolWindow.from_past(2, (2, 1), (1,))
        assert theta.backward_word(3) == (1, 1, 2)

    def test_periodic_tail(self):
        theta = SymbolWindow.from_past(2, (), (1, 2))
        assert [theta.symbol_at(-i) for i in range(1, 7)] == [1, 2, 1, 2, 1, 2]

    def test_future_symbols(self):
        theta = SymbolWindow.from_past(3, (1,), (2,), future=(3, 1), future_tail=(2,))
        assert theta.forward_word(5) == (3, 1, 2, 2, 2)

    def test_shift(self):
        theta = SymbolWindow.from_past(2, (1, 2), (1,), future=(2, 2, 1))
        shifted = theta.shift(2)
        for i in range(-6, 6):
            assert shifted.symbol_at(i) == theta.symbol_at(i + 2)

    def test_equality_ignores_representation(self):
        assert SymbolWindow.constant(2, 1) == SymbolWindow.from_past(2, (1, 1, 1), (1,))
        assert SymbolWindow.constant(2, 1) != SymbolWindow.constant(2, 2)

    def test_symbol_outside_alphabet(self):
        with pytest.raises(ValidationError, match="outside the alphabet"):
            SymbolWindow.from_past(2, (3,), (1,))

    def test_empty_tail_rejected(self):
        with pytest.raises(ValidationError, match="Tails must be nonempty"):
            SymbolWindow.from_past(2, (1,), ())


class TestCanonicalDistance:
    """Tests for d0."""

    def test_equal_windows(self):
        theta = SymbolWindow.periodic(2, (1, 2))
        assert canonical_distance(theta, theta.shift(2)) == 0.0

    def test_difference_at_zero(self):
        assert canonical_distance(SymbolWindow.constant(2, 1), SymbolWindow.constant(2, 2)) == 1.0

    def test_difference_in_future(self):
        theta = SymbolWindow.from_past(2, (), (1,), future=(1, 1, 1, 2))
        assert canonical_distance(SymbolWindow.constant(2, 1), theta) == 0.125

    def test_difference_in_past(self):
        theta = SymbolWindow.from_past(2, (1, 2), (1,))
        assert canonical_distance(SymbolWindow.constant(2, 1), theta) == 0.25

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatchError):
            canonical_distance(SymbolWindow.constant(2, 1), SymbolWindow.constant(3, 1))


class TestCylinder:
    """Tests for cylinder sets."""

    def test_contains(self):
        theta = SymbolWindow.from_past(2, (), (1,), future=(1, 2))
        assert Cylinder(0, (1, 2)).contains(theta)
        assert not Cylinder(0, (2, 2)).contains(theta)

    def test_preimage_matches_shift(self):
        theta = SymbolWindow.from_past(2, (), (1,), future=(1, 1, 1, 2))
        cylinder = Cylinder(0, (1, 2))
        assert cylinder.preimage(2).contains(theta)
        assert cylinder.contains(theta.shift(2))

    def test_shifted(self):
        assert Cylinder(3, (1,)).shifted(2) == Cylinder(1, (1,))

    def test_empty_word_rejected(self):
        with pytest.raises(ValidationError):
            Cylinder(0, ())


class TestMarkovSpec:
    """Tests for transition matrices and stationary vectors."""

    def test_stationary_vector(self):
        spec = MarkovSpec.from_transition(LAZY)
        assert spec.stationary == pytest.approx([5 / 6, 1 / 6])

    def test_stationary_vector_function(self):
        assert stationary_vector(NO_REPEAT_ONE) == pytest.approx([1 / 3, 2 / 3])

    def test_row_sum_rejected(self):
        with pytest.raises(ValidationError, match="Row 2 sums to 0.9"):
            MarkovSpec.from_transition([[0.5, 0.5], [0.4, 0.5]])

    def test_reducible_rejected(self):
        with pytest.raises(ValidationError, match="reducible"):
            MarkovSpec.from_transition([[1.0, 0.0], [0.0, 1.0]])

    def test_wrong_stationary_rejected(self):
        with pytest.raises(ValidationError, match="not invariant"):
            MarkovSpec(np.array(LAZY), np.array([0.5, 0.5]))

    def test_full_row(self):
        assert MarkovSpec.uniform(3).has_full_row()
        assert not MarkovSpec.from_transition([[0.0, 1.0], [1.0, 0.0]]).has_full_row()

    def test_transition_probability_is_one_based(self):
        assert MarkovSpec.from_transition(LAZY).p(1, 2) == pytest.approx(0.1)

    def test_cylinder_measure(self):
        spec = MarkovSpec.from_transition(LAZY)
        assert cylinder_measure(Cylinder(5, (1, 2)), spec) == pytest.approx(5 / 6 * 0.1)
        assert cylinder_measure((2,), spec) == pytest.approx(1 / 6)


class TestAdmissibility:
    """Tests for zero-probability transitions."""

    def test_admissible(self):
        assert is_admissible((2, 1, 2, 2), NO_REPEAT_ONE)
        assert first_inadmissible_position((2, 1, 2, 2), NO_REPEAT_ONE) is None

    def test_inadmissible_position(self):
        assert not is_admissible((2, 1, 1), NO_REPEAT_ONE)
        assert first_inadmissible_position((2, 1, 1), NO_REPEAT_ONE) == 1

    def test_samples_avoid_forbidden_transitions(self):
        spec = MarkovSpec.from_transition(NO_REPEAT_ONE)
        word = sample_markov(spec, 500, seed=3)
        assert all(not (a == 1 and b == 1) for a, b in zip(word, word[1:]))


class TestRandomStreams:
    """Tests for seeded counter-based streams."""

    def test_same_path_same_draws(self):
        assert np.array_equal(make_rng(7, "a", 1).random(5), make_rng(7, "a", 1).random(5))

    def test_paths_are_independent(self):
        assert not np.array_equal(make_rng(7, "a").random(5), make_rng(7, "b").random(5))
        assert not np.array_equal(make_rng(7, "a", 0).random(5), make_rng(7, "a", 1).random(5))

    def test_negative_seed_rejected(self):
        with pytest.raises(ValidationError):
            make_rng(-1, "a")

    def test_stream_id_is_stable(self):
        expected = int.from_bytes(hashlib.sha256(b"windows").digest()[:4], "big")
        assert stream_id("windows") == expected


class TestSampling:
    """Tests for Markov words and stationary windows."""

    def test_batch_shape(self):
        words = sample_markov_batch(MarkovSpec.uniform(3), 10, 20, make_rng(0, "t"))
        assert words.shape == (10, 20)
        assert words.min() >= 1 and words.max() <= 3

    def test_batch_frequencies_follow_stationary_law(self):
        spec = MarkovSpec.from_transition(LAZY)
        words = sample_markov_batch(spec, 4000, 3, make_rng(0, "freq"))
        assert np.mean(words[:, 0] == 1) == pytest.approx(5 / 6, abs=0.03)
        assert np.mean(words[:, 2] == 1) == pytest.approx(5 / 6, abs=0.03)

    def test_sample_window_spans_both_sides(self):
        theta = sample_window(MarkovSpec.uniform(2), 8, seed=1)
        assert len(theta.symbols(-8, 8)) == 16
        assert theta == sample_window(MarkovSpec.uniform(2), 8, seed=1)

    def test_sample_windows_reproducible(self):
        spec = MarkovSpec.uniform(2)
        first = sample_windows(spec, 5, 16, seed=4, stream="s")
        again = sample_windows(spec, 5, 16, seed=4, stream="s")
        other = sample_windows(spec, 5, 16, seed=4, stream="t")
        assert first == again
        assert first != other

    def test_windows_repeat_admissibly(self):
        spec = MarkovSpec.from_transition(NO_REPEAT_ONE)
        windows = sample_windows(spec, 200, 3, seed=5)
        windows.append(sample_window(spec, 3, seed=5))
        for theta in windows:
            assert is_admissible(theta.symbols(-12, 12), NO_REPEAT_ONE)

    def test_unrepeatable_blocks_rejected(self):
        cycle = [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]
        with pytest.raises(ValidationError):
            sample_window(MarkovSpec.from_transition(cycle), 1, seed=0)


class TestDisjunctive:
    """Tests for disjunctive sequences."""

    def test_prefix_enumerates_words(self):
        assert disjunctive_prefix(2, 2) == (1, 2, 1, 1, 1, 2, 2, 1, 2, 2)

    def test_window_starts_with_prefix(self):
        spec = MarkovSpec.uniform(2)
        prefix = disjunctive_prefix(2, 3)
        theta = disjunctive_window(2, 3, spec, length=10, seed=0, past_length=8)
        assert theta.forward_word(len(prefix)) == prefix

    def test_every_word_occurs(self):
        theta = disjunctive_window(2, 3, MarkovSpec.uniform(2), length=10, seed=0)
        forward = theta.forward_word(200)
        text = "".join(str(s) for s in forward)
        for word in ("111", "212", "122", "221"):
            assert word in text

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatchError):
            disjunctive_window(3, 2, MarkovSpec.uniform(2), length=5, seed=0)
