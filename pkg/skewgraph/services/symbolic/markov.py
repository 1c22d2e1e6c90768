"""Markov base measures: stationary vectors, admissibility, cylinder measures and sampling."""

import bisect
import logging
from collections.abc import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from skewgraph.exceptions import ValidationError
from skewgraph.models.symbols import ROW_SUM_TOL, Cylinder, MarkovSpec
from skewgraph.services.symbolic.rng import make_rng

logger = logging.getLogger(__name__)


class MarkovValidator:
    """Validates words, lengths and matrices handed to the Markov machinery."""

    MIN_ALPHABET = 2

    @staticmethod
    def validate_transition(matrix: np.ndarray) -> np.ndarray:
        """
        Validate a transition matrix.

        Args:
            matrix: Candidate k x k matrix

        Returns:
            The matrix as a float array

        Raises:
            ValidationError: If the matrix is not square, has negative entries, or a row
                does not sum to 1
        """
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValidationError("Transition matrix must be square", "transition")
        if matrix.shape[0] < MarkovValidator.MIN_ALPHABET:
            raise ValidationError(
                f"Alphabet must have at least {MarkovValidator.MIN_ALPHABET} symbols", "transition"
            )
        if np.any(matrix < 0):
            raise ValidationError("Transition probabilities must be nonnegative", "transition")
        for row, total in enumerate(matrix.sum(axis=1), start=1):
            if abs(total - 1.0) > ROW_SUM_TOL:
                raise ValidationError(f"Row {row} sums to {total:.12g}, expected 1", "transition")
        return matrix

    @staticmethod
    def validate_irreducible(matrix: np.ndarray) -> None:
        """
        Raise if the transition graph is not strongly connected.

        Raises:
            ValidationError: If P is reducible
        """
        n_components, _ = connected_components(matrix > 0, directed=True, connection="strong")
        if n_components != 1:
            raise ValidationError(
                f"Transition matrix is reducible ({n_components} communicating classes)",
                "transition",
            )

    @staticmethod
    def validate_word(word: Sequence[int], alphabet_size: int) -> tuple[int, ...]:
        """
        Validate a symbol word.

        Raises:
            ValidationError: If the word is empty or uses symbols outside 1..k
        """
        word = tuple(int(s) for s in word)
        if not word:
            raise ValidationError("Word must be nonempty", "word")
        for s in word:
            if not 1 <= s <= alphabet_size:
                raise ValidationError(
                    f"Symbol {s} is outside the alphabet 1..{alphabet_size}", "word"
                )
        return word

    @staticmethod
    def validate_length(length: int, name: str = "length") -> None:
        if length < 1:
            raise ValidationError(f"{name} must be at least 1", name)


def stationary_vector(transition) -> np.ndarray:
    """
    Solve p̄P = p̄, Σp̄ = 1 for an irreducible row-stochastic P.

    The singular system (I - P)^T x = 0 has its last equation replaced by the
    normalization, giving a nonsingular linear solve.

    Args:
        transition: Row-stochastic k x k matrix

    Returns:
        The stationary probability vector

    Raises:
        ValidationError: If P is not stochastic or is reducible
    """
    matrix = MarkovValidator.validate_transition(transition)
    MarkovValidator.validate_irreducible(matrix)
    k = matrix.shape[0]
    system = (np.eye(k) - matrix).T
    system[-1, :] = 1.0
    rhs = np.zeros(k)
    rhs[-1] = 1.0
    vector = np.linalg.solve(system, rhs)
    # clip round-off below zero
    vector = np.clip(vector, 0.0, None)
    return vector / vector.sum()


def _matrix_of(spec_or_matrix) -> np.ndarray:
    if isinstance(spec_or_matrix, MarkovSpec):
        return spec_or_matrix.transition
    return np.asarray(spec_or_matrix, dtype=float)


def is_admissible(word: Sequence[int], transition) -> bool:
    """True iff every consecutive transition of `word` has positive probability."""
    word = tuple(word)
    if not word:
        raise ValidationError("Word must be nonempty", "word")
    matrix = _matrix_of(transition)
    return all(matrix[a - 1, b - 1] > 0 for a, b in zip(word, word[1:]))


def first_inadmissible_position(word: Sequence[int], transition) -> int | None:
    """Index i of the first pair (w_i, w_{i+1}) with zero probability, or None."""
    matrix = _matrix_of(transition)
    for i, (a, b) in enumerate(zip(word, word[1:])):
        if matrix[a - 1, b - 1] <= 0:
            return i
    return None


def cylinder_measure(cylinder: Cylinder | Sequence[int], spec: MarkovSpec) -> float:
    """
    Markov measure of a cylinder: p̄_{w_1} · Π p_{w_i w_{i+1}}.

    The measure is shift invariant, so the start index does not enter.
    """
    word = cylinder.word if isinstance(cylinder, Cylinder) else tuple(cylinder)
    MarkovValidator.validate_word(word, spec.alphabet_size)
    value = float(spec.stationary[word[0] - 1])
    for a, b in zip(word, word[1:]):
        value *= spec.p(a, b)
    return value


def _cumulative(spec: MarkovSpec) -> tuple[np.ndarray, np.ndarray]:
    initial = np.cumsum(spec.stationary)
    initial[-1] = 1.0
    rows = np.cumsum(spec.transition, axis=1)
    rows[:, -1] = 1.0
    return initial, rows


def sample_markov(
    spec: MarkovSpec,
    length: int,
    seed: int,
    start: int | None = None,
    rng: np.random.Generator | None = None,
) -> tuple[int, ...]:
    """
    Draw a Markov word with initial law p̄ and transitions P.

    Args:
        spec: Base measure
        length: Number of symbols
        seed: Experiment seed (ignored when `rng` is given)
        start: Optional forced first symbol
        rng: Optional generator to draw from

    Returns:
        The word as a tuple of 1-based symbols
    """
    MarkovValidator.validate_length(length)
    if rng is None:
        rng = make_rng(seed, "markov")
    initial, rows = _cumulative(spec)
    uniforms = rng.random(length)
    cum_rows = [list(r) for r in rows]
    if start is None:
        current = bisect.bisect_right(list(initial), uniforms[0])
    else:
        current = MarkovValidator.validate_word((start,), spec.alphabet_size)[0] - 1
    word = [current + 1]
    for u in uniforms[1:]:
        current = bisect.bisect_right(cum_rows[current], u)
        word.append(current + 1)
    return tuple(word)


def sample_markov_batch(
    spec: MarkovSpec,
    n_words: int,
    length: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """
    Draw `n_words` independent stationary Markov words at once.

    Returns:
        Integer array of shape (n_words, length) with 1-based symbols
    """
    MarkovValidator.validate_length(length)
    MarkovValidator.validate_length(n_words, "n_words")
    initial, rows = _cumulative(spec)
    uniforms = rng.random((n_words, length))
    out = np.empty((n_words, length), dtype=np.int64)
    out[:, 0] = np.searchsorted(initial, uniforms[:, 0], side="right")
    for j in range(1, length):
        out[:, j] = (uniforms[:, j, None] >= rows[out[:, j - 1]]).sum(axis=1)
    return out + 1
