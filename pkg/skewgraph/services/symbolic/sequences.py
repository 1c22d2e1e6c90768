"""Operations on symbol windows: the canonical metric, disjunctive words and stationary samples."""

import itertools
import logging

import numpy as np

from skewgraph.exceptions import AlphabetMismatchError, ValidationError
from skewgraph.models.symbols import MarkovSpec, SymbolWindow
from skewgraph.services.symbolic.markov import (
    MarkovValidator,
    sample_markov,
    sample_markov_batch,
)
from skewgraph.services.symbolic.rng import make_rng

logger = logging.getLogger(__name__)


def symbol_at(theta: SymbolWindow, i: int) -> int:
    return theta.symbol_at(i)


def shift(theta: SymbolWindow, n: int) -> SymbolWindow:
    return theta.shift(n)


def canonical_distance(theta: SymbolWindow, xi: SymbolWindow) -> float:
    """
    d0(θ, ξ) = 2^{-n} with n the least |i| where the sequences differ.

    Agreement is decided on the range covering both cores plus one common period of the
    tails, so equal sequences give exactly 0.

    Raises:
        AlphabetMismatchError: If the windows use different alphabets
    """
    theta.require_alphabet(xi)
    start, stop = theta.decision_range(xi)
    start = min(start, -1)
    stop = max(stop, 1)
    left = np.asarray(theta.symbols(start, stop))
    right = np.asarray(xi.symbols(start, stop))
    mismatches = np.flatnonzero(left != right)
    if mismatches.size == 0:
        return 0.0
    n = int(np.min(np.abs(mismatches + start)))
    return 2.0**-n


def disjunctive_prefix(k: int, max_word_length: int) -> tuple[int, ...]:
    """
    Concatenate every word over {1..k} of lengths 1..max_word_length, shortest first and
    lexicographically within a length.
    """
    if k < 2:
        raise ValidationError("Alphabet size must be at least 2", "k")
    MarkovValidator.validate_length(max_word_length, "max_word_length")
    symbols = range(1, k + 1)
    return tuple(
        s
        for length in range(1, max_word_length + 1)
        for word in itertools.product(symbols, repeat=length)
        for s in word
    )


def disjunctive_window(
    k: int,
    max_word_length: int,
    spec: MarkovSpec,
    length: int,
    seed: int,
    past_length: int = 64,
) -> SymbolWindow:
    """
    A window whose forward part starts with the disjunctive prefix.

    The prefix is followed by `length` Markov symbols so the forward orbit does not close up
    into a periodic one within the iterated range. The past is a stationary Markov sample.

    Args:
        k: Alphabet size
        max_word_length: Longest word the prefix enumerates
        spec: Base measure for the continuation and the past
        length: Number of continuation symbols after the prefix
        seed: Experiment seed
        past_length: Number of past symbols

    Returns:
        The window, with θ_0 the first prefix symbol
    """
    if spec.alphabet_size != k:
        raise AlphabetMismatchError(k, spec.alphabet_size)
    prefix = disjunctive_prefix(k, max_word_length)
    continuation = sample_markov(spec, max(1, length), seed, rng=make_rng(seed, "disjunctive"))
    past = sample_markov(spec, max(1, past_length), seed, rng=make_rng(seed, "disjunctive-past"))
    return SymbolWindow(k, past + prefix + continuation, -len(past), past, continuation)


MAX_WRAP_DRAWS = 1000


def _wrap_admissible(spec: MarkovSpec, blocks: np.ndarray) -> np.ndarray:
    """Rows whose repetition stays admissible: P(last symbol, first symbol) > 0."""
    transition = np.asarray(spec.transition, dtype=float)
    return transition[blocks[:, -1] - 1, blocks[:, 0] - 1] > 0


def _redraw_wraps(spec: MarkovSpec, blocks: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """
    Redraw the blocks whose wrap-around transition has probability zero.

    Raises:
        ValidationError: If some block still cannot be repeated after MAX_WRAP_DRAWS draws
    """
    for _ in range(MAX_WRAP_DRAWS):
        bad = np.flatnonzero(~_wrap_admissible(spec, blocks))
        if bad.size == 0:
            return blocks
        blocks[bad] = sample_markov_batch(spec, int(bad.size), blocks.shape[1], rng)
    raise ValidationError(
        f"No block of length {blocks.shape[1]} with an admissible wrap after "
        f"{MAX_WRAP_DRAWS} draws",
        "word_length",
    )


def _window_from_block(k: int, block: tuple[int, ...], half: int) -> SymbolWindow:
    return SymbolWindow(k, block, -half, block, block)


def sample_window(
    spec: MarkovSpec,
    word_length: int,
    seed: int,
    rng: np.random.Generator | None = None,
) -> SymbolWindow:
    """
    Stationary window over indices [-L, L) whose tails repeat the sampled block.

    Blocks whose last-to-first transition has probability zero are redrawn, so the periodic
    tails stay admissible.

    Args:
        spec: Base measure
        word_length: Half-length L
        seed: Experiment seed (ignored when `rng` is given)
        rng: Optional generator

    Returns:
        The window
    """
    MarkovValidator.validate_length(word_length, "word_length")
    if rng is None:
        rng = make_rng(seed, "window")
    block = sample_markov(spec, 2 * word_length, seed, rng=rng)
    blocks = _redraw_wraps(spec, np.array([block], dtype=np.int64), rng)
    return _window_from_block(
        spec.alphabet_size, tuple(int(s) for s in blocks[0]), word_length
    )


def sample_windows(
    spec: MarkovSpec,
    n_windows: int,
    word_length: int,
    seed: int,
    stream: str = "windows",
) -> list[SymbolWindow]:
    """Draw `n_windows` independent stationary windows of half-length `word_length`; see sample_window."""
    MarkovValidator.validate_length(word_length, "word_length")
    rng = make_rng(seed, stream)
    blocks = _redraw_wraps(spec, sample_markov_batch(spec, n_windows, 2 * word_length, rng), rng)
    logger.debug(f"Sampled {n_windows} windows of half-length {word_length}")
    return [
        _window_from_block(spec.alphabet_size, tuple(int(s) for s in row), word_length)
        for row in blocks
    ]
