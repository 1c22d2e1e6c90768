"""Symbol sequences, cylinders and Markov base measures.

Two-sided sequences over {1,...,k} are represented by eventually periodic windows: a finite
core placed at a given offset, flanked by tails that repeat forever to the left and right.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from itertools import chain

import numpy as np

from skewgraph.exceptions import AlphabetMismatchError, ValidationError

ROW_SUM_TOL = 1e-12
STATIONARY_TOL = 1e-10


def _check_symbols(symbols: tuple[int, ...], alphabet_size: int, name: str) -> None:
    for s in symbols:
        if not 1 <= s <= alphabet_size:
            raise ValidationError(
                f"Symbol {s} in {name} is outside the alphabet 1..{alphabet_size}", name
            )


def _repeat(block: tuple[int, ...], phase: int, length: int) -> tuple[int, ...]:
    """Read `length` symbols of the periodic sequence `block` starting at `phase`."""
    if length <= 0:
        return ()
    period = len(block)
    reps = (phase + length) // period + 1
    return (block * reps)[phase : phase + length]


@dataclass(frozen=True, eq=False)
class SymbolWindow:
    """An eventually periodic two-sided sequence θ = (θ_i) over {1,...,k}.

    Index ``core_offset + j`` reads ``core[j]``. Indices left of the core read ``left_tail``
    periodically, aligned so that ``core_offset - 1`` reads its last symbol; indices right of
    the core read ``right_tail`` periodically starting with its first symbol.
    """

    alphabet_size: int
    core: tuple[int, ...]
    core_offset: int
    left_tail: tuple[int, ...]
    right_tail: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "core", tuple(int(s) for s in self.core))
        object.__setattr__(self, "left_tail", tuple(int(s) for s in self.left_tail))
        object.__setattr__(self, "right_tail", tuple(int(s) for s in self.right_tail))
        if self.alphabet_size < 2:
            raise ValidationError("Alphabet size must be at least 2", "alphabet_size")
        if not self.left_tail or not self.right_tail:
            raise ValidationError("Tails must be nonempty", "tails")
        _check_symbols(self.core, self.alphabet_size, "core")
        _check_symbols(self.left_tail, self.alphabet_size, "left_tail")
        _check_symbols(self.right_tail, self.alphabet_size, "right_tail")

    @classmethod
    def constant(cls, alphabet_size: int, symbol: int) -> "SymbolWindow":
        """The constant sequence (..., s, s, s, ...)."""
        return cls(alphabet_size, (), 0, (symbol,), (symbol,))

    @classmethod
    def periodic(cls, alphabet_size: int, block: tuple[int, ...] | list[int]) -> "SymbolWindow":
        """The periodic sequence with θ_0,...,θ_{p-1} = block."""
        block = tuple(block)
        return cls(alphabet_size, (), 0, block, block)

    @classmethod
    def from_past(
        cls,
        alphabet_size: int,
        past: tuple[int, ...] | list[int],
        tail: tuple[int, ...] | list[int],
        future: tuple[int, ...] | list[int] = (),
        future_tail: tuple[int, ...] | list[int] | None = None,
    ) -> "SymbolWindow":
        """
        Build a window from its past read backwards.

        Args:
            alphabet_size: k
            past: (θ_{-1}, θ_{-2}, ..., θ_{-ℓ}), nearest symbol first
            tail: periodic continuation further into the past, again nearest first
            future: (θ_0, θ_1, ...) explicit forward symbols
            future_tail: periodic forward continuation, defaults to `tail` reversed

        Returns:
            The window
        """
        past = tuple(past)
        tail = tuple(tail)
        future = tuple(future)
        core = tuple(reversed(past)) + future
        left_tail = tuple(reversed(tail))
        right_tail = tuple(future_tail) if future_tail is not None else left_tail
        return cls(alphabet_size, core, -len(past), left_tail, right_tail)

    @property
    def core_end(self) -> int:
        """First index right of the core."""
        return self.core_offset + len(self.core)

    @cached_property
    def tail_period(self) -> int:
        """Least common multiple of both tail periods."""
        return math.lcm(len(self.left_tail), len(self.right_tail))

    def symbol_at(self, i: int) -> int:
        """Return θ_i, resolving tails periodically."""
        if i < self.core_offset:
            return self.left_tail[(i - self.core_offset) % len(self.left_tail)]
        if i < self.core_end:
            return self.core[i - self.core_offset]
        return self.right_tail[(i - self.core_end) % len(self.right_tail)]

    def symbols(self, start: int, stop: int) -> tuple[int, ...]:
        """Return (θ_start, ..., θ_{stop-1})."""
        if stop <= start:
            return ()
        parts: list[tuple[int, ...]] = []
        i = start
        if i < self.core_offset:
            end = min(stop, self.core_offset)
            phase = (i - self.core_offset) % len(self.left_tail)
            parts.append(_repeat(self.left_tail, phase, end - i))
            i = end
        if i < stop and i < self.core_end:
            end = min(stop, self.core_end)
            parts.append(self.core[i - self.core_offset : end - self.core_offset])
            i = end
        if i < stop:
            phase = (i - self.core_end) % len(self.right_tail)
            parts.append(_repeat(self.right_tail, phase, stop - i))
        return tuple(chain.from_iterable(parts))

    def backward_word(self, depth: int) -> tuple[int, ...]:
        """(θ_{-depth}, ..., θ_{-1}): the past in application order, innermost map first."""
        return self.symbols(-depth, 0)

    def forward_word(self, length: int) -> tuple[int, ...]:
        """(θ_0, ..., θ_{length-1})."""
        return self.symbols(0, length)

    def shift(self, n: int) -> "SymbolWindow":
        """σ^n(θ): the window whose i-th symbol is θ_{i+n}."""
        if n == 0:
            return self
        return SymbolWindow(
            self.alphabet_size,
            self.core,
            self.core_offset - n,
            self.left_tail,
            self.right_tail,
        )

    def decision_range(self, other: "SymbolWindow") -> tuple[int, int]:
        """Index range on which agreement implies agreement everywhere."""
        left = math.lcm(len(self.left_tail), len(other.left_tail))
        right = math.lcm(len(self.right_tail), len(other.right_tail))
        start = min(self.core_offset, other.core_offset) - left
        stop = max(self.core_end, other.core_end) + right
        return start, stop

    def agrees_with(self, other: "SymbolWindow", start: int, stop: int) -> bool:
        """True iff both windows carry the same symbols on [start, stop)."""
        return self.symbols(start, stop) == other.symbols(start, stop)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymbolWindow):
            return NotImplemented
        if self.alphabet_size != other.alphabet_size:
            return False
        start, stop = self.decision_range(other)
        return self.agrees_with(other, start, stop)

    def __hash__(self) -> int:
        return hash((self.alphabet_size, self.symbols(-8, 8)))

    def __repr__(self) -> str:
        return (
            f"SymbolWindow(k={self.alphabet_size}, ...{self.left_tail}|"
            f"{self.core}@{self.core_offset}|{self.right_tail}...)"
        )

    def require_alphabet(self, other: "SymbolWindow") -> None:
        """Raise if the two windows live over different alphabets."""
        if self.alphabet_size != other.alphabet_size:
            raise AlphabetMismatchError(self.alphabet_size, other.alphabet_size)


@dataclass(frozen=True)
class Cylinder:
    """The cylinder [m; a_1 ... a_ℓ] = {θ : θ_m = a_1, ..., θ_{m+ℓ-1} = a_ℓ}."""

    start_index: int
    word: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "word", tuple(int(s) for s in self.word))
        if not self.word:
            raise ValidationError("Cylinder word must be nonempty", "word")
        if any(s < 1 for s in self.word):
            raise ValidationError("Cylinder symbols must be positive", "word")

    @property
    def stop_index(self) -> int:
        return self.start_index + len(self.word)

    def contains(self, theta: SymbolWindow) -> bool:
        """True iff θ agrees with the word on positions m, ..., m+ℓ-1."""
        return theta.symbols(self.start_index, self.stop_index) == self.word

    def shifted(self, n: int) -> "Cylinder":
        """σ^n(C): the same word read n positions further left."""
        return Cylinder(self.start_index - n, self.word)

    def preimage(self, n: int) -> "Cylinder":
        """σ^{-n}(C) = {θ : σ^n θ ∈ C}."""
        return Cylinder(self.start_index + n, self.word)


@dataclass(frozen=True, eq=False)
class MarkovSpec:
    """A transition matrix together with its stationary probability vector."""

    transition: np.ndarray
    stationary: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        matrix = np.asarray(self.transition, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 2:
            raise ValidationError(
                "Transition matrix must be square of size at least 2", "transition"
            )
        if np.any(matrix < 0):
            raise ValidationError("Transition probabilities must be nonnegative", "transition")
        sums = matrix.sum(axis=1)
        for row, total in enumerate(sums, start=1):
            if abs(total - 1.0) > ROW_SUM_TOL:
                raise ValidationError(f"Row {row} sums to {total:.12g}, expected 1", "transition")
        matrix.setflags(write=False)
        object.__setattr__(self, "transition", matrix)

        if self.stationary is None:
            from skewgraph.services.symbolic.markov import stationary_vector

            vector = stationary_vector(matrix)
        else:
            vector = np.asarray(self.stationary, dtype=float)
        if vector.shape != (matrix.shape[0],):
            raise ValidationError("Stationary vector has the wrong length", "stationary")
        if np.any(vector < 0) or abs(vector.sum() - 1.0) > STATIONARY_TOL:
            raise ValidationError("Stationary vector must be a probability vector", "stationary")
        if np.max(np.abs(vector @ matrix - vector)) > STATIONARY_TOL:
            raise ValidationError("Stationary vector is not invariant under P", "stationary")
        vector = vector.copy()
        vector.setflags(write=False)
        object.__setattr__(self, "stationary", vector)

    @classmethod
    def from_transition(cls, transition) -> "MarkovSpec":
        """Build the spec, solving for the stationary vector."""
        return cls(np.asarray(transition, dtype=float))

    @classmethod
    def bernoulli(cls, weights) -> "MarkovSpec":
        """Bernoulli measure: every row equals `weights`."""
        weights = np.asarray(weights, dtype=float)
        return cls(np.tile(weights, (len(weights), 1)), weights)

    @classmethod
    def uniform(cls, alphabet_size: int) -> "MarkovSpec":
        """Bernoulli(1/k, ..., 1/k)."""
        return cls.bernoulli(np.full(alphabet_size, 1.0 / alphabet_size))

    @property
    def alphabet_size(self) -> int:
        return int(self.transition.shape[0])

    def p(self, i: int, j: int) -> float:
        """Transition probability p_ij with 1-based symbols."""
        return float(self.transition[i - 1, j - 1])

    def has_full_row(self) -> bool:
        """True iff some row u has p_uj > 0 for every j."""
        return bool(np.any(np.all(self.transition > 0, axis=1)))

    def to_dict(self) -> dict:
        return {
            "transition": self.transition.tolist(),
            "stationary": self.stationary.tolist(),
        }
