"""Vectorized floating-point propagation of boxes through fiber maps.

Boxes are carried as (low corner, widths) pairs of shape (n, m). Symbol 0 in a word matrix
means "skip", which lets rows of different depth share one right-aligned matrix.
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from skewgraph.models.sets import FiberSet
from skewgraph.models.symbols import SymbolWindow
from skewgraph.models.system import SkewSystem

logger = logging.getLogger(__name__)

CHUNK_SIZE = 1024
INITIAL_DEPTH = 16
SKIP = 0


def box_arrays(u: FiberSet, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Enclosing box of u repeated n times as (low, width) arrays."""
    hull = u.enclosing()
    if u.dimension == 1:
        hull = (hull,)
    lo = np.array([float(a) for a, _ in hull])
    width = np.array([float(b) - float(a) for a, b in hull])
    return np.tile(lo, (n, 1)), np.tile(width, (n, 1))


def right_aligned_words(windows: Sequence[SymbolWindow], depths: Sequence[int]) -> np.ndarray:
    """Row i holds (θ_{-d_i}, ..., θ_{-1}) flush right, padded on the left with SKIP."""
    width = max(depths) if len(depths) else 0
    out = np.full((len(windows), width), SKIP, dtype=np.int64)
    for i, (w, d) in enumerate(zip(windows, depths)):
        if d > 0:
            out[i, width - d :] = w.backward_word(int(d))
    return out


class FloatEngine:
    """Applies the fiber maps of a system to many boxes at once."""

    def __init__(self, system: SkewSystem):
        self.system = system
        self.dimension = system.fiber_dimension
        self._factors = [f.factors for f in system.fiber_maps]

    def step(
        self, symbols: np.ndarray, lo: np.ndarray, width: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Apply f_{symbols[i]} to box i."""
        new_lo = lo.copy()
        new_width = width.copy()
        for s, factors in enumerate(self._factors, start=1):
            mask = symbols == s
            if not mask.any():
                continue
            for c, g in enumerate(factors):
                a, w = g.propagate_float(lo[mask, c], width[mask, c])
                new_lo[mask, c] = a
                new_width[mask, c] = w
        return new_lo, new_width

    def run(
        self, words: np.ndarray, lo: np.ndarray, width: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        """Apply the columns of `words` left to right."""
        for j in range(words.shape[1]):
            lo, width = self.step(words[:, j], lo, width)
        return lo, width

    def forward_widths(
        self, words: np.ndarray, record: Sequence[int], start: FiberSet | None = None
    ) -> tuple[np.ndarray, np.ndarray]:
        """
        Push the start box (default M) along each row and snapshot it at the given depths.

        Returns:
            (low, width) arrays of shape (n, len(record), m)
        """
        n, length = words.shape
        start = start if start is not None else self.system.full_space()
        lo, width = box_arrays(start, n)
        record = sorted(set(int(d) for d in record))
        lows = np.empty((n, len(record), self.dimension))
        widths = np.empty_like(lows)
        position = 0
        slot = 0
        for depth in record:
            if depth > length:
                raise ValueError(f"Depth {depth} exceeds word length {length}")
            lo, width = self.run(words[:, position:depth], lo, width)
            position = depth
            lows[:, slot] = lo
            widths[:, slot] = width
            slot += 1
        return lows, widths


@dataclass
class BatchCoding:
    """Per-window coding outcome from the float engine."""

    converged: np.ndarray
    depth: np.ndarray
    low: np.ndarray
    width: np.ndarray


def _backward_boxes(
    engine: FloatEngine,
    windows: Sequence[SymbolWindow],
    depths: np.ndarray,
    start: FiberSet,
) -> tuple[np.ndarray, np.ndarray]:
    lo, width = box_arrays(start, len(windows))
    words = right_aligned_words(windows, depths)
    return engine.run(words, lo, width)


def code_windows(
    engine: FloatEngine,
    windows: Sequence[SymbolWindow],
    max_depth: int,
    tol: float,
    start: FiberSet | None = None,
) -> BatchCoding:
    """
    Code many windows on a doubling depth schedule, then bisect for the least depth.

    The depth is decided by the backward image of M; the reported box is the backward
    image of `start` (default M) at that depth.
    """
    full = engine.system.full_space()
    n = len(windows)
    converged = np.zeros(n, dtype=bool)
    depth = np.full(n, max_depth, dtype=np.int64)
    lows = np.zeros((n, engine.dimension))
    widths = np.ones((n, engine.dimension))

    for begin in range(0, n, CHUNK_SIZE):
        idx = np.arange(begin, min(n, begin + CHUNK_SIZE))
        chunk = [windows[i] for i in idx]
        failed = np.zeros(len(idx), dtype=np.int64)
        passed = np.full(len(idx), -1, dtype=np.int64)
        pending = np.arange(len(idx))
        d = min(INITIAL_DEPTH, max_depth)
        while pending.size:
            lo, width = _backward_boxes(
                engine, [chunk[i] for i in pending], np.full(pending.size, d), full
            )
            ok = width.sum(axis=1) <= tol
            passed[pending[ok]] = d
            failed[pending[~ok]] = d
            if d >= max_depth:
                lows[idx[pending[~ok]]] = lo[~ok]
                widths[idx[pending[~ok]]] = width[~ok]
                break
            pending = pending[~ok]
            d = min(2 * d, max_depth)

        done = np.flatnonzero(passed > 0)
        # failed holds the last depth known to be too shallow (0 when the first try passed)
        lower = failed[done].copy()
        upper = passed[done].copy()
        while done.size and np.any(upper - lower > 1):
            active = np.flatnonzero(upper - lower > 1)
            mid = (upper[active] + lower[active]) // 2
            _, width = _backward_boxes(engine, [chunk[i] for i in done[active]], mid, full)
            ok = width.sum(axis=1) <= tol
            upper[active[ok]] = mid[ok]
            lower[active[~ok]] = mid[~ok]
        if done.size:
            lo, width = _backward_boxes(
                engine, [chunk[i] for i in done], upper, start if start is not None else full
            )
            converged[idx[done]] = True
            depth[idx[done]] = upper
            lows[idx[done]] = lo
            widths[idx[done]] = width
        logger.debug(
            f"Coded chunk of {len(idx)} windows: {done.size} converged, "
            f"max depth used {int(upper.max()) if done.size else max_depth}"
        )
    return BatchCoding(converged, depth, lows, widths)
