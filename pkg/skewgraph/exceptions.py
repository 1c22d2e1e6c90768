"""Custom exceptions for skewgraph operations."""

from collections.abc import Sequence


class SkewGraphError(Exception):
    """Base exception for skewgraph errors."""

    pass


class ValidationError(SkewGraphError):
    """Raised when input validation fails."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class AlphabetMismatchError(ValidationError):
    """Raised when two symbol sequences live over different alphabets."""

    def __init__(self, left: int, right: int):
        message = f"Alphabet sizes differ: {left} != {right}"
        super().__init__(message, "alphabet_size")
        self.left = left
        self.right = right


class SplitCheckError(SkewGraphError):
    """Base exception for failed splitting checks."""

    pass


class InadmissibleWordError(SplitCheckError):
    """Raised when a word uses a transition of probability zero."""

    def __init__(self, word: Sequence[int], position: int):
        pair = (word[position], word[position + 1])
        message = f"Word {tuple(word)} is inadmissible: transition {pair} at position {position}"
        super().__init__(message)
        self.word = tuple(word)
        self.position = position


class LastSymbolMismatchError(SplitCheckError):
    """Raised when the two splitting words end in different symbols."""

    def __init__(self, last_a: int, last_b: int):
        message = f"Splitting words must end in the same symbol, got {last_a} and {last_b}"
        super().__init__(message)
        self.last_a = last_a
        self.last_b = last_b


class ProjectionsOverlapError(SplitCheckError):
    """Raised when the projections of the two images intersect."""

    def __init__(self, coordinate: int, overlap_width: float):
        message = f"Projections overlap on coordinate {coordinate} (width {overlap_width})"
        super().__init__(message)
        self.coordinate = coordinate
        self.overlap_width = overlap_width


class EmptyCylinderError(SkewGraphError):
    """Raised when a cylinder carries no empirical mass."""

    def __init__(self, cylinder: object):
        super().__init__(f"Cylinder {cylinder} has no empirical mass")
        self.cylinder = cylinder


class BudgetExceededError(SkewGraphError):
    """Raised when a computation would exceed a configured budget."""

    def __init__(self, resource: str, requested: int, budget: int):
        message = f"{resource} budget exceeded: requested {requested}, budget {budget}"
        super().__init__(message)
        self.resource = resource
        self.requested = requested
        self.budget = budget


class ConvergenceError(SkewGraphError):
    """Base exception for convergence-budget failures."""

    pass


class DiscardFractionTooHighError(ConvergenceError):
    """Raised when too many sampled codings fail to converge."""

    def __init__(self, fraction: float, limit: float):
        message = f"Discarded {fraction:.2%} of codings, limit is {limit:.2%}"
        super().__init__(message)
        self.fraction = fraction
        self.limit = limit


class NotConvergedError(ConvergenceError):
    """Raised when an iteration exhausts its depth budget."""

    def __init__(self, operation: str, depth: int, final_diameter: float):
        message = f"{operation} did not converge within depth {depth} (diameter {final_diameter:g})"
        super().__init__(message)
        self.operation = operation
        self.depth = depth
        self.final_diameter = final_diameter


class ArtifactError(SkewGraphError):
    """Raised when experiment artifacts cannot be written."""

    def __init__(self, message: str, original_error: Exception | None = None):
        super().__init__(message)
        self.original_error = original_error
