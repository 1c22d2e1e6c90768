"""Exact rational helpers shared by the domain models."""

from decimal import Decimal
from fractions import Fraction
from typing import Union

import numpy as np

RationalLike = Union[Fraction, int, str, float, Decimal]

ZERO = Fraction(0)
ONE = Fraction(1)


def to_fraction(value: RationalLike) -> Fraction:
    """
    Convert a literal to an exact rational.

    Strings may be decimals ("0.25") or ratios ("1/4"). Floats are converted exactly,
    so 0.1 becomes the binary fraction closest to one tenth.

    Args:
        value: Literal to convert

    Returns:
        Exact rational value

    Raises:
        ValueError: If the string cannot be parsed
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValueError("Booleans are not rationals")
    if isinstance(value, (int, Decimal)):
        return Fraction(value)
    if isinstance(value, (float, np.floating)):
        return Fraction(float(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise ValueError(f"Cannot interpret {value!r} as a rational")


def format_fraction(value: Fraction) -> str:
    """Render a rational as "p/q" (or "p" when integral)."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"

