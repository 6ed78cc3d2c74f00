from __future__ import annotations

import math
from decimal import Decimal
from fractions import Fraction
from typing import TypeAlias

Rational: TypeAlias = Fraction
"""
Exact rationals. ``Fraction`` keeps a positive denominator and a reduced
numerator/denominator pair, so every value is in canonical form.
"""

RationalLike: TypeAlias = Fraction | int | str | Decimal | float


def to_rational(value: RationalLike) -> Fraction:
    """
    Convert a number or numeric string to an exact rational.

    Floats are converted exactly (binary expansion), strings accept both
    decimal ("0.05") and fraction ("1/20") notation.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, float) and not math.isfinite(value):
        raise ValueError(f"Not a finite number: {value}")
    if isinstance(value, str):
        value = value.strip()
    return Fraction(value)


def format_rational(value: Fraction) -> str:
    """Render as ``p/q``, omitting ``/q`` when q is 1."""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_bound(value: Fraction | None, upper: bool) -> str:
    """Render an interval end; ``None`` is the infinite end."""
    if value is None:
        return "inf" if upper else "-inf"
    return format_rational(value)


def parse_bound(token: str) -> Fraction | None:
    token = token.strip()
    if token in ("inf", "+inf", "-inf"):
        return None
    return to_rational(token)


def quantise(value: float, grid: int, rounding: str = "nearest") -> Fraction:
    """
    Snap a float onto the rational grid ``k / grid``.

    :param value: float to snap
    :param grid: number of grid points per unit
    :param rounding: "nearest", "down" or "up"
    :return: the grid point as an exact rational
    """
    scaled = value * grid
    if rounding == "down":
        k = math.floor(scaled)
    elif rounding == "up":
        k = math.ceil(scaled)
    else:
        k = round(scaled)
    return Fraction(k, grid)


def clamp(value: Fraction, lo: Fraction, hi: Fraction) -> Fraction:
    return min(max(value, lo), hi)


def to_decimal(value: Fraction) -> Decimal:
    """Divide in the current decimal context; callers set the precision."""
    return Decimal(value.numerator) / Decimal(value.denominator)
