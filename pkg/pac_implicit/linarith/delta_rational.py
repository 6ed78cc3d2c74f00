from __future__ import annotations

from fractions import Fraction


class DeltaRational:
    """
    A value ``real + delta * δ`` where δ is a symbolic positive infinitesimal.

    Strict bounds become non-strict ones over these values: ``x < c`` is
    ``x <= c - δ`` and ``x > c`` is ``x >= c + δ``. Comparison is
    lexicographic on (real, delta).
    """

    __slots__ = ("real", "delta")

    def __init__(self, real: Fraction | int = 0, delta: Fraction | int = 0):
        object.__setattr__(self, "real", Fraction(real))
        object.__setattr__(self, "delta", Fraction(delta))

    def __setattr__(self, name, value):
        raise AttributeError("DeltaRational is immutable")

    def _key(self) -> tuple[Fraction, Fraction]:
        return self.real, self.delta

    def __eq__(self, other) -> bool:
        if not isinstance(other, DeltaRational):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __lt__(self, other: DeltaRational) -> bool:
        return self._key() < other._key()

    def __le__(self, other: DeltaRational) -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: DeltaRational) -> bool:
        return self._key() > other._key()

    def __ge__(self, other: DeltaRational) -> bool:
        return self._key() >= other._key()

    def __add__(self, other: DeltaRational) -> DeltaRational:
        return DeltaRational(self.real + other.real, self.delta + other.delta)

    def __sub__(self, other: DeltaRational) -> DeltaRational:
        return DeltaRational(self.real - other.real, self.delta - other.delta)

    def __neg__(self) -> DeltaRational:
        return DeltaRational(-self.real, -self.delta)

    def __mul__(self, scalar: Fraction | int) -> DeltaRational:
        if isinstance(scalar, DeltaRational):
            return NotImplemented
        return DeltaRational(self.real * scalar, self.delta * scalar)

    __rmul__ = __mul__

    def substitute(self, delta_value: Fraction) -> Fraction:
        """Collapse to a rational by giving δ a concrete value."""
        return self.real + self.delta * delta_value

    def __repr__(self) -> str:
        return f"DeltaRational({self.real}, {self.delta})"
