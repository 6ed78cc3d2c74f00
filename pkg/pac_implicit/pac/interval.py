from __future__ import annotations

from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Mapping

from pac_implicit.errors import OutOfRange
from pac_implicit.feasibility.solver import entails
from pac_implicit.linarith.atoms import ConjunctiveFormula, LinearAtom
from pac_implicit.linarith.constants import Relation
from pac_implicit.linarith.expr import LinearExpr, Variable

Bound = tuple[Fraction | None, Fraction | None]


class PartialInterval:
    """
    A blurred example: per variable a lower and an upper bound, where None
    stands for -∞ (lower) or +∞ (upper).

    A variable without an entry is fully masked, exactly like an explicit
    ``(None, None)``. A point observation has ``lower == upper``.
    """

    __slots__ = ("_bounds",)

    def __init__(self, bounds: Mapping[Variable, Bound] | None = None):
        checked = {}
        for variable, (lower, upper) in (bounds or {}).items():
            lower = None if lower is None else Fraction(lower)
            upper = None if upper is None else Fraction(upper)
            if lower is not None and upper is not None and lower > upper:
                raise OutOfRange(f"Empty interval for {variable.name}: [{lower}, {upper}]")
            checked[variable] = (lower, upper)
        ordered = dict(sorted(checked.items(), key=lambda item: item[0].index))
        object.__setattr__(self, "_bounds", ordered)

    def __setattr__(self, name, value):
        raise AttributeError("PartialInterval is immutable")

    @staticmethod
    def point(assignment: Mapping[Variable, Fraction]) -> PartialInterval:
        return PartialInterval({var: (value, value) for var, value in assignment.items()})

    @staticmethod
    def masked(variables: Iterable[Variable]) -> PartialInterval:
        return PartialInterval({var: (None, None) for var in variables})

    @property
    def bounds(self) -> Mapping[Variable, Bound]:
        return MappingProxyType(self._bounds)

    @property
    def variables(self) -> tuple[Variable, ...]:
        return tuple(self._bounds)

    def lower(self, variable: Variable) -> Fraction | None:
        return self._bounds.get(variable, (None, None))[0]

    def upper(self, variable: Variable) -> Fraction | None:
        return self._bounds.get(variable, (None, None))[1]

    def is_masked(self, variable: Variable) -> bool:
        return self._bounds.get(variable, (None, None)) == (None, None)

    @property
    def fully_masked(self) -> bool:
        return all(bound == (None, None) for bound in self._bounds.values())

    def contains(self, assignment: Mapping[Variable, Fraction]) -> bool:
        """Whether every assigned value lies within this interval's bounds."""
        for variable, value in assignment.items():
            lower, upper = self._bounds.get(variable, (None, None))
            if lower is not None and value < lower:
                return False
            if upper is not None and value > upper:
                return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartialInterval):
            return NotImplemented
        return self._bounds == other._bounds

    def __hash__(self) -> int:
        return hash(tuple(self._bounds.items()))

    def __repr__(self) -> str:
        parts = [
            f"{var.name}: [{'-inf' if lo is None else lo}, {'inf' if hi is None else hi}]"
            for var, (lo, hi) in self._bounds.items()
        ]
        return "PartialInterval({" + ", ".join(parts) + "})"


def ground(phi: PartialInterval) -> ConjunctiveFormula:
    """
    The conjunction of the finite bounds of ``phi``: ``v >= lower`` and
    ``v <= upper`` for each finite end. Fully masked variables contribute
    nothing.
    """
    atoms = []
    for variable, (lower, upper) in phi.bounds.items():
        term = LinearExpr.of_variable(variable)
        if lower is not None:
            atoms.append(LinearAtom(term - lower, Relation.GE))
        if upper is not None:
            atoms.append(LinearAtom(term - upper, Relation.LE))
    return ConjunctiveFormula(atoms)


def witnessed(phi: PartialInterval, psi: Iterable[LinearAtom]) -> bool:
    """``psi`` holds under every assignment ``phi`` permits."""
    return entails(ground(phi), psi)
