from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from pac_implicit.errors import MissingVariable
from pac_implicit.utils import RationalLike, format_rational, to_rational

IDENTIFIER_RE = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


@dataclass(frozen=True)
class Variable:
    name: str
    index: int

    def __str__(self) -> str:
        return self.name


class VariableSet:
    """
    Interns variable names to dense indices, in order of first appearance.
    Every expression of one problem should draw its variables from one set.
    """

    def __init__(self, names: Iterable[str] = ()):
        self._by_name: dict[str, Variable] = {}
        for name in names:
            self.intern(name)

    def intern(self, name: str) -> Variable:
        variable = self._by_name.get(name)
        if variable is None:
            if not IDENTIFIER_RE.match(name):
                raise ValueError(f"Invalid variable name: {name!r}")
            variable = Variable(name, len(self._by_name))
            self._by_name[name] = variable
        return variable

    def __getitem__(self, name: str) -> Variable:
        try:
            return self._by_name[name]
        except KeyError:
            raise MissingVariable(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __iter__(self) -> Iterator[Variable]:
        return iter(self._by_name.values())

    def __len__(self) -> int:
        return len(self._by_name)

    @property
    def names(self) -> list[str]:
        return list(self._by_name)


class LinearExpr:
    """
    ``constant + Σ coefficient · variable`` with exact rational coefficients.

    Zero coefficients are never stored and terms are kept in variable index
    order, so two equal expressions compare and hash equal.
    """

    __slots__ = ("_coefficients", "constant")

    def __init__(
        self,
        coefficients: Mapping[Variable, RationalLike] | None = None,
        constant: RationalLike = 0,
    ):
        terms = {}
        for variable, coefficient in (coefficients or {}).items():
            coefficient = to_rational(coefficient)
            if coefficient != 0:
                terms[variable] = coefficient
        ordered = dict(sorted(terms.items(), key=lambda term: term[0].index))
        object.__setattr__(self, "_coefficients", ordered)
        object.__setattr__(self, "constant", to_rational(constant))

    def __setattr__(self, name, value):
        raise AttributeError("LinearExpr is immutable")

    @staticmethod
    def of_variable(variable: Variable, coefficient: RationalLike = 1) -> LinearExpr:
        return LinearExpr({variable: coefficient})

    @staticmethod
    def of_constant(constant: RationalLike) -> LinearExpr:
        return LinearExpr(None, constant)

    @property
    def coefficients(self) -> Mapping[Variable, Fraction]:
        return MappingProxyType(self._coefficients)

    @property
    def variables(self) -> tuple[Variable, ...]:
        return tuple(self._coefficients)

    @property
    def is_constant(self) -> bool:
        return not self._coefficients

    def coefficient(self, variable: Variable) -> Fraction:
        return self._coefficients.get(variable, Fraction(0))

    def evaluate(self, assignment: Mapping[Variable, Fraction]) -> Fraction:
        total = self.constant
        for variable, coefficient in self._coefficients.items():
            try:
                value = assignment[variable]
            except KeyError:
                raise MissingVariable(variable.name) from None
            total += coefficient * value
        return total

    def __add__(self, other: LinearExpr | RationalLike) -> LinearExpr:
        if not isinstance(other, LinearExpr):
            return LinearExpr(self._coefficients, self.constant + to_rational(other))
        terms = dict(self._coefficients)
        for variable, coefficient in other._coefficients.items():
            terms[variable] = terms.get(variable, 0) + coefficient
        return LinearExpr(terms, self.constant + other.constant)

    __radd__ = __add__

    def __neg__(self) -> LinearExpr:
        return self * -1

    def __sub__(self, other: LinearExpr | RationalLike) -> LinearExpr:
        return self + (-other if isinstance(other, LinearExpr) else -to_rational(other))

    def __rsub__(self, other: RationalLike) -> LinearExpr:
        return -self + other

    def __mul__(self, scalar: RationalLike) -> LinearExpr:
        if isinstance(scalar, LinearExpr):
            return NotImplemented
        scalar = to_rational(scalar)
        return LinearExpr(
            {variable: coeff * scalar for variable, coeff in self._coefficients.items()},
            self.constant * scalar,
        )

    __rmul__ = __mul__

    def __truediv__(self, scalar: RationalLike) -> LinearExpr:
        return self * (1 / to_rational(scalar))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearExpr):
            return NotImplemented
        return self.constant == other.constant and self._coefficients == other._coefficients

    def __hash__(self) -> int:
        return hash((tuple(self._coefficients.items()), self.constant))

    def render(self) -> str:
        """``<coeff>*<var> + ... + <const>``; the constant is omitted when zero."""
        parts = [
            f"{format_rational(coefficient)}*{variable.name}"
            for variable, coefficient in self._coefficients.items()
        ]
        if self.constant != 0 or not parts:
            parts.append(format_rational(self.constant))
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"LinearExpr({self.render()!r})"


def evaluate(expr: LinearExpr, assignment: Mapping[Variable, Fraction]) -> Fraction:
    return expr.evaluate(assignment)
