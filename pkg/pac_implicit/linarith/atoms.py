from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from pac_implicit.linarith.constants import MIRRORED, RELATION_SYMBOLS, Relation
from pac_implicit.linarith.expr import LinearExpr, Variable


class LinearAtom:
    """
    The constraint ``expr <relation> 0``.

    GE and GT are rewritten to LE and LT over the negated expression, so a
    stored atom only ever carries LE, LT, EQ or NEQ.
    """

    __slots__ = ("expr", "relation")

    def __init__(self, expr: LinearExpr, relation: Relation):
        relation = Relation(relation)
        if relation in MIRRORED:
            expr = -expr
            relation = MIRRORED[relation]
        object.__setattr__(self, "expr", expr)
        object.__setattr__(self, "relation", relation)

    def __setattr__(self, name, value):
        raise AttributeError("LinearAtom is immutable")

    @staticmethod
    def compare(
        lhs: LinearExpr, relation: Relation, rhs: LinearExpr | Fraction | int
    ) -> LinearAtom:
        """Build ``lhs <relation> rhs``."""
        return LinearAtom(lhs - rhs, relation)

    @property
    def is_strict(self) -> bool:
        return self.relation == Relation.LT

    def holds_for(self, value: Fraction) -> bool:
        """Whether ``value <relation> 0``."""
        if self.relation == Relation.LE:
            return value <= 0
        elif self.relation == Relation.LT:
            return value < 0
        elif self.relation == Relation.EQ:
            return value == 0
        else:
            return value != 0

    def satisfied_by(self, assignment: Mapping[Variable, Fraction]) -> bool:
        return self.holds_for(self.expr.evaluate(assignment))

    def __eq__(self, other) -> bool:
        if not isinstance(other, LinearAtom):
            return NotImplemented
        return self.relation == other.relation and self.expr == other.expr

    def __hash__(self) -> int:
        return hash((self.expr, self.relation))

    def render(self) -> str:
        return f"{self.expr.render()} {RELATION_SYMBOLS[self.relation]} 0"

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"LinearAtom({self.render()!r})"


class ConjunctiveFormula:
    """Conjunction of atoms in insertion order. The empty conjunction is ⊤."""

    __slots__ = ("atoms",)

    def __init__(self, atoms: Iterable[LinearAtom] = ()):
        object.__setattr__(self, "atoms", tuple(atoms))

    def __setattr__(self, name, value):
        raise AttributeError("ConjunctiveFormula is immutable")

    def __iter__(self) -> Iterator[LinearAtom]:
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __getitem__(self, index: int) -> LinearAtom:
        return self.atoms[index]

    def __and__(self, other: ConjunctiveFormula | Iterable[LinearAtom]) -> ConjunctiveFormula:
        return ConjunctiveFormula(self.atoms + tuple(other))

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConjunctiveFormula):
            return NotImplemented
        return self.atoms == other.atoms

    def __hash__(self) -> int:
        return hash(self.atoms)

    @property
    def is_top(self) -> bool:
        return not self.atoms

    @property
    def variables(self) -> tuple[Variable, ...]:
        found = {}
        for atom in self.atoms:
            for variable in atom.expr.variables:
                found[variable] = None
        return tuple(sorted(found, key=lambda variable: variable.index))

    def has_neq(self) -> bool:
        return any(atom.relation == Relation.NEQ for atom in self.atoms)

    def satisfied_by(self, assignment: Mapping[Variable, Fraction]) -> bool:
        return all(atom.satisfied_by(assignment) for atom in self.atoms)

    def render(self) -> str:
        return "\n".join(atom.render() for atom in self.atoms)

    def __repr__(self) -> str:
        return f"ConjunctiveFormula({[atom.render() for atom in self.atoms]!r})"


TOP = ConjunctiveFormula()


def satisfies(atom: LinearAtom, assignment: Mapping[Variable, Fraction]) -> bool:
    return atom.satisfied_by(assignment)


def negate_literal(atom: LinearAtom) -> list[LinearAtom]:
    """
    Classical negation of an atom as a disjunction of atoms whose models are
    exactly the complement of the atom's models.
    """
    expr = atom.expr
    if atom.relation == Relation.LE:
        return [LinearAtom(expr, Relation.GT)]
    elif atom.relation == Relation.LT:
        return [LinearAtom(expr, Relation.GE)]
    elif atom.relation == Relation.EQ:
        return [LinearAtom(expr, Relation.LT), LinearAtom(expr, Relation.GT)]
    else:
        return [LinearAtom(expr, Relation.EQ)]
