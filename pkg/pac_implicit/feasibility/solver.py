from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from pac_implicit.errors import UnexpectedNeq
from pac_implicit.feasibility.constants import BoundKind, Status
from pac_implicit.feasibility.tableau import Tableau
from pac_implicit.linarith.atoms import ConjunctiveFormula, LinearAtom, negate_literal
from pac_implicit.linarith.constants import Relation
from pac_implicit.linarith.delta_rational import DeltaRational
from pac_implicit.linarith.expr import Variable

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Verdict:
    status: Status
    model: Mapping[Variable, DeltaRational] | None = None

    @property
    def is_sat(self) -> bool:
        return self.status == Status.SAT


UNSAT = Verdict(Status.UNSAT)


def check_feasible(formula: ConjunctiveFormula, run_checks: bool = False) -> Verdict:
    """
    Decide whether a conjunction of LE/LT/EQ atoms has a rational model.

    Strict atoms ``e < 0`` become ``e <= -δ`` bounds. A SAT verdict carries a
    δ-model over the formula's variables; ``concretize`` turns it into
    rationals. The result depends only on the formula.
    """
    if formula.has_neq():
        raise UnexpectedNeq("Disequalities must be split before the feasibility check")

    variables = formula.variables
    columns = {variable: column for column, variable in enumerate(variables)}
    tableau = Tableau(len(variables), run_checks=run_checks)

    for atom in formula:
        expr = atom.expr
        if expr.is_constant:
            if not atom.holds_for(expr.constant):
                return UNSAT
            continue

        terms = list(expr.coefficients.items())
        _, lead = terms[0]
        if len(terms) == 1:
            column = columns[terms[0][0]]
        else:
            column = tableau.slack_for({columns[var]: coeff / lead for var, coeff in terms})

        # lead * column + constant <relation> 0
        bound = -expr.constant / lead
        if atom.relation == Relation.EQ:
            tableau.assert_bound(column, DeltaRational(bound, 0), BoundKind.BOTH)
        elif lead > 0:
            delta = -1 if atom.is_strict else 0
            tableau.assert_bound(column, DeltaRational(bound, delta), BoundKind.UPPER)
        else:
            delta = 1 if atom.is_strict else 0
            tableau.assert_bound(column, DeltaRational(bound, delta), BoundKind.LOWER)

        if tableau.conflict:
            return UNSAT

    if not tableau.check():
        return UNSAT

    model = dict(zip(variables, tableau.model()))
    return Verdict(Status.SAT, MappingProxyType(model))


def concretize(
    model: Mapping[Variable, DeltaRational],
    formula: ConjunctiveFormula,
) -> dict[Variable, Fraction]:
    """
    Pick a positive rational for δ small enough that the δ-model satisfies
    every atom of ``formula`` and substitute it.
    """
    delta_value = Fraction(1)
    for atom in formula:
        real = atom.expr.constant
        delta = Fraction(0)
        for variable, coeff in atom.expr.coefficients.items():
            value = model[variable]
            real += coeff * value.real
            delta += coeff * value.delta
        # Only a negative real part with a positive δ part can be broken by a large δ
        if atom.relation in (Relation.LE, Relation.LT) and real < 0 < delta:
            delta_value = min(delta_value, -real / delta / 2)
    return {variable: value.substitute(delta_value) for variable, value in model.items()}


def expand_neq(formula: ConjunctiveFormula) -> Iterator[ConjunctiveFormula]:
    """Split every ``e != 0`` into ``e < 0`` or ``e > 0``, yielding each branch."""
    choices = []
    for atom in formula:
        if atom.relation == Relation.NEQ:
            choices.append(
                (LinearAtom(atom.expr, Relation.LT), LinearAtom(atom.expr, Relation.GT))
            )
        else:
            choices.append((atom,))
    for branch in itertools.product(*choices):
        yield ConjunctiveFormula(branch)


def counter_model(
    kb: ConjunctiveFormula,
    query: Iterable[LinearAtom],
) -> dict[Variable, Fraction] | None:
    """
    A rational model of ``kb ∧ ¬query``, or None when ``kb`` entails the
    conjunction ``query``.
    """
    query = list(query)
    for branch in expand_neq(kb):
        for atom in query:
            for disjunct in negate_literal(atom):
                formula = branch & [disjunct]
                verdict = check_feasible(formula)
                if verdict.is_sat:
                    return concretize(verdict.model, formula)
    return None


def entails(kb: ConjunctiveFormula, query: Iterable[LinearAtom]) -> bool:
    """
    ``kb ⊨ a1 ∧ ... ∧ ak``, decided as UNSAT of ``kb ∧ ¬ai`` for every
    disjunct of every negated atom. An inconsistent kb entails everything.
    """
    return counter_model(kb, query) is None
