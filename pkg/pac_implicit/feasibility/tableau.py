from __future__ import annotations

import logging
from fractions import Fraction

from pac_implicit.feasibility.constants import BoundKind
from pac_implicit.linarith.delta_rational import DeltaRational

log = logging.getLogger(__name__)

ZERO = DeltaRational(0, 0)


class Tableau:
    """
    General simplex over bound-constrained variables, after Dutertre and
    de Moura's theory solver for linear real arithmetic.

    Column ``k`` is a problem variable for ``k < num_vars`` and a slack
    variable otherwise. Each slack starts basic with row
    ``slack = Σ coeff · var``. Bounds and the valuation are DeltaRationals,
    so strict bounds are exact.

    Invariants kept between steps: the valuation satisfies every row, and
    every nonbasic column lies within its bounds.
    """

    def __init__(self, num_vars: int, run_checks: bool = False):
        self.num_vars = num_vars
        self.num_columns = num_vars
        self.run_checks = run_checks

        self.lower: list[DeltaRational | None] = [None] * num_vars
        self.upper: list[DeltaRational | None] = [None] * num_vars
        self.value: list[DeltaRational] = [ZERO] * num_vars

        # basic column -> {nonbasic column: coefficient}
        self.rows: dict[int, dict[int, Fraction]] = {}
        self._slack_of_form: dict[tuple, int] = {}

        self.conflict = False
        self.pivots = 0

    def slack_for(self, form: dict[int, Fraction]) -> int:
        """
        Column of the slack equal to ``Σ coeff · var`` over problem columns,
        shared between atoms with the same linear form.
        """
        key = tuple(sorted(form.items()))
        column = self._slack_of_form.get(key)
        if column is None:
            column = self.num_columns
            self.num_columns += 1
            self.lower.append(None)
            self.upper.append(None)
            self.value.append(ZERO)
            self.rows[column] = dict(form)
            self._slack_of_form[key] = column
        return column

    def assert_bound(self, column: int, bound: DeltaRational, kind: BoundKind):
        """Tighten a bound; records a conflict when the bounds cross."""
        if kind in (BoundKind.UPPER, BoundKind.BOTH):
            upper = self.upper[column]
            if upper is None or bound < upper:
                self.upper[column] = bound
        if kind in (BoundKind.LOWER, BoundKind.BOTH):
            lower = self.lower[column]
            if lower is None or bound > lower:
                self.lower[column] = bound
        lower, upper = self.lower[column], self.upper[column]
        if lower is not None and upper is not None and lower > upper:
            self.conflict = True

    def check(self) -> bool:
        """Run the simplex until every column is within bounds (True) or a row is stuck (False)."""
        if self.conflict:
            return False

        self._initialise_valuation()

        while True:
            if self.run_checks:
                self._check_invariants()

            violated = self._first_violated_basic()
            if violated is None:
                return True

            column, target = violated
            row = self.rows[column]
            below = self.value[column] < target

            entering = None
            for nonbasic in sorted(row):
                coeff = row[nonbasic]
                if below == (coeff > 0):
                    upper = self.upper[nonbasic]
                    if upper is None or self.value[nonbasic] < upper:
                        entering = nonbasic
                        break
                else:
                    lower = self.lower[nonbasic]
                    if lower is None or self.value[nonbasic] > lower:
                        entering = nonbasic
                        break

            if entering is None:
                log.debug(
                    "Row of column %d cannot be repaired after %d pivots", column, self.pivots
                )
                return False

            self._pivot_and_update(column, entering, target)

    def _initialise_valuation(self):
        for column in range(self.num_vars):
            lower, upper = self.lower[column], self.upper[column]
            if lower is not None and ZERO < lower:
                self.value[column] = lower
            elif upper is not None and upper < ZERO:
                self.value[column] = upper
            else:
                self.value[column] = ZERO
        for basic, row in self.rows.items():
            self.value[basic] = self._row_value(row)

    def _row_value(self, row: dict[int, Fraction]) -> DeltaRational:
        total = ZERO
        for column, coeff in row.items():
            total = total + self.value[column] * coeff
        return total

    def _first_violated_basic(self) -> tuple[int, DeltaRational] | None:
        # Bland's rule: lowest column index first
        for basic in sorted(self.rows):
            value = self.value[basic]
            lower, upper = self.lower[basic], self.upper[basic]
            if lower is not None and value < lower:
                return basic, lower
            if upper is not None and value > upper:
                return basic, upper
        return None

    def _pivot_and_update(self, leaving: int, entering: int, target: DeltaRational):
        row = self.rows[leaving]
        a = row[entering]
        theta = (target - self.value[leaving]) * (1 / a)
        self.value[leaving] = target
        self.value[entering] = self.value[entering] + theta
        for basic, other_row in self.rows.items():
            if basic != leaving:
                coeff = other_row.get(entering)
                if coeff:
                    self.value[basic] = self.value[basic] + theta * coeff
        self._pivot(leaving, entering)
        self.pivots += 1

    def _pivot(self, leaving: int, entering: int):
        # leaving = a*entering + Σ r_k x_k  =>  entering = leaving/a - Σ (r_k/a) x_k
        row = self.rows.pop(leaving)
        a = row.pop(entering)
        new_row = {column: -coeff / a for column, coeff in row.items()}
        new_row[leaving] = 1 / a

        for other_row in self.rows.values():
            coeff = other_row.pop(entering, None)
            if coeff is None:
                continue
            for column, value in new_row.items():
                updated = other_row.get(column, 0) + coeff * value
                if updated:
                    other_row[column] = updated
                else:
                    other_row.pop(column, None)

        self.rows[entering] = new_row

    def _check_invariants(self):
        for basic, row in self.rows.items():
            assert self.value[basic] == self._row_value(row), "valuation breaks a row"
        for column in range(self.num_columns):
            if column in self.rows:
                continue
            lower, upper = self.lower[column], self.upper[column]
            assert lower is None or lower <= self.value[column], "nonbasic below lower bound"
            assert upper is None or self.value[column] <= upper, "nonbasic above upper bound"

    def model(self) -> list[DeltaRational]:
        """Values of the problem columns."""
        return self.value[: self.num_vars]
