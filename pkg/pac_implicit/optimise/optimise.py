from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from pac_implicit.errors import EmptySampleList, OutOfRange, UnboundedAbove, UnboundedBelow
from pac_implicit.feasibility.solver import counter_model
from pac_implicit.linarith.atoms import ConjunctiveFormula, LinearAtom
from pac_implicit.linarith.constants import Relation
from pac_implicit.linarith.expr import LinearExpr
from pac_implicit.optimise.constants import DEFAULT_ACCURACY, MAGNITUDE_CAP, Goal
from pac_implicit.pac.decide import SampleEntailment, decide_pac
from pac_implicit.pac.interval import PartialInterval, ground
from pac_implicit.pac.sampling import sample_count
from pac_implicit.utils import RationalLike, to_rational

log = logging.getLogger(__name__)


@dataclass
class OptimiseResult:
    """
    ``estimate`` is the last rejected bound of the search, mapped back to the
    caller's goal. ``[bracket_low, bracket_high]`` is the final bracket in
    the caller's orientation: for maximise the estimate is ``bracket_low``,
    for minimise it is ``bracket_high``.
    """

    estimate: Fraction
    bracket_low: Fraction
    bracket_high: Fraction
    decide_calls: int
    goal: Goal
    solver_calls: int = 0

    @property
    def width(self) -> Fraction:
        return self.bracket_high - self.bracket_low


class MonotoneEntailmentCache:
    """
    Per-sample memory of the queries ``b >= f``.

    Whether ``kb ∧ ground(sample)`` entails ``b >= f`` is monotone in ``b``,
    so one entailed bound settles every larger bound, and one counter-model
    ``x`` settles every bound below ``f(x)``. The decision procedure only
    runs for bounds between the two marks.
    """

    def __init__(
        self,
        kb: ConjunctiveFormula,
        objective: LinearExpr,
        samples: Sequence[PartialInterval],
    ):
        self.kb = kb
        self.objective = objective
        self.samples = samples
        self.solver_calls = 0

        self._grounded: list[ConjunctiveFormula | None] = [None] * len(samples)
        self._entailed_from: list[Fraction | None] = [None] * len(samples)
        self._refuted_below: list[Fraction | None] = [None] * len(samples)

    def for_bound(self, bound: Fraction) -> SampleEntailment:
        def entailment(index: int, sample: PartialInterval) -> bool:
            return self.entails(index, bound)

        return entailment

    def entails(self, index: int, bound: Fraction) -> bool:
        entailed_from = self._entailed_from[index]
        if entailed_from is not None and bound >= entailed_from:
            return True
        refuted_below = self._refuted_below[index]
        if refuted_below is not None and bound < refuted_below:
            return False

        formula = self._grounded[index]
        if formula is None:
            formula = self.kb & ground(self.samples[index])
            self._grounded[index] = formula

        self.solver_calls += 1
        witness = counter_model(formula, [bound_query(self.objective, bound)])
        if witness is None:
            self._entailed_from[index] = bound
            return True

        value = self.objective.evaluate(witness)
        if refuted_below is None or value > refuted_below:
            self._refuted_below[index] = value
        return False


def bound_query(objective: LinearExpr, bound: Fraction) -> LinearAtom:
    """The query ``bound >= objective``."""
    return LinearAtom(objective - bound, Relation.LE)


def optimise_pac(
    kb: ConjunctiveFormula,
    objective: LinearExpr,
    epsilon: RationalLike,
    accuracy: int,
    samples: Sequence[PartialInterval],
    goal: Goal = Goal.MAXIMISE,
    magnitude_cap: int = MAGNITUDE_CAP,
) -> OptimiseResult:
    """
    Bracket the best objective bound that DecidePAC accepts by probing 0,
    ±1 and then doubling, and halve the bracket ``accuracy`` times.

    Minimisation runs as maximisation of ``-objective`` and negates the
    result back. The bound ``l`` returned is always one DecidePAC rejected,
    so (for maximise) the objective exceeds it with the stated validity.
    """
    if not samples:
        raise EmptySampleList()
    if accuracy < 1:
        raise OutOfRange(f"accuracy must be at least 1, got {accuracy}")
    epsilon = to_rational(epsilon)
    goal = Goal(goal)

    internal = objective if goal == Goal.MAXIMISE else -objective
    cache = MonotoneEntailmentCache(kb, internal, samples)
    verdicts: dict[Fraction, bool] = {}

    def accepts(bound: Fraction) -> bool:
        bound = Fraction(bound)
        decision = decide_pac(
            kb,
            [bound_query(internal, bound)],
            epsilon,
            samples,
            entailment=cache.for_bound(bound),
        )
        verdicts[bound] = decision.accepted
        log.debug("Bound %s >= f: %s", bound, decision.verdict.name)
        return decision.accepted

    def unbounded(towards_positive: bool, bound: Fraction):
        # towards_positive: internal objective escapes upwards
        if towards_positive == (goal == Goal.MAXIMISE):
            return UnboundedAbove(bound)
        return UnboundedBelow(bound)

    if accepts(Fraction(0)):
        if not accepts(Fraction(-1)):
            low, high = Fraction(-1), Fraction(0)
        else:
            bound = Fraction(-2)
            while accepts(bound):
                bound *= 2
                if abs(bound) > magnitude_cap:
                    raise unbounded(False, bound)
            low, high = bound, bound / 2
    else:
        if accepts(Fraction(1)):
            low, high = Fraction(0), Fraction(1)
        else:
            bound = Fraction(2)
            while not accepts(bound):
                bound *= 2
                if abs(bound) > magnitude_cap:
                    raise unbounded(True, bound)
            low, high = bound / 2, bound

    initial_width = high - low
    for _ in range(accuracy):
        assert verdicts[high] and not verdicts[low], "bracket lost its accept/reject ends"
        middle = (low + high) / 2
        if accepts(middle):
            high = middle
        else:
            low = middle
    assert high - low == initial_width / 2**accuracy

    if goal == Goal.MAXIMISE:
        estimate, bracket_low, bracket_high = low, low, high
    else:
        estimate, bracket_low, bracket_high = -low, -high, -low

    log.info(
        "OptimisePAC %s estimate %s after %d DecidePAC calls (%d solver calls)",
        goal.name.lower(),
        float(estimate),
        len(verdicts),
        cache.solver_calls,
    )
    return OptimiseResult(
        estimate=estimate,
        bracket_low=bracket_low,
        bracket_high=bracket_high,
        decide_calls=len(verdicts),
        goal=goal,
        solver_calls=cache.solver_calls,
    )


def optimise_sample_count(gamma: RationalLike, delta_conf: RationalLike) -> int:
    """
    Samples for OptimisePAC. The bound family ``b >= f`` has VC-dimension at
    most 1, so the uniform-convergence bound only differs from DecidePAC's
    Hoeffding count in unspecified constants; the Hoeffding count is used.
    """
    return sample_count(gamma, delta_conf)
