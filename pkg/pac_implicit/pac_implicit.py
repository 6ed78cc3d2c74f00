from __future__ import annotations

import os
from typing import Sequence

from pac_implicit.bench.constants import GOAL_TOKENS
from pac_implicit.bench.dataset import load_dataset, positive_observations
from pac_implicit.linarith.atoms import TOP, ConjunctiveFormula, LinearAtom
from pac_implicit.linarith.expr import LinearExpr, VariableSet
from pac_implicit.linarith.parser import parse_expr, parse_formula, parse_query
from pac_implicit.optimise.constants import DEFAULT_ACCURACY, Goal
from pac_implicit.optimise.optimise import OptimiseResult, optimise_pac
from pac_implicit.pac.decide import Decision, decide_pac
from pac_implicit.pac.interval import PartialInterval
from pac_implicit.utils import RationalLike, to_rational


class PacImplicit:
    """
    A knowledge base and a list of blurred examples, queried without ever
    building the knowledge base the examples implicitly hold.

    Queries and objectives may be given as text; names are resolved
    against ``variables``, which should be the set the knowledge base and
    samples were built from.
    """

    def __init__(
        self,
        kb: ConjunctiveFormula | None,
        samples: Sequence[PartialInterval],
        epsilon: RationalLike = 0,
        accuracy: int = DEFAULT_ACCURACY,
        variables: VariableSet | None = None,
    ):
        self.kb = kb if kb is not None else TOP
        self.samples = list(samples)
        self.epsilon = to_rational(epsilon)
        self.accuracy = accuracy
        self.variables = variables if variables is not None else VariableSet()

    @staticmethod
    def from_files(
        kb_path: str | os.PathLike,
        data_path: str | os.PathLike,
        epsilon: RationalLike = 0,
        accuracy: int = DEFAULT_ACCURACY,
    ) -> PacImplicit:
        """Load a ``.kb`` file and the positive samples of a ``.data`` file."""
        variables = VariableSet()
        with open(kb_path, "r") as kb_file:
            kb = parse_formula(kb_file.read(), variables)
        samples = positive_observations(load_dataset(data_path, variables))
        return PacImplicit(kb, samples, epsilon, accuracy, variables)

    def decide(self, query: str | Sequence[LinearAtom], full_evaluation: bool = False) -> Decision:
        if isinstance(query, str):
            query = parse_query(query, self.variables)
        return decide_pac(
            self.kb, query, self.epsilon, self.samples, full_evaluation=full_evaluation
        )

    def optimise(
        self,
        objective: str | LinearExpr,
        goal: Goal | str = Goal.MAXIMISE,
    ) -> OptimiseResult:
        if isinstance(objective, str):
            objective = parse_expr(objective, self.variables)
        if isinstance(goal, str):
            goal = GOAL_TOKENS[goal.lower()]
        return optimise_pac(self.kb, objective, self.epsilon, self.accuracy, self.samples, goal)

    def maximise(self, objective: str | LinearExpr) -> OptimiseResult:
        return self.optimise(objective, Goal.MAXIMISE)

    def minimise(self, objective: str | LinearExpr) -> OptimiseResult:
        return self.optimise(objective, Goal.MINIMISE)
