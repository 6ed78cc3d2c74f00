from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

from pac_implicit.errors import EmptySampleList, OutOfRange
from pac_implicit.feasibility.solver import entails
from pac_implicit.linarith.atoms import ConjunctiveFormula, LinearAtom
from pac_implicit.pac.constants import PacVerdict, SampleOutcome
from pac_implicit.pac.interval import PartialInterval, ground
from pac_implicit.utils import RationalLike, to_rational

log = logging.getLogger(__name__)

# (sample index, sample) -> whether kb ∧ ground(sample) entails the query
SampleEntailment = Callable[[int, PartialInterval], bool]


@dataclass
class Decision:
    verdict: PacVerdict
    failed_count: int
    budget: int
    per_sample: list[SampleOutcome] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.verdict == PacVerdict.ACCEPT

    @property
    def sample_total(self) -> int:
        return len(self.per_sample)


def decide_pac(
    kb: ConjunctiveFormula,
    query: Sequence[LinearAtom],
    epsilon: RationalLike,
    samples: Sequence[PartialInterval],
    *,
    entailment: SampleEntailment | None = None,
    full_evaluation: bool = False,
) -> Decision:
    """
    Accept ``query`` unless more than ``floor(epsilon * m)`` of the ``m``
    samples fail to entail it together with ``kb``.

    Samples are checked in order and the search stops at the first sample
    that pushes the failure count past the budget, unless
    ``full_evaluation`` is set. ``per_sample`` lists the evaluated samples
    only; the verdict never depends on ``full_evaluation``.

    :param entailment: replaces the per-sample entailment check, for
        callers that can answer it faster (it must agree with
        ``entails(kb & ground(sample), query)``)
    """
    if not samples:
        raise EmptySampleList()
    epsilon = to_rational(epsilon)
    if not 0 <= epsilon <= 1:
        raise OutOfRange(f"epsilon must be in [0, 1], got {epsilon}")

    if entailment is None:
        query = list(query)

        def entailment(_index: int, sample: PartialInterval) -> bool:
            return entails(kb & ground(sample), query)

    budget = math.floor(epsilon * len(samples))
    failed = 0
    per_sample = []
    rejected = False

    for index, sample in enumerate(samples):
        if entailment(index, sample):
            per_sample.append(SampleOutcome.ENTAILED)
        else:
            per_sample.append(SampleOutcome.NOT_ENTAILED)
            failed += 1
            if failed > budget:
                rejected = True
                if not full_evaluation:
                    break

    verdict = PacVerdict.REJECT if rejected else PacVerdict.ACCEPT
    log.debug(
        "DecidePAC %s: failed %d of %d evaluated, budget %d",
        verdict.name,
        failed,
        len(per_sample),
        budget,
    )
    return Decision(verdict, failed, budget, per_sample)
