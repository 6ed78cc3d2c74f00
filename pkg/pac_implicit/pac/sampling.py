from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

from pac_implicit.errors import OutOfRange
from pac_implicit.pac.constants import SAMPLE_COUNT_PRECISION, SAMPLE_COUNT_SNAP_DIGITS
from pac_implicit.utils import RationalLike, to_decimal, to_rational

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PacParams:
    """
    :param epsilon: validity slack, the query must hold with probability 1 - epsilon
    :param gamma: accuracy of the empirical estimate
    :param delta_conf: confidence, the guarantee fails with probability at most delta_conf
    """

    epsilon: Fraction
    gamma: Fraction
    delta_conf: Fraction

    def __post_init__(self):
        for name in ("epsilon", "gamma", "delta_conf"):
            object.__setattr__(self, name, to_rational(getattr(self, name)))
        if not 0 <= self.epsilon <= 1:
            raise OutOfRange(f"epsilon must be in [0, 1], got {self.epsilon}")
        if not 0 < self.gamma < 1:
            raise OutOfRange(f"gamma must be in (0, 1), got {self.gamma}")
        if not 0 < self.delta_conf < 1:
            raise OutOfRange(f"delta_conf must be in (0, 1), got {self.delta_conf}")
        if self.epsilon + self.gamma > 1:
            log.warning(
                "epsilon + gamma = %s exceeds 1; the Reject guarantee is vacuous",
                self.epsilon + self.gamma,
            )

    @property
    def sample_count(self) -> int:
        return sample_count(self.gamma, self.delta_conf)


def sample_count(gamma: RationalLike, delta_conf: RationalLike) -> int:
    """
    ``ceil(ln(1/delta_conf) / (2 gamma²))`` samples, the Hoeffding bound.

    The logarithm is evaluated in a wide decimal context so the ceiling is
    exact for rational inputs.
    """
    gamma = to_rational(gamma)
    delta_conf = to_rational(delta_conf)
    if not 0 < gamma < 1:
        raise OutOfRange(f"gamma must be in (0, 1), got {gamma}")
    if not 0 < delta_conf < 1:
        raise OutOfRange(f"delta_conf must be in (0, 1), got {delta_conf}")

    with localcontext() as ctx:
        ctx.prec = SAMPLE_COUNT_PRECISION
        log_term = to_decimal(1 / delta_conf).ln()
        value = log_term / to_decimal(2 * gamma * gamma)
        nearest = value.to_integral_value()
        if abs(value - nearest) < Decimal(10) ** -SAMPLE_COUNT_SNAP_DIGITS:
            return max(1, int(nearest))
        return max(1, math.ceil(value))
