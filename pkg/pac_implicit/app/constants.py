from enum import IntEnum
from fractions import Fraction


class ExitCode(IntEnum):
    ACCEPT = 0
    REJECT = 1
    ERROR = 2
    UNBOUNDED = 3


SUCCESS = ExitCode.ACCEPT

DEFAULT_SEED = 111921
DEFAULT_SAMPLE_SIZES = (50, 100, 200, 300, 400, 500)
DEFAULT_RUNS = 10

# Validity of 95% for runs with noise or outliers
NOISY_EPSILON = Fraction(1, 20)

POSITIVE_RATIO = Fraction(1, 2)

# Estimates within this distance on the wrong side of the optimum still count as feasible
FEASIBILITY_TOLERANCE = Fraction(1, 10**6)

# fmt: off
CSV_COLUMNS = (
    "problem", "dims", "samples", "run", "seed", "noise", "outliers",
    "estimate", "true_optimum", "feasible", "found", "runtime_ms", "decide_calls",
)
# fmt: on
