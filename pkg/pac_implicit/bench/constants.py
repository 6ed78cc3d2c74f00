from enum import IntEnum
from fractions import Fraction

from pac_implicit.optimise.constants import Goal


class Label(IntEnum):
    NEGATIVE = 0
    POSITIVE = 1


class KbMode(IntEnum):
    HARD = 0  # hard constraints and domain box
    BOX = 1  # domain box only
    NONE = 2  # empty knowledge base


# fmt: off
LABEL_TOKENS = {
    Label.POSITIVE : "pos",
    Label.NEGATIVE : "neg",
}

GOAL_TOKENS = {
    "maximise" : Goal.MAXIMISE,
    "maximize" : Goal.MAXIMISE,
    "max"      : Goal.MAXIMISE,
    "minimise" : Goal.MINIMISE,
    "minimize" : Goal.MINIMISE,
    "min"      : Goal.MINIMISE,
}
# fmt: on

TOKEN_LABELS = {token: label for label, token in LABEL_TOKENS.items()}

PROBLEM_SUFFIX = ".prob"
DATASET_SUFFIX = ".data"
DATASET_VARS_HEADER = "# vars:"

SHIPPED_PROBLEMS = ("pollution", "police")
GENERATED_FAMILIES = ("simplexn", "cuben")
MIN_GENERATED_DIMS = 2
MAX_GENERATED_DIMS = 4

# Generated geometry and objective coefficients are drawn on a 1/1000 grid
GENERATOR_GRID = 1000

# Bisection steps per round of exact_optimum before it looks for the optimal vertex
EXACT_OPTIMUM_ACCURACY = 48
EXACT_OPTIMUM_ROUNDS = 4

# Extra hyperplanes, beyond one per variable, searched for the optimal vertex
VERTEX_SEARCH_SLACK = 4

# Rejection sampling gives up when a class is rarer than this over a batch of draws
REJECTION_CHECK_BATCH = 10_000
MIN_ACCEPTANCE_RATE = Fraction(1, 10_000)
