from enum import IntEnum


class Goal(IntEnum):
    MAXIMISE = 0
    MINIMISE = 1


# Number of times the bracket is halved; 2^-60 is finer than double precision
DEFAULT_ACCURACY = 60

# The doubling search gives up past this magnitude
MAGNITUDE_CAP = 2**128
