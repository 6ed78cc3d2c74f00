from enum import IntEnum


class Status(IntEnum):
    SAT = 0
    UNSAT = 1


class BoundKind(IntEnum):
    LOWER = 0
    UPPER = 1
    BOTH = 2


FM_MAX_VARIABLES = 5
FM_MAX_ATOMS = 12
