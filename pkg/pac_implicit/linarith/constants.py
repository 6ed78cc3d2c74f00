from enum import IntEnum


class Relation(IntEnum):
    """Relation of a linear atom ``expr <relation> 0``."""

    LE = 0
    LT = 1
    GE = 2
    GT = 3
    EQ = 4
    NEQ = 5


# fmt: off
RELATION_SYMBOLS = {
    Relation.LE     : "<=",
    Relation.LT     : "<",
    Relation.GE     : ">=",
    Relation.GT     : ">",
    Relation.EQ     : "=",
    Relation.NEQ    : "!=",
}

SYMBOL_RELATIONS = {
    "<="    : Relation.LE,
    "≤"     : Relation.LE,
    "<"     : Relation.LT,
    ">="    : Relation.GE,
    "≥"     : Relation.GE,
    ">"     : Relation.GT,
    "="     : Relation.EQ,
    "=="    : Relation.EQ,
    "!="    : Relation.NEQ,
    "≠"     : Relation.NEQ,
}

# Relations flipped when both sides of an atom are negated
MIRRORED = {
    Relation.GE : Relation.LE,
    Relation.GT : Relation.LT,
}
# fmt: on
