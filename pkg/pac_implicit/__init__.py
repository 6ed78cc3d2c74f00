__all__ = ["PacImplicit", "Goal"]

from .optimise.constants import Goal
from .pac_implicit import PacImplicit
