"""Pukanszky and measure-multiplicity invariants of abelian group masas.

The package computes, with exact rational arithmetic, the double coset
structure of a few parametrized matrix groups over the rationals, reads off
the Pukanszky invariant of the masa generated by their diagonal subgroup, and
carries a symbolic calculus for the finer measure-multiplicity invariant
under direct sums, tensor products and free products.
"""

from .extnat import INF, PukSet
from .errors import (
    CalculusInapplicable,
    ConsistencyError,
    CriterionInapplicable,
    DomainError,
    GuardError,
    RecipeError,
    StructuralError,
)

__version__ = "0.1.0"

__all__ = [
    "INF",
    "PukSet",
    "CalculusInapplicable",
    "ConsistencyError",
    "CriterionInapplicable",
    "DomainError",
    "GuardError",
    "RecipeError",
    "StructuralError",
]
