"""Exception hierarchy.

The CLI maps these onto exit codes: RecipeError -> 2, GuardError -> 3,
ConsistencyError -> 4.
"""


class DomainError(ValueError):
    """An operation was called outside its domain (e.g. stabilizer of h in H)."""


class StructuralError(TypeError):
    """Elements or invariants of incompatible shape were combined."""


class GuardError(Exception):
    """A standing hypothesis needed by a computation does not hold."""


class CriterionInapplicable(GuardError):
    """Two distinct stabilizers are commensurable, so coset counting is not Puk."""


class CalculusInapplicable(GuardError):
    """A measure comparison fell outside the equal/singular dichotomy."""


class ConsistencyError(Exception):
    """Two independent computation paths disagree."""


class RecipeError(ValueError):
    """A recipe or family descriptor could not be parsed."""
