"""Exception hierarchy.

Three broad families map onto CLI exit codes: bad inputs (3), infeasible
constraint sets (2), exhausted sampling budgets (4).
"""


class DagsynthError(Exception):
    """Base class for all errors raised by this package."""


class InputError(DagsynthError):
    """Malformed user input: files, schemas, unknown names."""


class InfeasibleError(DagsynthError):
    """Constraint set cannot be satisfied (detected statically or at runtime)."""


class BudgetError(DagsynthError):
    """A bounded sampling loop ran out of attempts."""


# --- discretizer ---

class EmptyColumnError(InputError):
    pass


class UnknownCategoryError(InputError):
    pass


class BinOutOfRangeError(InputError):
    pass


class CategoricalHasNoCenterError(InputError):
    pass


# --- dag ---

class CycleDetectedError(InputError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cycle detected: " + " -> ".join(map(str, self.cycle)))


class UnknownNodeError(InputError):
    pass


# --- trees ---

class NodeHasNoDataError(InputError):
    pass


class MissingParentValueError(InputError):
    pass


class NoFeasibleLeafError(InfeasibleError):
    pass


# --- constraints ---

class UnknownFeatureError(InputError):
    pass


class TypeMismatchError(InputError):
    pass


# --- generation ---

class EmptyMaskedDistributionError(InfeasibleError):
    pass


class InfeasibleIntersectionError(InfeasibleError):
    pass


class InfeasibleConstraintsError(InfeasibleError):
    """Raised when the pre-generation feasibility check fails."""


class RetriesExhaustedError(BudgetError):
    pass


# --- uncertainty / counterfactual ---

class NonPositiveAlphaError(InputError):
    pass


class MissingValueError(InputError):
    pass


# --- oracle ---

class NearZeroMechanismError(DagsynthError):
    pass


class BudgetExhaustedError(BudgetError):
    pass


# --- metrics ---

class SchemaMismatchError(InputError):
    pass


class NoMinorityClassError(InputError):
    pass


# --- model files ---

class VersionMismatchError(InputError):
    pass


class CorruptFileError(InputError):
    pass
