"""Exception hierarchy. The CLI maps each family onto an exit code."""


class HypergrowthError(Exception):
    exit_code = 1


class InvalidArgument(HypergrowthError, ValueError):
    exit_code = 2


class NumericFailure(HypergrowthError, ArithmeticError):
    exit_code = 3


class DivergentIntegral(NumericFailure):
    pass


class InfeasibleModel(HypergrowthError):
    exit_code = 4


class InfeasibleSelection(InfeasibleModel):
    """Fewer eligible old nodes than targets requested."""


class EdgeCollisionExhausted(InfeasibleModel):
    """Could not draw a hyperedge that is not already present."""


class InsufficientData(HypergrowthError, ValueError):
    exit_code = 3
