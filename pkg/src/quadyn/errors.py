"""Exception hierarchy.

Domain errors (bad input, wrong parameter regime) derive from DomainError;
numerical failures (non-convergence, precision loss) from NumericalError.
The CLI maps the two families to exit codes 2 and 3.
"""


class QuadynError(Exception):
    pass


class DomainError(QuadynError, ValueError):
    pass


class NumericalError(QuadynError, ArithmeticError):
    pass


class NotPeriodic(DomainError):
    pass


class NotEscaping(DomainError):
    pass


class AlphaNotRepelling(DomainError):
    pass


class DisconnectedJulia(DomainError):
    pass


class RealInput(DomainError):
    pass


class NotNested(DomainError):
    pass


class CascadeTooShallow(DomainError):
    pass


class EmptyCascade(DomainError):
    pass


class InvalidChain(DomainError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(f"chain violates root-like conditions: {self.violations}")


class OutOfDomain(DomainError):
    def __init__(self, index, point=None):
        self.index = index
        self.point = point
        super().__init__(f"running point {point!r} left the domain of pair {index}")


class NotRepelling(DomainError):
    def __init__(self, c, multiplier):
        self.c = c
        self.multiplier = multiplier
        super().__init__(f"root c={c!r} has cycle multiplier {multiplier!r} (|λ| <= 1)")


class NotMinimal(DomainError):
    def __init__(self, c, minimal):
        self.c = c
        self.minimal = minimal
        super().__init__(f"root c={c!r} has smaller true (preperiod, period) {minimal!r}")


class SchemaVersionMismatch(DomainError):
    pass


class MalformedFile(DomainError):
    pass


class MultipleCycles(DomainError):
    pass


class NoCycleFound(NumericalError):
    pass


class NewtonDiverged(NumericalError):
    pass


class NewtonFailed(NumericalError):
    pass


class PrecisionFloor(NumericalError):
    pass


class BudgetExhausted(NumericalError):
    pass


class DepthTruncated(NumericalError):
    pass


class TruncationInsufficient(NumericalError):
    pass


class BoundaryHit(NumericalError):
    def __init__(self, column, point=None):
        self.column = column
        self.point = point
        super().__init__(f"orbit point {point!r} at column {column} lies on a puzzle boundary")


class ResolutionInsufficient(NumericalError):
    pass


class SamplingViolation(NumericalError):
    def __init__(self, point, arg, bound):
        self.point = point
        self.arg = arg
        self.bound = bound
        super().__init__(f"arg L({point!r}) = {arg!r} exceeds pi - theta* = {bound!r}")
