"""Exception hierarchy shared by every module."""


class GBellError(Exception):
    """Base class for all errors raised by gbell."""


class InvalidScenarioError(GBellError):
    pass


class UnsupportedCompositionError(GBellError):
    pass


class ScenarioMismatchError(GBellError):
    pass


class InvalidProbabilityError(GBellError):
    pass


class NormalizationError(GBellError):
    pass


class SignalingError(GBellError):
    pass


class IncompatibleSetError(GBellError):
    """A set of measurements is not contained in any context."""


class NotABehaviorError(GBellError):
    """A correlator specification produced a negative probability."""

    def __init__(self, message, context=None, outcome=None, value=None):
        super().__init__(message)
        self.context = context
        self.outcome = outcome
        self.value = value


class ConditioningOnNullError(GBellError):
    pass


class InvalidMixtureError(GBellError):
    pass


class UnboundedPolytopeError(GBellError):
    pass


class InfeasibleError(GBellError):
    pass


class BudgetExceededError(GBellError):
    """Double description grew past the configured ray budget."""

    def __init__(self, cap, reached):
        super().__init__(f"enumeration budget exceeded: {reached} intermediate rays > cap {cap}")
        self.cap = cap
        self.reached = reached


class DegenerateInequalityError(GBellError):
    pass


class InvalidInequalityError(GBellError):
    pass


class InvalidPairError(GBellError):
    pass


class IncompatibleContextError(GBellError):
    """Projectors inside one context fail to commute."""


class PreconditionError(GBellError):
    pass


class ConstructionError(GBellError):
    pass


class FormatError(GBellError):
    """A file could not be parsed."""
