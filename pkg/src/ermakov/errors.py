"""Exception hierarchy shared by every module of the package."""


class ErmakovError(Exception):
    """Base class for all package errors."""


class ConfigError(ErmakovError):
    """Malformed or inconsistent scenario configuration."""


class ExprError(ErmakovError):
    """Base class for expression-layer failures."""


class ExprSyntaxError(ExprError, ConfigError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UndeclaredVariableError(ExprError, ConfigError):
    def __init__(self, name, offset=None):
        where = "" if offset is None else f" at offset {offset}"
        super().__init__(f"undeclared variable {name!r}{where}")
        self.name = name
        self.offset = offset


class MissingBindingError(ExprError):
    def __init__(self, name):
        super().__init__(f"no binding supplied for variable {name!r}")
        self.name = name


class NumericalError(ErmakovError):
    """Base class for failures of a numerical procedure."""


class DomainError(ExprError, NumericalError):
    """Evaluation left the domain of an operation (never reported as NaN)."""


class QuadratureError(NumericalError):
    """Adaptive quadrature could not reach the requested tolerance."""


class RootFindingError(NumericalError):
    """A bracket could not be found or the iteration did not converge."""


class SingularConfigurationError(NumericalError):
    """State at which the equations of motion are singular."""


class StepSizeUnderflowError(NumericalError):
    def __init__(self, message, t, state):
        super().__init__(message)
        self.t = t
        self.state = state


class NonFiniteStateError(NumericalError):
    def __init__(self, message, t):
        super().__init__(message)
        self.t = t


class CheckFailed(ErmakovError):
    """A verification check ran to completion but exceeded its tolerance."""
