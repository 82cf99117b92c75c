"""Exception types shared across the package."""


class ConfigError(ValueError):
    """An experiment configuration is malformed or inconsistent."""

    def __init__(self, message, field=None):
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field


class InfeasibleBudgetError(ValueError):
    """The energy budget cannot fund even the smallest usable pulse."""


class NoThresholdError(ValueError):
    """The two conditional count distributions are identical; no detector exists."""


class ThresholdUnsetError(RuntimeError):
    """An operation required a detection threshold that was never solved for."""


class ConvergenceError(RuntimeError):
    """An iterative routine hit its iteration cap before converging."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or []
