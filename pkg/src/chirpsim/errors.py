"""Exception types raised by chirpsim."""


class ConfigurationError(ValueError):
    """Invalid pulse, system, grid or scenario description."""


class IntegrationError(RuntimeError):
    """The time integration lost trace or positivity (usually dt too large)."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time
