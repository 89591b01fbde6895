"""Exception types raised by the solver."""


class ConfigError(ValueError):
    """Invalid run configuration; ``key`` names the offending entry."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}")


class AssemblyError(ValueError):
    """Degenerate geometry met during finite-element assembly."""


class SolverError(RuntimeError):
    """A linear or nonlinear solve broke down."""
