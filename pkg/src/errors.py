"""
Exceptions raised by the attention field simulator
"""

from typing import Optional


class SimulationError(Exception):
    """Base class for every error raised by the simulator"""


class InvalidParameterError(SimulationError, ValueError):
    """A kernel, grid or stimulus parameter is outside its valid range"""


class StabilityError(SimulationError, ValueError):
    """Forward-Euler stability bound dt/tau < 1 is violated"""

    def __init__(self, name: str, dt: float, tau: float):
        self.name = name
        self.dt = dt
        self.tau = tau
        super().__init__(
            f"Stability bound violated for '{name}': dt/tau = {dt / tau:.4g} (must be < 1)"
        )


class DuplicateNameError(SimulationError, ValueError):
    """A map or unit name is already registered in the network"""


class UnknownIdError(SimulationError, KeyError):
    """A projection references a map or unit that does not exist"""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown id"


class ConfigError(SimulationError, ValueError):
    """Run or model configuration failed validation"""

    def __init__(self, message: str, field: Optional[str] = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)


class ConfigParseError(ConfigError):
    """Configuration file is not well-formed"""

    def __init__(self, message: str, path: str, line: int, column: int):
        self.path = path
        self.line = line
        self.column = column
        super().__init__(f"{path}:{line}:{column}: {message}")


class NoFocusError(SimulationError, RuntimeError):
    """A saccade was requested while the focus map holds no bubble"""
