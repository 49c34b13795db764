"""Exception hierarchy shared by the library, the CLI, and the HTTP service.

Exit-code contract (used by the CLI):
    0  success
    2  configuration error (bad key, unparsable value, malformed spec)
    3  numerical refusal (integrator step too large, failed scan points)
    4  I/O failure (unreadable config, unwritable output path)
"""


class SimulatorError(Exception):
    """Base class; carries the CLI exit code for the error family."""

    exit_code = 1
    kind = "internal"


class ConfigError(SimulatorError):
    """Invalid configuration. Messages must name the offending key."""

    exit_code = 2
    kind = "config"


class NumericalRefusal(SimulatorError):
    """The requested computation would produce unreliable numbers."""

    exit_code = 3
    kind = "numerical"


class OutputError(SimulatorError):
    """Reading or writing a file failed."""

    exit_code = 4
    kind = "io"
