"""Exception hierarchy shared by the solvers, simulators and file readers."""


class MinmaxAttachError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(MinmaxAttachError, ValueError):
    """A population, configuration or argument is structurally unusable."""


class InvalidFitnessError(InvalidInputError):
    """Fitness must be positive, finite and no larger than ``FITNESS_CAP``."""


class InvalidSpecError(InvalidInputError):
    """A distribution specification is out of its parameter domain."""


class OracleLimitError(MinmaxAttachError):
    """Brute-force enumeration would exceed its configured size limit."""


class DegenerateWeightsError(MinmaxAttachError, ValueError):
    """Every candidate node has zero attachment weight."""


class ParseError(InvalidInputError):
    """A node or solution table could not be parsed.

    ``line`` is the 1-based line number in the offending file, or ``None``
    when the problem is not tied to a single row.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
