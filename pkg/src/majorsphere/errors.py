"""Exception hierarchy shared by all modules.

Every error raised for bad numerical input derives from ``MajorsphereError``
so that the command line front end can map it to exit code 1.
"""


class MajorsphereError(ValueError):
    """Base class for domain errors."""


class DimensionError(MajorsphereError):
    """Sequence lengths or point dimensions do not agree."""


class DomainError(MajorsphereError):
    """A value falls outside the domain of a potential function."""


class SingularityError(DomainError):
    """Coincident points where the kernel is singular."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class ParameterRangeError(MajorsphereError):
    """A generator or solver parameter lies outside its admissible range."""


class HypothesisError(MajorsphereError):
    """The hypotheses needed to report a bound or certificate do not hold."""


class PointFileError(MajorsphereError):
    """Malformed point-set file."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
