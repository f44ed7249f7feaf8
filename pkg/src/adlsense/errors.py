"""Exception types shared across the package.

Plain invalid arguments raise ValueError directly; the classes here mark
failure modes that callers (notably the CLI) need to tell apart.
"""


class ParseError(ValueError):
    """A sensor log file could not be parsed.

    Carries the offending path and 1-based line number when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class FormatError(ValueError):
    """A serialized artifact (dataset CSV, model or pipeline JSON) does not
    match the expected schema or version."""


class TrainingDivergenceError(RuntimeError):
    """Training produced a non-finite loss or non-finite parameters."""


class TrainingFailureError(RuntimeError):
    """A pipeline stage finished training below its configured minimum
    training accuracy. ``stage`` names the failing stage."""

    def __init__(self, stage, message):
        self.stage = stage
        super().__init__(f"stage '{stage}': {message}")


class UnsupportedSensorsError(ValueError):
    """The available sensor set supports none of the recognition methods."""
