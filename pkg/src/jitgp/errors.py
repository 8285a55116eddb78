"""Exception hierarchy shared by all stages.

Exit-code mapping used by the CLI: ConfigError -> 1, DataError (and
subclasses) -> 2, anything else -> 3.
"""


class JitgpError(Exception):
    exit_code = 3


class ConfigError(JitgpError):
    """Bad configuration, CLI usage, or invalid hyperparameter/option."""

    exit_code = 1


class DataError(JitgpError):
    """Malformed or inconsistent input data."""

    exit_code = 2


class ParseError(DataError):
    """Unparseable changelog or table text."""


class SchemaError(DataError):
    """Delimited input missing required columns."""


class DomainError(DataError):
    """Input outside an operation's domain (empty set, bad range)."""


class ConsistencyError(DataError):
    """Cross-references between inputs do not line up."""


class ShapeError(DataError):
    """Array width/length mismatch."""


class StageError(JitgpError):
    """Wraps a failure inside a named pipeline stage."""

    def __init__(self, stage: str, hint: str, cause: Exception):
        super().__init__(f"stage '{stage}' failed: {cause} ({hint})")
        self.stage = stage
        self.hint = hint
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", 3)
