"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid experiment configuration or module-library content."""


class ParseError(ValueError):
    """Malformed input file (bad frame length, non-numeric sample, ...)."""


class UnsupportedFormatError(ParseError):
    """Input declares a storage format this reader does not handle."""


class MetricUndefinedError(ValueError):
    """Quality metric has no defined value for the given inputs."""


class InfeasibleConstraintError(RuntimeError):
    """No candidate design satisfies the active quality constraint."""

    def __init__(self, stage_id: str, message: str | None = None):
        self.stage_id = stage_id
        super().__init__(message or f"no design satisfies the quality constraint at stage {stage_id}")
