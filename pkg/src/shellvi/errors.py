"""Exception hierarchy shared by all shellvi modules."""


class ShellviError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ShellviError):
    """A chart was evaluated outside its parameter domain."""


class GeometryError(ShellviError):
    """Degenerate or invalid surface geometry (e.g. parallel tangents)."""


class CapabilityError(ShellviError):
    """The requested operation exceeds what the object can provide."""


class ParameterError(ShellviError):
    """A numeric parameter violates its admissible range."""


class ConfigError(ShellviError):
    """A run configuration file is malformed or inconsistent."""


class PipelineError(ShellviError):
    """Failure inside the end-to-end pipeline, tagged with its stage."""

    def __init__(self, stage, message):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
