"""Exception types shared across the package."""


class FfclabError(Exception):
    """Base class for package errors."""


class ConfigError(FfclabError):
    """Invalid configuration; message names the offending field."""


class InputError(FfclabError):
    """Malformed runtime input (non-finite action, bad shapes, ...)."""


class LifecycleError(FfclabError):
    """Operation called in an illegal state (e.g. step on a finished episode)."""


class PipelineError(FfclabError):
    """A multi-stage pipeline failed; carries per-stage causes."""

    def __init__(self, message, causes=None):
        super().__init__(message)
        self.causes = list(causes or [])


class NoDetectionError(FfclabError):
    """A requested object class produced no votes / no mask."""
