"""Exception types shared across the pipeline."""


class VibratoLabError(Exception):
    """Base class for all errors raised by this package."""


class AudioFormatError(VibratoLabError):
    """The file is not a RIFF/WAVE container we can decode."""


class DomainError(VibratoLabError, ValueError):
    """An argument lies outside the physical or numerical domain of a formula."""


class AnalysisRejected(VibratoLabError):
    """The excerpt does not look like a vibrato and cannot be measured.

    ``reason`` is a short machine-readable tag (e.g. ``"no-vibrato"``).
    """

    def __init__(self, reason, message=None):
        self.reason = reason
        super().__init__(message or reason)
