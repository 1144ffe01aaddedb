"""Exception types shared across the toolkit."""


class LipSyncError(Exception):
    """Base class for all toolkit errors."""


class FormatError(LipSyncError):
    """Malformed input data (CSV, WAV, JSON documents)."""


class LibraryError(FormatError):
    """Viseme library file cannot be loaded or is internally inconsistent."""


class PinyinError(LipSyncError):
    """A syllable cannot be decomposed into initial and final."""

    def __init__(self, message: str, syllable: str = "", position: int = 0):
        super().__init__(message)
        self.syllable = syllable
        self.position = position


class MappingError(LipSyncError):
    """A parsed syllable has no viseme mapping, or a mapping table is invalid."""


class ScriptError(LipSyncError):
    """Timed script violates ordering or overlap rules."""


class BuildError(LipSyncError):
    """Viseme extraction from a capture stream failed."""


class InsufficientCyclesError(BuildError):
    """Fewer pronunciation cycles were detected than required."""

    def __init__(self, found: int, required: int):
        super().__init__(
            f"insufficient cycles: detected {found} pronunciation cycles, "
            f"need at least {required}"
        )
        self.found = found
        self.required = required


class SynthesisError(LipSyncError):
    """Script cannot be synthesized against the given library and table."""


class CalibrationError(LipSyncError):
    """Actuator calibration file is invalid."""
