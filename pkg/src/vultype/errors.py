"""Exception types shared across the pipeline."""


class VultypeError(Exception):
    """Base class for all pipeline failures."""


class ConfigError(VultypeError):
    """Bad configuration, unusable flags, or missing input files (CLI exit 2)."""


class DatasetError(VultypeError):
    """Malformed or inconsistent dataset records."""


class LexError(VultypeError):
    """Source text rejected by the strict lexer."""

    def __init__(self, message: str, line: int):
        super().__init__(f"{message} at line {line}")
        self.line = line


class ExtractionError(VultypeError):
    """Token stream cannot be bucketed into syntactic elements."""


class FeatureError(VultypeError):
    """Vectorizer or feature-selection contract violation."""


class ModelError(VultypeError):
    """Classifier training/prediction contract violation."""


class MiningError(VultypeError):
    """Distinguishing-token mining contract violation."""


class RefineError(VultypeError):
    """Prediction refinement contract violation."""
