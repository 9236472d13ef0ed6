"""Exception types shared across the package."""


class MedcorpusError(Exception):
    """Base class for all data/usage errors raised by this package."""


class LexiconError(MedcorpusError):
    """Lexicon file unreadable, undecodable, or empty after normalization."""


class ConfigError(MedcorpusError):
    """Malformed threshold/tokenizer/topic configuration."""


class DataFormatError(MedcorpusError):
    """Malformed input record, box list, ranking file, or QA item."""


class LlmClientError(MedcorpusError):
    """Transport-level failure talking to an external LLM endpoint."""
