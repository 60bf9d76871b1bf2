"""Exception hierarchy shared by every pipeline stage.

The CLI maps each family to its own exit code, so new errors should derive
from one of the category bases below rather than from ``Exception``.
"""

from __future__ import annotations


class JsVulnError(Exception):
    """Base class for all package errors."""


class ConfigError(JsVulnError):
    """A configuration file or value is invalid."""


class DataError(JsVulnError):
    """Input data violates a contract (duplicate keys, missing columns, ...)."""


class RepositoryError(JsVulnError):
    """Git repository access failed."""


# --- fn_inventory -----------------------------------------------------------


class LexError(JsVulnError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnterminatedString(LexError):
    pass


class UnterminatedComment(LexError):
    pass


class ParseError(JsVulnError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


# --- history_miner ----------------------------------------------------------


class RepoNotFound(RepositoryError):
    pass


class CommitNotFound(RepositoryError):
    pass


class UnreadableBlob(RepositoryError):
    pass


class OutOfOrderCommit(JsVulnError):
    pass


# --- dataset_builder --------------------------------------------------------


class EmptyPatch(DataError):
    pass


class DuplicateKey(DataError):
    pass


class InsufficientClassSamples(DataError):
    pass


class RatioUnreachable(DataError):
    pass


# --- learners / evaluation --------------------------------------------------


class NonFiniteFeature(DataError):
    pass


class EmptyClass(DataError):
    pass


class FeatureManifestMismatch(DataError):
    pass


class LengthMismatch(DataError):
    pass
