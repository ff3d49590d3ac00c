"""Exception types shared across the package.

Every error raised on a documented code path derives from ChatmtError so
callers (and the CLI) can distinguish validation problems from transport
failures.
"""

from __future__ import annotations


class ChatmtError(Exception):
    """Base class for all package errors."""


# --- corpus ---------------------------------------------------------------

class CorpusError(ChatmtError):
    """Base class for dataset ingestion errors."""


class MalformedLine(CorpusError):
    """A JSONL line is not a JSON object."""

    def __init__(self, line_number: int, reason: str):
        super().__init__(f"line {line_number}: {reason}")
        self.line_number = line_number
        self.reason = reason


class MissingField(CorpusError):
    """A mandatory record field is absent or blank."""

    def __init__(self, field: str, line_number: int = 0):
        super().__init__(f"line {line_number}: missing field {field!r}")
        self.field = field
        self.line_number = line_number


class InvalidField(CorpusError):
    """A record field has the wrong type or an out-of-vocabulary value."""

    def __init__(self, field: str, reason: str, line_number: int = 0):
        super().__init__(f"line {line_number}: field {field!r}: {reason}")
        self.field = field
        self.line_number = line_number


class BadLanguagePair(CorpusError):
    """Source and target language are identical (or unusable)."""


# --- context / summarization ----------------------------------------------

class SummaryUnavailable(ChatmtError):
    """The summarizer could not produce a summary."""


class EmptySummary(SummaryUnavailable):
    """The backend returned a blank summary."""


# --- backend ---------------------------------------------------------------

class BackendError(ChatmtError):
    """Base class for chat-completion transport failures."""


class Timeout(BackendError):
    """The request did not complete within the configured timeout."""


class HttpError(BackendError):
    """The server answered with a non-success HTTP status."""

    def __init__(self, status: int, detail: str = ""):
        super().__init__(f"HTTP {status}" + (f": {detail}" if detail else ""))
        self.status = status


class AuthError(BackendError):
    """401/403 from the server; never retried."""

    def __init__(self, status: int):
        super().__init__(f"authentication rejected (HTTP {status})")
        self.status = status


class ProtocolError(BackendError):
    """The response body could not be parsed as a chat completion."""


# --- prompting / metrics ----------------------------------------------------

class UnsupportedDirection(ChatmtError):
    """Translation direction outside the supported ko<->en pairs."""


class LengthMismatch(ChatmtError):
    """Hypothesis and reference streams have different lengths."""


class EmptyCorpus(ChatmtError):
    """A metric was asked to score zero segments."""


class NoReferences(ChatmtError):
    """No dataset row carries a reference translation."""


# --- service -----------------------------------------------------------------

class SessionNotFound(ChatmtError):
    """Unknown session id."""


class CorruptLog(ChatmtError):
    """Event log has a sequence gap or is missing its creation event."""
