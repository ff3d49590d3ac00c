"""Per-turn context construction: a verbatim window of the two most recent
turns plus a bounded summary of everything older.

The summary text is hard-capped at 200 Unicode code points; truncation backs
off to a grapheme-cluster boundary so Hangul jamo sequences, combining marks,
emoji ZWJ sequences and flag pairs are never cut in half.
"""

from __future__ import annotations

import json
import threading
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol, Sequence

from .corpus import Conversation
from .errors import BackendError, EmptySummary, SummaryUnavailable

SUMMARY_MAX_CHARS = 200
HISTORY_WINDOW = 2

SUMMARIZE_SYSTEM = "You are a concise assistant that summarizes customer-support conversations."
SUMMARIZE_INSTRUCTION = (
    "Summarize the following customer-support conversation in at most 200 "
    "characters, preserving participant intents, named placeholders "
    "(e.g. NAME-N), and unresolved issues. Conversation:"
)
UPDATE_INSTRUCTION = (
    "Rewrite the summary of a customer-support conversation so it also covers "
    "one newly elapsed turn. Keep it under 200 characters and preserve named "
    "placeholders (e.g. NAME-N) and unresolved issues."
)

SUMMARIZE_TEMPERATURE = 0.3  # mild diversity; translation stays at the config default


class ChatBackend(Protocol):
    """Anything with a chat-completion call (see chatmt.backend)."""

    def complete(
        self, messages: list[dict], temperature: float | None = None
    ) -> "CompletionLike": ...


class CompletionLike(Protocol):
    text: str


@dataclass
class HistoryEntry:
    """One prior turn carried verbatim: the utterance and, when known, its
    translation."""

    original: str
    sender: str
    translation: str | None = None


@dataclass
class Summary:
    text: str
    covered_turns: int

    def __post_init__(self) -> None:
        if len(self.text) > SUMMARY_MAX_CHARS:
            raise ValueError(f"summary exceeds {SUMMARY_MAX_CHARS} code points")
        if (self.covered_turns == 0) != (self.text == ""):
            raise ValueError("covered_turns == 0 iff text is empty")


@dataclass
class ContextBundle:
    """History window (at most 2 entries, most recent last) plus an optional
    summary of the older turns."""

    history: list[HistoryEntry] = field(default_factory=list)
    summary: Summary | None = None
    summary_failed: bool = False


Summarizer = Callable[[Sequence[HistoryEntry]], Summary]


# --- grapheme-aware truncation ------------------------------------------------

_ZWJ = "‍"


def _is_regional_indicator(ch: str) -> bool:
    return 0x1F1E6 <= ord(ch) <= 0x1F1FF


def _is_extend(ch: str) -> bool:
    # Combining marks, ZWJ/ZWNJ, variation selectors, emoji skin-tone modifiers.
    code = ord(ch)
    if unicodedata.category(ch) in ("Mn", "Mc", "Me"):
        return True
    if code in (0x200C, 0x200D):
        return True
    if 0xFE00 <= code <= 0xFE0F or 0xE0100 <= code <= 0xE01EF:
        return True
    if 0x1F3FB <= code <= 0x1F3FF:
        return True
    return False


def _hangul_class(ch: str) -> str | None:
    code = ord(ch)
    if 0x1100 <= code <= 0x115F or 0xA960 <= code <= 0xA97C:
        return "L"
    if 0x1160 <= code <= 0x11A7 or 0xD7B0 <= code <= 0xD7C6:
        return "V"
    if 0x11A8 <= code <= 0x11FF or 0xD7CB <= code <= 0xD7FB:
        return "T"
    if 0xAC00 <= code <= 0xD7A3:
        return "LV" if (code - 0xAC00) % 28 == 0 else "LVT"
    return None


def _splits_cluster(text: str, cut: int) -> bool:
    """Would slicing text[:cut] separate two code points that belong to one
    grapheme cluster? Implements the relevant UAX #29 join rules."""
    prev, nxt = text[cut - 1], text[cut]
    if _is_extend(nxt):
        return True
    if prev == _ZWJ:
        return True
    prev_h, nxt_h = _hangul_class(prev), _hangul_class(nxt)
    if prev_h and nxt_h:
        if prev_h == "L" and nxt_h in ("L", "V", "LV", "LVT"):
            return True
        if prev_h in ("LV", "V") and nxt_h in ("V", "T"):
            return True
        if prev_h in ("LVT", "T") and nxt_h == "T":
            return True
    if _is_regional_indicator(prev) and _is_regional_indicator(nxt):
        # A flag is a pair of regional indicators: splitting after an odd run
        # would cut one in half.
        run = 0
        i = cut - 1
        while i >= 0 and _is_regional_indicator(text[i]):
            run += 1
            i -= 1
        return run % 2 == 1
    return False


def truncate_summary(text: str, limit: int = SUMMARY_MAX_CHARS) -> str:
    """Clamp text to ``limit`` code points without splitting a grapheme
    cluster; the result is always a prefix of the input."""
    if len(text) <= limit:
        return text
    cut = limit
    while cut > 0 and _splits_cluster(text, cut):
        cut -= 1
    return text[:cut]


# --- summarization ------------------------------------------------------------

def _render_turns(turns: Sequence[HistoryEntry]) -> str:
    return "\n".join(f"{turn.sender}: {turn.original}" for turn in turns)


def _clean_summary_text(raw: str) -> str:
    text = raw.strip()
    # Models sometimes echo the render-time prefix; the bare summary is stored.
    if text.startswith("Dialogue Context:"):
        text = text[len("Dialogue Context:"):].strip()
    return truncate_summary(text)


def summarize_turns(turns: Sequence[HistoryEntry], backend: ChatBackend) -> Summary:
    """Summarize a turn sequence via the chat backend; the result is clamped
    to 200 code points even if the backend overflows."""
    if not turns:
        raise ValueError("summarize_turns requires at least one turn")
    messages = [
        {"role": "system", "content": SUMMARIZE_SYSTEM},
        {"role": "user", "content": f"{SUMMARIZE_INSTRUCTION}\n{_render_turns(turns)}"},
    ]
    result = backend.complete(messages, temperature=SUMMARIZE_TEMPERATURE)
    text = _clean_summary_text(result.text)
    if not text:
        raise EmptySummary("backend returned a blank summary")
    return Summary(text=text, covered_turns=len(turns))


def update_summary_incremental(
    previous: Summary, evicted_turn: HistoryEntry, backend: ChatBackend
) -> Summary:
    """Fold one evicted turn into an existing summary (serving-mode path).

    With an empty previous summary this is equivalent to summarizing the
    single turn.
    """
    if previous.covered_turns == 0:
        fresh = summarize_turns([evicted_turn], backend)
        return Summary(text=fresh.text, covered_turns=1)
    messages = [
        {"role": "system", "content": SUMMARIZE_SYSTEM},
        {
            "role": "user",
            "content": (
                f"{UPDATE_INSTRUCTION}\n"
                f"Current summary: {previous.text}\n"
                f"New turn: {evicted_turn.sender}: {evicted_turn.original}"
            ),
        },
    ]
    result = backend.complete(messages, temperature=SUMMARIZE_TEMPERATURE)
    text = _clean_summary_text(result.text)
    if not text:
        raise EmptySummary("backend returned a blank summary")
    return Summary(text=text, covered_turns=previous.covered_turns + 1)


def backend_summarizer(backend: ChatBackend) -> Summarizer:
    return lambda turns: summarize_turns(turns, backend)


# --- bundle construction --------------------------------------------------------

def build_context(
    conversation: Conversation,
    index: int,
    translations: dict[int, str],
    summarizer: Summarizer,
) -> ContextBundle:
    """Build the context bundle for the turn at ``index``.

    History holds the last min(2, index) prior turns paired with their
    translations when available. The summary covers turns [0, index-3] and is
    present exactly when that range is non-empty; summarizer failures leave
    the summary absent and set ``summary_failed``.
    """
    if not 0 <= index < len(conversation.turns):
        raise IndexError(f"turn index {index} out of range for {len(conversation.turns)} turns")

    def entry(i: int) -> HistoryEntry:
        turn = conversation.turns[i]
        return HistoryEntry(
            original=turn.source, sender=turn.sender, translation=translations.get(i)
        )

    window_start = max(0, index - HISTORY_WINDOW)
    bundle = ContextBundle(history=[entry(i) for i in range(window_start, index)])

    if window_start > 0:
        try:
            bundle.summary = summarizer([entry(i) for i in range(window_start)])
        except (SummaryUnavailable, BackendError):
            bundle.summary = None
            bundle.summary_failed = True
    return bundle


# --- summary cache ----------------------------------------------------------------

class SummaryCache:
    """Summaries keyed by (doc_id, prefix_length), optionally persisted as
    JSONL so repeated runs never re-call the backend."""

    def __init__(self, path: str | Path | None = None):
        self._path = Path(path) if path is not None else None
        self._entries: dict[tuple[str, int], Summary] = {}
        self._lock = threading.Lock()
        if self._path is not None and self._path.exists():
            with self._path.open("r", encoding="utf-8") as handle:
                for line in handle:
                    if not line.strip():
                        continue
                    row = json.loads(line)
                    key = (row["doc_id"], int(row["prefix_length"]))
                    self._entries[key] = Summary(
                        text=row["text"], covered_turns=int(row["covered_turns"])
                    )

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, doc_id: str, prefix_length: int) -> Summary | None:
        return self._entries.get((doc_id, prefix_length))

    def put(self, doc_id: str, prefix_length: int, summary: Summary) -> None:
        with self._lock:
            self._entries[(doc_id, prefix_length)] = summary
            if self._path is not None:
                row = {
                    "doc_id": doc_id,
                    "prefix_length": prefix_length,
                    "text": summary.text,
                    "covered_turns": summary.covered_turns,
                }
                with self._path.open("a", encoding="utf-8") as handle:
                    handle.write(json.dumps(row, ensure_ascii=False) + "\n")
                    handle.flush()


def cached_summarizer(backend: ChatBackend, cache: SummaryCache, doc_id: str) -> Summarizer:
    def summarize(turns: Sequence[HistoryEntry]) -> Summary:
        hit = cache.get(doc_id, len(turns))
        if hit is not None:
            return hit
        summary = summarize_turns(turns, backend)
        cache.put(doc_id, len(turns), summary)
        return summary

    return summarize
