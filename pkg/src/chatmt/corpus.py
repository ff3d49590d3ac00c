"""Ingestion of bilingual customer-support chat corpora.

Input is UTF-8 JSONL, one object per line, with the field names used by the
WMT chat data (``source_language``, ``target_language``, ``source``,
``reference``, ``doc_id``, ``client_id``, ``sender``). Rows are grouped into
conversations by ``doc_id`` in encounter order and given a dense
``turn_index``.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from .errors import (
    BadLanguagePair,
    InvalidField,
    MalformedLine,
    MissingField,
)

SENDERS = ("customer", "agent")
MANDATORY_FIELDS = ("source_language", "target_language", "source", "doc_id", "sender")
_KNOWN_FIELDS = MANDATORY_FIELDS + ("reference", "client_id", "turn_index")


@dataclass
class ChatRecord:
    """One dataset row: a single utterance plus its translation metadata."""

    source_language: str
    target_language: str
    source: str
    doc_id: str
    sender: str
    reference: str | None = None
    client_id: str | None = None
    turn_index: int = 0
    extra: dict = field(default_factory=dict)  # unknown input fields, passed through

    @property
    def direction(self) -> tuple[str, str]:
        return (self.source_language, self.target_language)


@dataclass
class Conversation:
    """All turns sharing one doc_id, ordered by turn_index without gaps."""

    doc_id: str
    turns: list[ChatRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.turns)


@dataclass
class SplitStats:
    split_name: str
    record_count: int
    conversation_count: int
    direction_counts: dict[str, int]


def _require_str(obj: dict, name: str, line_number: int) -> str:
    value = obj[name]
    if not isinstance(value, str):
        raise InvalidField(name, f"expected string, got {type(value).__name__}", line_number)
    return value


def parse_record(line: str, line_number: int = 0) -> ChatRecord:
    """Parse one JSONL line into a ChatRecord.

    Raises MalformedLine for non-JSON or non-object input, MissingField when a
    mandatory field is absent or blank, InvalidField on type/vocabulary
    violations, and BadLanguagePair when source and target coincide. Unknown
    fields are kept in ``record.extra``.
    """
    try:
        obj = json.loads(line)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedLine(line_number, f"invalid JSON ({exc})") from exc
    if not isinstance(obj, dict):
        raise MalformedLine(line_number, f"expected a JSON object, got {type(obj).__name__}")

    for name in MANDATORY_FIELDS:
        if name not in obj or obj[name] is None:
            raise MissingField(name, line_number)

    source_language = _require_str(obj, "source_language", line_number)
    target_language = _require_str(obj, "target_language", line_number)
    source = _require_str(obj, "source", line_number)
    doc_id = _require_str(obj, "doc_id", line_number)
    sender = _require_str(obj, "sender", line_number)

    if not source.strip():
        raise MissingField("source", line_number)
    if source_language == target_language:
        raise BadLanguagePair(
            f"line {line_number}: source_language == target_language == {source_language!r}"
        )
    if sender not in SENDERS:
        raise InvalidField("sender", f"expected one of {SENDERS}, got {sender!r}", line_number)

    reference = obj.get("reference")
    if reference is not None and not isinstance(reference, str):
        raise InvalidField("reference", "expected string or null", line_number)
    client_id = obj.get("client_id")
    if client_id is not None and not isinstance(client_id, str):
        raise InvalidField("client_id", "expected string or null", line_number)
    turn_index = obj.get("turn_index", 0)
    if not isinstance(turn_index, int) or isinstance(turn_index, bool) or turn_index < 0:
        raise InvalidField("turn_index", "expected non-negative integer", line_number)

    extra = {k: v for k, v in obj.items() if k not in _KNOWN_FIELDS}
    return ChatRecord(
        source_language=source_language,
        target_language=target_language,
        source=source,
        doc_id=doc_id,
        sender=sender,
        reference=reference,
        client_id=client_id,
        turn_index=turn_index,
        extra=extra,
    )


def serialize_record(record: ChatRecord) -> dict:
    """Inverse of parse_record; emits the input schema plus turn_index."""
    obj: dict = {
        "source_language": record.source_language,
        "target_language": record.target_language,
        "source": record.source,
        "doc_id": record.doc_id,
        "sender": record.sender,
        "turn_index": record.turn_index,
    }
    if record.reference is not None:
        obj["reference"] = record.reference
    if record.client_id is not None:
        obj["client_id"] = record.client_id
    obj.update(record.extra)
    return obj


def read_jsonl(path: str | Path) -> Iterator[ChatRecord]:
    """Stream records from a JSONL file, skipping blank lines."""
    with Path(path).open("r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            yield parse_record(line, line_number)


def write_jsonl(path: str | Path, records: Iterable[ChatRecord]) -> int:
    """Write records as JSONL; returns the row count."""
    count = 0
    with Path(path).open("w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(serialize_record(record), ensure_ascii=False) + "\n")
            count += 1
    return count


def assemble_conversations(records: Sequence[ChatRecord]) -> list[Conversation]:
    """Group records by doc_id, preserving encounter order.

    Conversations appear in order of first encounter; turn_index is
    (re)assigned densely from 0 within each conversation.
    """
    by_doc: dict[str, Conversation] = {}
    for record in records:
        conversation = by_doc.get(record.doc_id)
        if conversation is None:
            conversation = Conversation(doc_id=record.doc_id)
            by_doc[record.doc_id] = conversation
        record.turn_index = len(conversation.turns)
        conversation.turns.append(record)
    return list(by_doc.values())


def flatten(conversations: Sequence[Conversation]) -> list[ChatRecord]:
    """Conversation-order, then turn-order view of the rows."""
    return [turn for conversation in conversations for turn in conversation.turns]


def split_stats(conversations: Sequence[Conversation], split_name: str) -> SplitStats:
    directions: Counter[str] = Counter()
    record_count = 0
    for conversation in conversations:
        for turn in conversation.turns:
            directions[f"{turn.source_language}-{turn.target_language}"] += 1
            record_count += 1
    return SplitStats(
        split_name=split_name,
        record_count=record_count,
        conversation_count=len(conversations),
        direction_counts=dict(directions),
    )
