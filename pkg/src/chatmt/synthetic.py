"""Synthetic context-dependent corpus and deterministic mock translators.

The bundled corpus contains short support conversations about a broken
device. The device is named only in the opening turns; later turns refer to
it with a bare pronoun, so a translator can only resolve the referent from
the history window or the rolling summary. The paired mock backend does
exactly that, which makes the context ablation produce a guaranteed quality
gap without any network calls.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Sequence

from .backend import Message, MockBackend
from .context import SUMMARIZE_SYSTEM, truncate_summary
from .corpus import ChatRecord, Conversation, assemble_conversations, read_jsonl

CORPUS_RESOURCE = "context_corpus.jsonl"

# entity -> Korean rendering; cycled over conversations
ENTITIES = [
    ("printer", "프린터"),
    ("router", "라우터"),
    ("keyboard", "키보드"),
    ("monitor", "모니터"),
    ("speaker", "스피커"),
    ("charger", "충전기"),
    ("headset", "헤드셋"),
    ("scanner", "스캐너"),
    ("tablet", "태블릿"),
    ("camera", "카메라"),
    ("controller", "컨트롤러"),
    ("microphone", "마이크"),
]

_FILLERS = [
    ("I am sorry to hear that.", "그런 일이 있었다니 유감입니다."),
    ("I already checked the cable.", "이미 케이블을 확인했습니다."),
    ("Did you update the firmware?", "펌웨어를 업데이트하셨나요?"),
]

GENERIC_PRONOUN = "그것"


def _conversation_rows(index: int) -> list[dict]:
    entity_en, entity_ko = ENTITIES[index % len(ENTITIES)]
    doc_id = f"ctx-{index:03d}"
    script = [
        ("customer", f"My {entity_en} stopped working yesterday.",
         f"제 {entity_ko}가 어제 작동을 멈췄습니다."),
        ("agent", *_FILLERS[0]),
        ("customer", *_FILLERS[1]),
        ("agent", *_FILLERS[2]),
        ("customer", "It is still broken.", f"{entity_ko}는 여전히 고장났습니다."),
        ("agent", "We will replace it soon.", f"곧 {entity_ko}를 교체해 드리겠습니다."),
    ]
    return [
        {
            "source_language": "en",
            "target_language": "ko",
            "source": source,
            "reference": reference,
            "doc_id": doc_id,
            "sender": sender,
        }
        for sender, source, reference in script
    ]


def build_context_corpus(conversation_count: int = 24) -> list[Conversation]:
    """Deterministic context-dependent corpus, en->ko."""
    records = []
    for index in range(conversation_count):
        for row in _conversation_rows(index):
            records.append(ChatRecord(
                source_language=row["source_language"],
                target_language=row["target_language"],
                source=row["source"],
                doc_id=row["doc_id"],
                sender=row["sender"],
                reference=row["reference"],
            ))
    return assemble_conversations(records)


def load_bundled_corpus() -> list[Conversation]:
    """The checked-in copy of build_context_corpus(24)."""
    path = resources.files("chatmt").joinpath("data").joinpath(CORPUS_RESOURCE)
    with resources.as_file(path) as real_path:
        return assemble_conversations(list(read_jsonl(real_path)))


def write_corpus(path: str | Path, conversations: Sequence[Conversation]) -> None:
    from .corpus import flatten, write_jsonl

    write_jsonl(path, flatten(conversations))


# --- mock translators ---------------------------------------------------------

def _extract_source(user_content: str) -> str:
    for line in reversed(user_content.splitlines()):
        if line.startswith("Source: "):
            return line[len("Source: "):]
    return user_content.strip().splitlines()[-1] if user_content.strip() else ""


def _mock_summary(user_content: str) -> str:
    # Extractive, deterministic: strip the instruction line, join the turns.
    lines = [ln for ln in user_content.splitlines()[1:] if ln.strip()]
    merged = " ".join(part.split(": ", 1)[-1] for part in lines)
    return truncate_summary(merged)


# Exact-match table for the unambiguous sentences.
_DIRECT_TABLE = {
    **{
        f"My {entity_en} stopped working yesterday.": f"제 {entity_ko}가 어제 작동을 멈췄습니다."
        for entity_en, entity_ko in ENTITIES
    },
    **dict(_FILLERS),
}


def _context_reply(messages: list[Message]) -> str:
    system = messages[0].get("content", "")
    if system == SUMMARIZE_SYSTEM:
        return _mock_summary(messages[1].get("content", ""))
    user = messages[1].get("content", "")
    source = _extract_source(user)
    if source in _DIRECT_TABLE:
        return _DIRECT_TABLE[source]

    # Ambiguous sentences: resolve the pronoun from everything above the
    # source line (history turns, their translations, the summary line).
    context_blob = user[: user.rfind("Source: ")] if "Source: " in user else ""
    referent = GENERIC_PRONOUN
    for entity_en, entity_ko in ENTITIES:
        if entity_en in context_blob or entity_ko in context_blob:
            referent = entity_ko
            break
    if source == "It is still broken.":
        return f"{referent}는 여전히 고장났습니다."
    if source == "We will replace it soon.":
        return f"곧 {referent}를 교체해 드리겠습니다."
    return f"{referent}: 번역할 수 없습니다."


def _echo_reply(messages: list[Message]) -> str:
    system = messages[0].get("content", "")
    if system == SUMMARIZE_SYSTEM:
        return _mock_summary(messages[1].get("content", ""))
    return _extract_source(messages[1].get("content", ""))


def _bilingual_reply(messages: list[Message]) -> str:
    """Language-correct stand-in: Korean out for ko-target prompts, English
    out for en-target prompts, keyed by a digest of the source text."""
    import hashlib

    system = messages[0].get("content", "")
    user = messages[1].get("content", "")
    if system == SUMMARIZE_SYSTEM:
        return _mock_summary(user)
    source = _extract_source(user)
    digest = hashlib.md5(source.encode("utf-8")).hexdigest()[:6]
    if "to Korean." in user.splitlines()[0]:
        return f"한국어 번역 {digest}"
    return f"english translation {digest}"


def context_mock_backend() -> MockBackend:
    """Backend that resolves pronouns correctly only when context is present."""
    return MockBackend(reply=_context_reply)


def echo_mock_backend() -> MockBackend:
    """Backend that parrots the source text (and summarizes extractively)."""
    return MockBackend(reply=_echo_reply)


def bilingual_mock_backend() -> MockBackend:
    """Backend whose replies always land in the expected target language."""
    return MockBackend(reply=_bilingual_reply)
