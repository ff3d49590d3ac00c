"""Prompt rendering for the translation task.

The system string and the instruction template are fixed text; only the
language names, the optional domain note, and the trailing summary line vary.
Golden tests pin the rendered bytes, so edit with care (note the curly quotes
around 'source' and 'Dialogue Context').
"""

from __future__ import annotations

from dataclasses import dataclass

from .context import ContextBundle, Summary
from .errors import UnsupportedDirection

Direction = tuple[str, str]

LANGUAGE_NAMES = {"ko": "Korean", "en": "English"}
SUPPORTED_DIRECTIONS: tuple[Direction, ...] = (("ko", "en"), ("en", "ko"))

SYSTEM_PROMPT = "You are a professional translator fluent in both Korean and English."

DEFAULT_DOMAIN_NOTE = (
    "The context involves a game user contacting a game company's customer "
    "service center online. Since the inquiries are typed, there may be many "
    "typos. Please translate with this in mind."
)

_TASK_SENTENCE = (
    "You are tasked with translating the following sentences from {source} to {target}."
)

_OUTPUT_BULLET = "- Provide only the translation of the ‘source’ text."

_INSTRUCTION_TEMPLATE = (
    _TASK_SENTENCE
    + " These sentences are part of conversations between a customer and a "
    "customer service agent.\n"
    "When translating, keep the following instructions in mind:\n"
    + _OUTPUT_BULLET + "\n"
    "- Keep the translated text in a single line.\n"
    "- {domain_note}\n"
    "- Consider the summary of the previous conversation, referred to as "
    "‘Dialogue Context’, if it is given.\n"
    "- Refer to the context from the previous conversation if it is provided.\n"
    "- Ensure your translations maintain the intended meaning and tone of the "
    "original dialogue."
)

SUMMARY_LINE_PREFIX = "Dialogue Context: "


@dataclass
class PromptPackage:
    """Everything needed for one chat-completion call."""

    system: str
    instruction: str
    source: str
    direction: Direction


def _language_names(direction: Direction) -> tuple[str, str]:
    if tuple(direction) not in SUPPORTED_DIRECTIONS:
        raise UnsupportedDirection(f"direction {direction!r} not in {SUPPORTED_DIRECTIONS}")
    src, tgt = direction
    return LANGUAGE_NAMES[src], LANGUAGE_NAMES[tgt]


def render_system() -> str:
    return SYSTEM_PROMPT


def render_instruction(
    direction: Direction,
    summary: Summary | None = None,
    domain_note: str | None = None,
) -> str:
    """Render the full instruction for a direction, appending the
    "Dialogue Context:" line exactly when a summary is present."""
    source_name, target_name = _language_names(direction)
    text = _INSTRUCTION_TEMPLATE.format(
        source=source_name,
        target=target_name,
        domain_note=domain_note if domain_note is not None else DEFAULT_DOMAIN_NOTE,
    )
    if summary is not None:
        text += f"\n{SUMMARY_LINE_PREFIX}{summary.text}"
    return text


def render_minimal_instruction(direction: Direction, summary: Summary | None = None) -> str:
    """Stripped-down instruction: the task sentence and the output-format
    bullet only (context, when present, is still announced)."""
    source_name, target_name = _language_names(direction)
    text = _TASK_SENTENCE.format(source=source_name, target=target_name) + "\n" + _OUTPUT_BULLET
    if summary is not None:
        text += f"\n{SUMMARY_LINE_PREFIX}{summary.text}"
    return text


def render_messages(
    bundle: ContextBundle, instruction: str, system: str, source: str
) -> list[dict]:
    """Assemble the two-message chat payload.

    The user message carries, in order: the instruction, each history entry as
    "<sender>: <original>" with its translation on the following line when
    known, and finally "Source: <source>".
    """
    parts = [instruction]
    for entry in bundle.history:
        parts.append(f"{entry.sender}: {entry.original}")
        if entry.translation is not None:
            parts.append(entry.translation)
    parts.append(f"Source: {source}")
    return [
        {"role": "system", "content": system},
        {"role": "user", "content": "\n".join(parts)},
    ]


def build_prompt(
    bundle: ContextBundle,
    direction: Direction,
    source: str,
    minimal: bool = False,
    domain_note: str | None = None,
) -> tuple[PromptPackage, list[dict]]:
    """Convenience wrapper: render instruction + messages for one turn."""
    summary = bundle.summary
    if minimal:
        instruction = render_minimal_instruction(direction, summary)
    else:
        instruction = render_instruction(direction, summary, domain_note)
    package = PromptPackage(
        system=render_system(),
        instruction=instruction,
        source=source,
        direction=tuple(direction),
    )
    return package, render_messages(bundle, instruction, package.system, source)
