from pathlib import Path

import pytest

from chatmt.context import ContextBundle, HistoryEntry, Summary
from chatmt.errors import UnsupportedDirection
from chatmt.prompting import (
    build_prompt,
    render_instruction,
    render_messages,
    render_minimal_instruction,
    render_system,
)

from .conftest import PW_RESET_HISTORY, PW_RESET_SOURCE, PW_RESET_SUMMARY

FIXTURES = Path(__file__).parent / "fixtures"


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


def pw_reset_bundle() -> ContextBundle:
    return ContextBundle(
        history=[
            HistoryEntry(original=orig, sender="agent", translation=trans)
            for orig, trans in PW_RESET_HISTORY
        ],
        summary=Summary(text=PW_RESET_SUMMARY, covered_turns=3),
    )


def test_system_golden_bytes():
    assert render_system() == fixture_text("system.txt")


def test_system_idempotent_and_length():
    assert render_system() == render_system()
    # frozen from the independent code-point count of the fixture string
    assert len(render_system()) == 68


def test_instruction_ko_en_golden_bytes():
    got = render_instruction(("ko", "en"), Summary(text=PW_RESET_SUMMARY, covered_turns=3))
    assert got == fixture_text("instruction_ko_en_with_summary.txt")


def test_instruction_en_ko_golden_bytes():
    got = render_instruction(("en", "ko"))
    assert got == fixture_text("instruction_en_ko_no_summary.txt")
    assert "from English to Korean" in got.splitlines()[0]


def test_instruction_summary_line_presence():
    summary = Summary(text="gist", covered_turns=3)
    with_summary = render_instruction(("ko", "en"), summary)
    without = render_instruction(("ko", "en"))
    assert with_summary.count("Dialogue Context:") == 1
    assert with_summary.endswith("Dialogue Context: gist")
    assert without.count("Dialogue Context:") == 0


def test_instruction_bullets_in_order():
    text = render_instruction(("ko", "en"))
    bullets = [line for line in text.splitlines() if line.startswith("- ")]
    assert len(bullets) == 6
    assert bullets[0].startswith("- Provide only the translation")
    assert bullets[-1].startswith("- Ensure your translations")


def test_unsupported_direction():
    with pytest.raises(UnsupportedDirection):
        render_instruction(("en", "fr"))


def test_domain_note_override():
    text = render_instruction(("ko", "en"), domain_note="Banking support chat.")
    assert "Banking support chat." in text
    assert "game company" not in text


def test_messages_without_history():
    messages = render_messages(ContextBundle(), "INSTR", "SYS", "hello")
    assert [m["role"] for m in messages] == ["system", "user"]
    assert messages[0]["content"] == "SYS"
    assert messages[1]["content"] == "INSTR\nSource: hello"


def test_messages_password_reset_order():
    instruction = render_instruction(("ko", "en"), Summary(text=PW_RESET_SUMMARY, covered_turns=3))
    messages = render_messages(pw_reset_bundle(), instruction, render_system(), PW_RESET_SOURCE)
    user = messages[1]["content"]
    first_history = user.index(PW_RESET_HISTORY[0][0])
    second_history = user.index("Am I correct?")
    source_at = user.index(f"Source: {PW_RESET_SOURCE}")
    assert user.index(instruction) == 0
    assert 0 < first_history < second_history < source_at
    # translations ride along on the following line
    assert PW_RESET_HISTORY[0][1] in user
    assert "맞습니까?" in user
    assert "agent: Am I correct?" in user


def test_minimal_instruction():
    text = render_minimal_instruction(("ko", "en"))
    lines = text.splitlines()
    assert lines[0] == (
        "You are tasked with translating the following sentences from Korean to English."
    )
    assert lines[1].startswith("- Provide only the translation")
    assert len(lines) == 2
    with_summary = render_minimal_instruction(("ko", "en"), Summary(text="s", covered_turns=1))
    assert with_summary.endswith("Dialogue Context: s")


def test_build_prompt_package_fields():
    package, messages = build_prompt(pw_reset_bundle(), ("ko", "en"), PW_RESET_SOURCE)
    assert package.system == render_system()
    assert package.source == PW_RESET_SOURCE
    assert package.direction == ("ko", "en")
    assert package.instruction in messages[1]["content"]
