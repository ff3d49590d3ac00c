"""Shared fixtures and deterministic helpers for the test suite."""

from __future__ import annotations

import json
import random

import pytest

from chatmt.backend import MockBackend
from chatmt.corpus import ChatRecord, Conversation
from chatmt.synthetic import _bilingual_reply

# Canonical dataset row: the password-reset exchange.
PW_RESET_SOURCE = "비밀번호 재설정 메일이 도착하지 않습니다."
PW_RESET_REFERENCE = "I don't receive a password reset email."
PW_RESET_DOC_ID = "64619c16ab8523e90010b544"
PW_RESET_CLIENT_ID = "0015800001EMz0vAAD"
PW_RESET_HISTORY = [
    (
        "As I understand you are unable to login to your account as it asks "
        "you to reset the password and you are not getting reset password email.",
        "제가 알기로는 비밀번호를 재설정하라는 메시지가 표시된 후 비밀번호 이메일을 "
        "재설정하지 않기 때문에 계정에 로그인할 수 없으십니다.",
    ),
    ("Am I correct?", "맞습니까?"),
]
PW_RESET_SUMMARY = (
    "The customer, NAME-N, contacted PRS-ORG for help signing in and "
    "reported not receiving a password reset email."
)

PW_RESET_JSON = json.dumps(
    {
        "source_language": "ko",
        "target_language": "en",
        "source": PW_RESET_SOURCE,
        "reference": PW_RESET_REFERENCE,
        "doc_id": PW_RESET_DOC_ID,
        "client_id": PW_RESET_CLIENT_ID,
        "sender": "customer",
    },
    ensure_ascii=False,
)


# Deterministic stand-in translator shared with the mock:bilingual CLI backend.
bilingual_reply = _bilingual_reply


@pytest.fixture
def bilingual_mock() -> MockBackend:
    return MockBackend(reply=bilingual_reply)


def make_conversation(doc_id: str, n_turns: int, direction=("ko", "en")) -> Conversation:
    """Synthetic conversation with numbered turns."""
    turns = []
    for index in range(n_turns):
        turns.append(
            ChatRecord(
                source_language=direction[0],
                target_language=direction[1],
                source=f"turn {index} of {doc_id}",
                doc_id=doc_id,
                sender="customer" if index % 2 == 0 else "agent",
                reference=f"ref {index} of {doc_id}",
                turn_index=index,
            )
        )
    return Conversation(doc_id=doc_id, turns=turns)


def random_tokens(rng: random.Random, length: int, vocab_size: int = 12) -> list[str]:
    return [f"w{rng.randrange(vocab_size)}" for _ in range(length)]
