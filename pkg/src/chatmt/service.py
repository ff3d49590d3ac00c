"""Live-session engine: bilingual support sessions with event-sourced state.

Every state change is an event (created, message_posted, summary_updated,
translated) appended to a per-session JSONL log; live state is produced by
applying exactly the same events, so replaying a log reconstructs the state
bit for bit without touching the backend.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .backend import guarded_translate
from .context import (
    ContextBundle,
    HistoryEntry,
    Summary,
    summarize_turns,
    update_summary_incremental,
)
from .errors import (
    BackendError,
    BadLanguagePair,
    CorruptLog,
    InvalidField,
    SessionNotFound,
)
from .prompting import build_prompt

SESSION_LANGUAGES = ("ko", "en")

EV_CREATED = "created"
EV_MESSAGE_POSTED = "message_posted"
EV_SUMMARY_UPDATED = "summary_updated"
EV_TRANSLATED = "translated"

TURN_PENDING = "pending"
TURN_OK = "ok"
TURN_FAILED = "failed"


@dataclass
class SessionEvent:
    kind: str
    payload: dict
    sequence_number: int

    def to_json(self) -> dict:
        return {"seq": self.sequence_number, "kind": self.kind, "payload": self.payload}

    @staticmethod
    def from_json(obj: dict) -> "SessionEvent":
        return SessionEvent(
            kind=obj["kind"], payload=obj["payload"], sequence_number=obj["seq"]
        )


@dataclass
class SessionTurn:
    turn_index: int
    sender: str
    original: str
    posted_at: float
    prompt: dict
    translation: str | None = None
    status: str = TURN_PENDING
    language_guess: dict | None = None
    mismatched: bool = False
    generations: int = 0
    completed_at: float | None = None
    error: str | None = None


@dataclass
class SessionState:
    session_id: str
    customer_language: str
    agent_language: str
    created_at: float
    turns: list[SessionTurn] = field(default_factory=list)
    summary: Summary = field(default_factory=lambda: Summary(text="", covered_turns=0))

    def language_of(self, sender: str) -> str:
        return self.customer_language if sender == "customer" else self.agent_language

    def target_for(self, sender: str) -> str:
        return self.agent_language if sender == "customer" else self.customer_language


def apply_event(state: SessionState | None, event: SessionEvent) -> SessionState:
    """Apply one event; the single mutation path for live and replayed state."""
    payload = event.payload
    if event.kind == EV_CREATED:
        return SessionState(
            session_id=payload["session_id"],
            customer_language=payload["customer_language"],
            agent_language=payload["agent_language"],
            created_at=payload["created_at"],
        )
    if state is None:
        raise CorruptLog(f"event {event.kind!r} before created")
    if event.kind == EV_MESSAGE_POSTED:
        state.turns.append(
            SessionTurn(
                turn_index=payload["turn_index"],
                sender=payload["sender"],
                original=payload["original"],
                posted_at=payload["posted_at"],
                prompt=payload["prompt"],
            )
        )
    elif event.kind == EV_SUMMARY_UPDATED:
        state.summary = Summary(
            text=payload["text"], covered_turns=payload["covered_turns"]
        )
    elif event.kind == EV_TRANSLATED:
        turn = state.turns[payload["turn_index"]]
        turn.translation = payload["translation"]
        turn.status = payload["status"]
        turn.language_guess = payload.get("language_guess")
        turn.mismatched = payload.get("mismatched", False)
        turn.generations = payload.get("generations", 0)
        turn.completed_at = payload.get("completed_at")
        turn.error = payload.get("error")
    else:
        raise CorruptLog(f"unknown event kind {event.kind!r}")
    return state


def replay(events: Iterable[SessionEvent]) -> SessionState:
    """Rebuild session state from its event log; no backend calls."""
    state: SessionState | None = None
    expected = 1
    for event in events:
        if event.sequence_number != expected:
            raise CorruptLog(
                f"sequence gap: expected {expected}, got {event.sequence_number}"
            )
        if expected == 1 and event.kind != EV_CREATED:
            raise CorruptLog(f"log must start with created, got {event.kind!r}")
        state = apply_event(state, event)
        expected += 1
    if state is None:
        raise CorruptLog("empty event log (missing created)")
    return state


def read_event_log(path: str | Path) -> list[SessionEvent]:
    events = []
    with Path(path).open("r", encoding="utf-8") as handle:
        for line in handle:
            if line.strip():
                events.append(SessionEvent.from_json(json.loads(line)))
    return events


class SessionStore:
    """Session registry with per-session serialization and JSONL event logs.

    Requests for different sessions run fully concurrently; within one
    session, posts are serialized by a lock. Existing logs under ``data_dir``
    are replayed on startup.
    """

    def __init__(
        self,
        data_dir: str | Path,
        backend,
        summary_mode: str = "incremental",
        clock: Callable[[], float] = time.time,
        id_factory: Callable[[], str] | None = None,
    ):
        if summary_mode not in ("incremental", "per_prefix"):
            raise ValueError("summary_mode must be incremental or per_prefix")
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self.backend = backend
        self.summary_mode = summary_mode
        self._clock = clock
        self._id_factory = id_factory or (lambda: uuid.uuid4().hex[:12])
        self._states: dict[str, SessionState] = {}
        self._events: dict[str, list[SessionEvent]] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()
        for log_path in sorted(self.data_dir.glob("*.events.jsonl")):
            events = read_event_log(log_path)
            state = replay(events)
            self._states[state.session_id] = state
            self._events[state.session_id] = events
            self._locks[state.session_id] = threading.Lock()

    # -- internals ---------------------------------------------------------

    def log_path(self, session_id: str) -> Path:
        return self.data_dir / f"{session_id}.events.jsonl"

    def _emit(self, session_id: str, kind: str, payload: dict) -> SessionEvent:
        """Append one event to the log and apply it to live state."""
        events = self._events[session_id]
        event = SessionEvent(kind=kind, payload=payload, sequence_number=len(events) + 1)
        with self.log_path(session_id).open("a", encoding="utf-8") as handle:
            handle.write(json.dumps(event.to_json(), ensure_ascii=False) + "\n")
            handle.flush()
        events.append(event)
        self._states[session_id] = apply_event(self._states.get(session_id), event)
        return event

    def _lock_for(self, session_id: str) -> threading.Lock:
        lock = self._locks.get(session_id)
        if lock is None:
            raise SessionNotFound(session_id)
        return lock

    def _state(self, session_id: str) -> SessionState:
        state = self._states.get(session_id)
        if state is None:
            raise SessionNotFound(session_id)
        return state

    # -- API ----------------------------------------------------------------

    def create_session(self, customer_language: str, agent_language: str) -> str:
        for code in (customer_language, agent_language):
            if code not in SESSION_LANGUAGES:
                raise BadLanguagePair(f"unsupported language {code!r}")
        if customer_language == agent_language:
            raise BadLanguagePair("customer and agent languages must differ")
        with self._registry_lock:
            session_id = self._id_factory()
            while session_id in self._states:
                session_id = self._id_factory()
            self._events[session_id] = []
            self._locks[session_id] = threading.Lock()
            self._emit(
                session_id,
                EV_CREATED,
                {
                    "session_id": session_id,
                    "customer_language": customer_language,
                    "agent_language": agent_language,
                    "created_at": self._clock(),
                },
            )
        return session_id

    def get_session(self, session_id: str) -> SessionState:
        return self._state(session_id)

    def events(self, session_id: str, after: int = 0) -> list[SessionEvent]:
        if session_id not in self._events:
            raise SessionNotFound(session_id)
        return [e for e in self._events[session_id] if e.sequence_number > after]

    def post_message(self, session_id: str, sender: str, text: str) -> SessionTurn:
        """Append a turn, translate it toward the recipient's language, and
        return the stored turn (status "failed" when the backend errored)."""
        if sender not in ("customer", "agent"):
            raise InvalidField("sender", f"expected customer or agent, got {sender!r}")
        if not text or not text.strip():
            raise InvalidField("text", "must be non-empty")
        lock = self._lock_for(session_id)
        with lock:
            state = self._state(session_id)
            index = len(state.turns)

            self._update_summary(session_id, state, index)
            state = self._state(session_id)

            bundle = ContextBundle(
                history=[self._history_entry(state.turns[i]) for i in
                         range(max(0, index - 2), index)],
                summary=state.summary if index > 2 and state.summary.covered_turns else None,
            )
            direction = (state.language_of(sender), state.target_for(sender))
            package, messages = build_prompt(bundle, direction, text)
            self._emit(
                session_id,
                EV_MESSAGE_POSTED,
                {
                    "turn_index": index,
                    "sender": sender,
                    "original": text,
                    "posted_at": self._clock(),
                    "prompt": {
                        "system": package.system,
                        "instruction": package.instruction,
                        "source": package.source,
                        "direction": f"{direction[0]}-{direction[1]}",
                        "user_message": messages[1]["content"],
                    },
                },
            )
            self._translate(session_id, index, messages, state.target_for(sender))
            return self._state(session_id).turns[index]

    def retry_turn(self, session_id: str, turn_index: int) -> SessionTurn:
        """Re-issue the stored prompt of a failed turn."""
        lock = self._lock_for(session_id)
        with lock:
            state = self._state(session_id)
            if not 0 <= turn_index < len(state.turns):
                raise InvalidField("turn_index", f"no turn {turn_index}")
            turn = state.turns[turn_index]
            if turn.status != TURN_FAILED:
                raise InvalidField("turn_index", f"turn {turn_index} is not failed")
            messages = [
                {"role": "system", "content": turn.prompt["system"]},
                {"role": "user", "content": turn.prompt["user_message"]},
            ]
            target = self._state(session_id).target_for(turn.sender)
            self._translate(session_id, turn_index, messages, target)
            return self._state(session_id).turns[turn_index]

    # -- helpers --------------------------------------------------------------

    @staticmethod
    def _history_entry(turn: SessionTurn) -> HistoryEntry:
        return HistoryEntry(
            original=turn.original, sender=turn.sender, translation=turn.translation
        )

    def _update_summary(self, session_id: str, state: SessionState, index: int) -> None:
        """Fold turns that leave the history window into the rolling summary."""
        target_covered = max(0, index - 2)
        if state.summary.covered_turns >= target_covered:
            return
        try:
            if self.summary_mode == "incremental":
                summary = state.summary
                while summary.covered_turns < target_covered:
                    evicted = self._history_entry(state.turns[summary.covered_turns])
                    summary = update_summary_incremental(summary, evicted, self.backend)
            else:
                entries = [self._history_entry(t) for t in state.turns[:target_covered]]
                summary = summarize_turns(entries, self.backend)
        except BackendError:
            return  # keep the previous summary; the next post retries
        self._emit(
            session_id,
            EV_SUMMARY_UPDATED,
            {"text": summary.text, "covered_turns": summary.covered_turns},
        )

    def _translate(
        self, session_id: str, turn_index: int, messages: list[dict], target: str
    ) -> None:
        try:
            guarded = guarded_translate(self.backend, messages, expected_target=target)
        except BackendError as exc:
            self._emit(
                session_id,
                EV_TRANSLATED,
                {
                    "turn_index": turn_index,
                    "translation": None,
                    "status": TURN_FAILED,
                    "error": str(exc),
                    "completed_at": self._clock(),
                },
            )
            return
        self._emit(
            session_id,
            EV_TRANSLATED,
            {
                "turn_index": turn_index,
                "translation": guarded.result.text,
                "status": TURN_OK,
                "language_guess": asdict(guarded.guess),
                "mismatched": guarded.mismatched,
                "generations": guarded.generations,
                "completed_at": self._clock(),
            },
        )


def state_to_dict(state: SessionState) -> dict:
    doc = asdict(state)
    doc["summary"] = {"text": state.summary.text, "covered_turns": state.summary.covered_turns}
    return doc
