"""Chat-completion backends and the wrong-language guard.

The wire protocol is the OpenAI-style chat completion (POST a JSON body with
``model``/``messages``/``temperature``/``max_tokens``; read
``choices[0].message.content``), which covers most hosted and self-served
models. A fully deterministic in-process mock keeps the test suite and demo
pipelines off the network.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import threading
import time
import unicodedata
from dataclasses import dataclass, field
from typing import Callable, Sequence

import httpx

from .errors import AuthError, BackendError, HttpError, ProtocolError, Timeout

Message = dict
BACKOFF_BASE = 0.5
BACKOFF_FACTOR = 2.0
GUARD_MAX_CORRECTIONS = 2

DEFAULT_TEMPERATURE_TRANSLATE = 0.0


@dataclass
class BackendConfig:
    endpoint: str = "http://localhost:8000/v1/chat/completions"
    model_name: str = "gpt-4o-mini"
    api_key_env: str = "CHATMT_API_KEY"
    timeout: float = 30.0
    max_retries: int = 2
    temperature: float = DEFAULT_TEMPERATURE_TRANSLATE
    max_output_tokens: int = 512
    parallelism: int = 4

    def __post_init__(self) -> None:
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if not 0 <= self.max_retries <= 5:
            raise ValueError("max_retries must be within [0, 5]")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be within [0, 2]")
        if self.parallelism < 1:
            raise ValueError("parallelism must be >= 1")

    @property
    def api_key(self) -> str:
        return os.environ.get(self.api_key_env, "")


@dataclass
class BackendResult:
    text: str
    latency: float
    attempts: int
    raw_finish_reason: str = ""


# --- language detection -------------------------------------------------------

@dataclass
class LanguageGuess:
    label: str  # korean | latin_english_like | latin_non_english | other
    hangul_ratio: float
    non_english_letter_ratio: float


def _is_hangul(ch: str) -> bool:
    code = ord(ch)
    return (
        0xAC00 <= code <= 0xD7A3
        or 0x1100 <= code <= 0x11FF
        or 0x3130 <= code <= 0x318F
        or 0xA960 <= code <= 0xA97F
        or 0xD7B0 <= code <= 0xD7FF
    )


def _is_latin(ch: str) -> bool:
    try:
        return unicodedata.name(ch).startswith("LATIN")
    except ValueError:
        return False


def detect_language(text: str, allowlist: frozenset[str] = frozenset()) -> LanguageGuess:
    """Character-class language guess over the letters of ``text``.

    hangul_ratio counts Hangul letters; non_english_letter_ratio counts Latin
    letters outside A-Za-z (and outside ``allowlist``). Thresholds: korean at
    hangul >= 0.5; below 0.05 Hangul the text is latin_non_english when the
    non-English ratio reaches 0.05, latin_english_like otherwise; anything in
    between is other. Letterless text is other with zero ratios.
    """
    letters = hangul = non_english = 0
    for ch in text:
        if not ch.isalpha():
            continue
        letters += 1
        if _is_hangul(ch):
            hangul += 1
        elif _is_latin(ch) and not ("A" <= ch <= "Z" or "a" <= ch <= "z") and ch not in allowlist:
            non_english += 1
    if letters == 0:
        return LanguageGuess(label="other", hangul_ratio=0.0, non_english_letter_ratio=0.0)

    hangul_ratio = hangul / letters
    non_english_ratio = non_english / letters
    if hangul_ratio >= 0.5:
        label = "korean"
    elif hangul_ratio < 0.05 and non_english_ratio >= 0.05:
        label = "latin_non_english"
    elif hangul_ratio < 0.05 and non_english_ratio < 0.05:
        label = "latin_english_like"
    else:
        label = "other"
    return LanguageGuess(
        label=label, hangul_ratio=hangul_ratio, non_english_letter_ratio=non_english_ratio
    )


EXPECTED_LABELS = {"ko": "korean", "en": "latin_english_like"}


def matches_expected(guess: LanguageGuess, expected: str) -> bool:
    """True when the guess label is the one expected for a ko/en target."""
    return guess.label == EXPECTED_LABELS.get(expected)


# --- transports -----------------------------------------------------------------

def _validate_messages(messages: Sequence[Message]) -> None:
    if not messages:
        raise ValueError("messages must be non-empty")
    if messages[0].get("role") != "system":
        raise ValueError("first message must be system-role")


class HttpBackend:
    """OpenAI-style chat-completion client with bounded retries.

    Transient failures (timeouts, connection errors, 408/429/5xx) are retried
    with exponential backoff (base 0.5s, factor 2, jitter) up to
    config.max_retries; 401/403 raise AuthError immediately and unparseable
    bodies raise ProtocolError without retry. In-flight requests are bounded
    by config.parallelism.
    """

    _TRANSIENT_STATUSES = frozenset({408, 429})

    def __init__(
        self,
        config: BackendConfig,
        transport: httpx.BaseTransport | None = None,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ):
        self.config = config
        self._client = httpx.Client(timeout=config.timeout, transport=transport)
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._slots = threading.BoundedSemaphore(config.parallelism)

    def close(self) -> None:
        self._client.close()

    def _backoff(self, failed_attempts: int) -> None:
        delay = BACKOFF_BASE * BACKOFF_FACTOR ** (failed_attempts - 1)
        self._sleep(delay * self._rng.uniform(0.5, 1.5))

    def complete(self, messages: list[Message], temperature: float | None = None) -> BackendResult:
        _validate_messages(messages)
        config = self.config
        body = {
            "model": config.model_name,
            "messages": messages,
            "temperature": config.temperature if temperature is None else temperature,
            "max_tokens": config.max_output_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if config.api_key:
            headers["Authorization"] = f"Bearer {config.api_key}"

        started = time.monotonic()
        last_error: BackendError | None = None
        attempts = 0
        with self._slots:
            while attempts <= config.max_retries:
                attempts += 1
                try:
                    response = self._client.post(config.endpoint, json=body, headers=headers)
                except httpx.TimeoutException as exc:
                    last_error = Timeout(str(exc))
                except httpx.HTTPError as exc:
                    last_error = BackendError(f"transport failure: {exc}")
                else:
                    status = response.status_code
                    if status in (401, 403):
                        raise AuthError(status)
                    if status in self._TRANSIENT_STATUSES or status >= 500:
                        last_error = HttpError(status, response.text[:200])
                    elif status >= 400:
                        raise HttpError(status, response.text[:200])
                    else:
                        return self._parse(response, attempts, started)
                if attempts <= config.max_retries:
                    self._backoff(attempts)
        assert last_error is not None
        raise last_error

    def _parse(self, response: httpx.Response, attempts: int, started: float) -> BackendResult:
        try:
            payload = response.json()
            choice = payload["choices"][0]
            text = choice["message"]["content"]
            finish = choice.get("finish_reason") or ""
        except (json.JSONDecodeError, ValueError, LookupError, TypeError) as exc:
            raise ProtocolError(f"unparseable completion body: {exc}") from exc
        if not isinstance(text, str):
            raise ProtocolError("completion content is not a string")
        return BackendResult(
            text=text.strip(),
            latency=time.monotonic() - started,
            attempts=attempts,
            raw_finish_reason=finish,
        )


def prompt_hash(messages: Sequence[Message]) -> str:
    """Stable digest of a message list, used as the canned-reply key."""
    blob = json.dumps(list(messages), sort_keys=True, ensure_ascii=False)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


class MockBackend:
    """Deterministic in-process backend: same messages, same result.

    Exactly one reply source is used, in priority order: a scripted sequence
    (consumed once, last entry repeats), a canned map from prompt_hash to
    text, or a reply function of the messages. Without any, the default text
    is returned.
    """

    def __init__(
        self,
        script: Sequence[str] | None = None,
        canned: dict[str, str] | None = None,
        reply: Callable[[list[Message]], str] | None = None,
        default: str = "",
        latency: float = 0.0,
    ):
        self._script = list(script) if script is not None else None
        self._canned = canned
        self._reply = reply
        self._default = default
        self._latency = latency
        self._cursor = 0
        self._lock = threading.Lock()
        self.calls: list[list[Message]] = []

    def complete(self, messages: list[Message], temperature: float | None = None) -> BackendResult:
        _validate_messages(messages)
        with self._lock:
            self.calls.append([dict(m) for m in messages])
            if self._script is not None:
                text = self._script[min(self._cursor, len(self._script) - 1)]
                self._cursor += 1
            elif self._canned is not None:
                text = self._canned.get(prompt_hash(messages), self._default)
            elif self._reply is not None:
                text = self._reply(messages)
            else:
                text = self._default
        return BackendResult(
            text=text.strip(), latency=self._latency, attempts=1, raw_finish_reason="stop"
        )


# --- guarded translation ----------------------------------------------------------

@dataclass
class GuardedResult:
    result: BackendResult
    guess: LanguageGuess
    generations: int
    mismatched: bool
    messages: list[Message] = field(default_factory=list)


def guarded_translate(
    backend,
    messages: list[Message],
    expected_target: str,
    max_corrections: int = GUARD_MAX_CORRECTIONS,
) -> GuardedResult:
    """Translate with a wrong-language guard.

    When the reply's script does not match the expected target language the
    request is re-issued with the wrong reply and a corrective user line
    appended, at most ``max_corrections`` extra times; after exhaustion the
    last result is returned flagged mismatched.
    """
    if expected_target not in EXPECTED_LABELS:
        raise ValueError(f"expected_target must be one of {sorted(EXPECTED_LABELS)}")
    language_name = {"ko": "Korean", "en": "English"}[expected_target]
    current = list(messages)
    generations = 0
    while True:
        result = backend.complete(current)
        generations += 1
        guess = detect_language(result.text)
        if matches_expected(guess, expected_target):
            return GuardedResult(result, guess, generations, mismatched=False, messages=current)
        if generations > max_corrections:
            return GuardedResult(result, guess, generations, mismatched=True, messages=current)
        current = current + [
            {"role": "assistant", "content": result.text},
            {"role": "user", "content": f"Respond ONLY in {language_name}."},
        ]
