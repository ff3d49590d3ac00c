import json

import httpx
import pytest

from chatmt.backend import (
    BackendConfig,
    HttpBackend,
    MockBackend,
    detect_language,
    guarded_translate,
    matches_expected,
    prompt_hash,
)
from chatmt.errors import AuthError, HttpError, ProtocolError, Timeout

from .conftest import PW_RESET_REFERENCE, PW_RESET_SOURCE

MESSAGES = [
    {"role": "system", "content": "sys"},
    {"role": "user", "content": "translate this"},
]

TURKISH = "Şifre sıfırlama e-postası gelmiyor"
POLISH = "Nie otrzymuję wiadomości e-mail dotyczącej zresetowania hasła"


# --- detect_language -----------------------------------------------------------

def test_detect_korean_fixture():
    guess = detect_language(PW_RESET_SOURCE)
    assert guess.label == "korean"
    assert guess.hangul_ratio == 1.0


def test_detect_english_fixture():
    assert detect_language("Am I correct?").label == "latin_english_like"


def test_detect_turkish_and_polish():
    assert detect_language(TURKISH).label == "latin_non_english"
    assert detect_language(POLISH).label == "latin_non_english"


def test_detect_empty_and_letterless():
    for text in ("", "12345 ?!"):
        guess = detect_language(text)
        assert guess.label == "other"
        assert guess.hangul_ratio == 0.0
        assert guess.non_english_letter_ratio == 0.0


@pytest.mark.parametrize(
    "text,label",
    [
        ("한글ab", "korean"),                 # hangul ratio exactly 0.5 -> korean
        ("한글abc", "other"),                 # 0.4: neither korean nor latin
        ("ğ" + "a" * 19, "latin_non_english"),  # non-english ratio exactly 0.05
        ("ğ" + "a" * 20, "latin_english_like"),  # 1/21 just under the threshold
        ("한" + "a" * 19, "other"),            # hangul ratio exactly 0.05 is not < 0.05
        ("한" + "a" * 20, "latin_english_like"),  # 1/21 hangul is below 0.05
    ],
)
def test_detect_threshold_boundaries(text, label):
    assert detect_language(text).label == label


def test_ratios_computed_over_letters_only():
    guess = detect_language("ğa!!! 123")  # two letters, one non-english
    assert guess.non_english_letter_ratio == 0.5


def test_matches_expected():
    assert matches_expected(detect_language(PW_RESET_SOURCE), "ko")
    assert matches_expected(detect_language("Fine, thanks."), "en")
    assert not matches_expected(detect_language(TURKISH), "en")


# --- HttpBackend ---------------------------------------------------------------

def completion_response(text: str) -> httpx.Response:
    return httpx.Response(
        200,
        json={
            "choices": [
                {"index": 0, "finish_reason": "stop",
                 "message": {"role": "assistant", "content": text}}
            ]
        },
    )


def make_backend(handler, max_retries=2) -> HttpBackend:
    config = BackendConfig(max_retries=max_retries)
    sleeps: list[float] = []
    backend = HttpBackend(
        config, transport=httpx.MockTransport(handler), sleep=sleeps.append
    )
    backend.recorded_sleeps = sleeps
    return backend


def test_complete_happy_path():
    backend = make_backend(lambda request: completion_response("  ok  "))
    result = backend.complete(MESSAGES)
    assert result.text == "ok"
    assert result.attempts == 1
    assert result.raw_finish_reason == "stop"


def test_complete_retries_5xx_then_succeeds():
    calls = 0

    def handler(request):
        nonlocal calls
        calls += 1
        if calls <= 2:
            return httpx.Response(500, text="boom")
        return completion_response("recovered")

    backend = make_backend(handler)
    result = backend.complete(MESSAGES)
    assert result.attempts == 3
    assert result.text == "recovered"
    assert len(backend.recorded_sleeps) == 2
    # exponential backoff: base 0.5, factor 2, jitter within [0.5, 1.5]x
    assert 0.25 <= backend.recorded_sleeps[0] <= 0.75
    assert 0.5 <= backend.recorded_sleeps[1] <= 1.5


def test_complete_exhausts_retries():
    backend = make_backend(lambda request: httpx.Response(503), max_retries=1)
    with pytest.raises(HttpError) as excinfo:
        backend.complete(MESSAGES)
    assert excinfo.value.status == 503


def test_auth_error_not_retried():
    calls = 0

    def handler(request):
        nonlocal calls
        calls += 1
        return httpx.Response(401)

    backend = make_backend(handler)
    with pytest.raises(AuthError):
        backend.complete(MESSAGES)
    assert calls == 1


def test_client_error_not_retried():
    calls = 0

    def handler(request):
        nonlocal calls
        calls += 1
        return httpx.Response(404)

    backend = make_backend(handler)
    with pytest.raises(HttpError):
        backend.complete(MESSAGES)
    assert calls == 1


def test_timeout_converted():
    def handler(request):
        raise httpx.ReadTimeout("slow")

    backend = make_backend(handler, max_retries=0)
    with pytest.raises(Timeout):
        backend.complete(MESSAGES)


def test_protocol_error_on_unparseable_body():
    backend = make_backend(lambda request: httpx.Response(200, text="<html>nope</html>"))
    with pytest.raises(ProtocolError):
        backend.complete(MESSAGES)


def test_request_body_shape():
    seen = {}

    def handler(request):
        seen.update(json.loads(request.content))
        return completion_response("ok")

    config = BackendConfig(model_name="toy-model", temperature=0.0, max_output_tokens=64)
    backend = HttpBackend(config, transport=httpx.MockTransport(handler))
    backend.complete(MESSAGES)
    assert seen["model"] == "toy-model"
    assert seen["messages"] == MESSAGES
    assert seen["temperature"] == 0.0
    assert seen["max_tokens"] == 64


def test_summarize_overrides_temperature_on_the_wire():
    from chatmt.context import HistoryEntry, summarize_turns

    seen = {}

    def handler(request):
        seen.update(json.loads(request.content))
        return completion_response("short recap")

    backend = HttpBackend(BackendConfig(temperature=0.0),
                          transport=httpx.MockTransport(handler))
    summarize_turns([HistoryEntry(original="hi", sender="customer")], backend)
    assert seen["temperature"] == 0.3


def test_message_preconditions():
    backend = MockBackend(default="x")
    with pytest.raises(ValueError):
        backend.complete([])
    with pytest.raises(ValueError):
        backend.complete([{"role": "user", "content": "hi"}])


def test_config_validation():
    with pytest.raises(ValueError):
        BackendConfig(timeout=0)
    with pytest.raises(ValueError):
        BackendConfig(max_retries=9)
    with pytest.raises(ValueError):
        BackendConfig(temperature=3.0)
    with pytest.raises(ValueError):
        BackendConfig(parallelism=0)


# --- MockBackend ------------------------------------------------------------------

def test_mock_canned_map():
    canned = {prompt_hash(MESSAGES): PW_RESET_REFERENCE}
    backend = MockBackend(canned=canned, default="fallback")
    result = backend.complete(MESSAGES)
    assert result.text == PW_RESET_REFERENCE
    assert result.attempts == 1
    other = [{"role": "system", "content": "sys"}, {"role": "user", "content": "else"}]
    assert backend.complete(other).text == "fallback"


def test_mock_is_deterministic():
    backend = MockBackend(reply=lambda msgs: f"len={len(msgs[1]['content'])}")
    assert backend.complete(MESSAGES) == backend.complete(MESSAGES)


def test_mock_script_holds_last():
    backend = MockBackend(script=["a", "b"])
    texts = [backend.complete(MESSAGES).text for _ in range(4)]
    assert texts == ["a", "b", "b", "b"]


# --- guarded_translate ----------------------------------------------------------------

def test_guard_clean_korean_single_generation():
    backend = MockBackend(default="안녕하세요 고객님")
    guarded = guarded_translate(backend, MESSAGES, expected_target="ko")
    assert guarded.generations == 1
    assert guarded.mismatched is False
    assert guarded.guess.label == "korean"


def test_guard_converges_after_two_corrections():
    backend = MockBackend(script=[TURKISH, TURKISH, "Here is the translation."])
    guarded = guarded_translate(backend, MESSAGES, expected_target="en")
    assert guarded.generations == 3
    assert guarded.mismatched is False
    assert guarded.guess.label == "latin_english_like"
    # each re-issue appended the wrong reply and a corrective user line
    final_messages = backend.calls[-1]
    assert final_messages[-1] == {"role": "user", "content": "Respond ONLY in English."}
    assert final_messages[-2]["role"] == "assistant"


def test_guard_exhaustion_flags_mismatch():
    backend = MockBackend(default=POLISH)
    guarded = guarded_translate(backend, MESSAGES, expected_target="en")
    assert guarded.generations == 3
    assert guarded.mismatched is True
    assert guarded.guess.label == "latin_non_english"


def test_guard_rejects_unknown_target():
    with pytest.raises(ValueError):
        guarded_translate(MockBackend(default="x"), MESSAGES, expected_target="fr")
