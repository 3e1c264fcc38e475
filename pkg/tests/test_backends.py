"""Backends: prompt templates (byte-exact goldens), mock behaviors, the
remote chat client's wire format and error taxonomy."""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from hideseek.backends import (
    LlmRequest,
    Message,
    MockClassify,
    MockDictTranslate,
    MockEcho,
    RemoteChat,
    build_prompt_l,
    build_prompt_r,
    build_prompt_s,
    builtin_lexicon_path,
    complete,
    load_lexicon,
)
from hideseek.errors import (
    ConfigError,
    HttpStatusError,
    MalformedResponseError,
    TransportError,
)
from hideseek.types import TaskType

GOLDENS = json.loads(
    (Path(__file__).parent / "data" / "prompt_goldens.json").read_text(encoding="utf-8")
)

INCIDENT_FOR_PROMPT = (
    "The FBI (Federal Bureau of Investigation) is currently investigating a cyber attack "
    "on a major corporation that occurred on August 10, 2023. The breach took place in the "
    "company's headquarters located in Washington DC. The FBI suspects that the attack was "
    "carried out by a foreign government."
)


# ---------------------------------------------------------------------------
# Message / LlmRequest plumbing.
# ---------------------------------------------------------------------------


def test_message_role_validation():
    Message("system", "x")
    Message("user", "")
    Message("assistant", "y")
    with pytest.raises(ValueError):
        Message("tool", "z")


def test_request_requires_a_user_message():
    with pytest.raises(ValueError):
        LlmRequest(messages=(Message("system", "only system"),))
    req = LlmRequest.user("hello", system="be brief")
    assert req.last_user_content() == "hello"
    assert req.messages[0].role == "system"


def test_request_parameter_bounds():
    with pytest.raises(ValueError):
        LlmRequest(messages=(Message("user", "x"),), temperature=-0.1)
    with pytest.raises(ValueError):
        LlmRequest(messages=(Message("user", "x"),), max_tokens=0)


# ---------------------------------------------------------------------------
# Prompt templates.
# ---------------------------------------------------------------------------


def test_prompt_s_structure_and_golden():
    rendered = build_prompt_s(
        INCIDENT_FOR_PROMPT, ["FBI", "August 10, 2023", "Washington DC"]
    )
    assert rendered == GOLDENS["prompt_s_incident"]
    lines = rendered.split("\n")
    assert lines[0] == "Substitute given words in the text into other random words."
    assert lines[1] == f"Text: {INCIDENT_FOR_PROMPT}"
    assert lines[2] == "Given words: ['FBI', 'August 10, 2023', 'Washington DC']"
    assert lines[3] == "Substituted text:"
    assert len(lines) == 4


def test_prompt_s_empty_entity_list():
    rendered = build_prompt_s("c", [])
    assert rendered == GOLDENS["prompt_s_empty_entities"]
    assert "Given words: []" in rendered


def test_prompt_r_four_line_golden():
    rendered = build_prompt_r("E", "L", "C", TaskType.TRANSLATE)
    assert rendered == GOLDENS["prompt_r_translate"]
    assert rendered == "Input: E\nTranslate: L\nInput: C\nTranslate:"


def test_prompt_r_empty_slots():
    rendered = build_prompt_r("", "", "", TaskType.CLASSIFY)
    assert rendered == GOLDENS["prompt_r_all_empty"]
    assert rendered == "Input: \nClassify: \nInput: \nClassify:"


def test_prompt_l_goldens():
    assert (
        build_prompt_l("E", TaskType.TRANSLATE, "Chinese")
        == GOLDENS["prompt_l_translate_chinese"]
        == "Translate the following text to Chinese:\nText: E"
    )
    assert build_prompt_l("E", TaskType.ABSTRACT) == GOLDENS["prompt_l_abstract"]
    assert build_prompt_l("E", TaskType.POLISH) == GOLDENS["prompt_l_polish"]
    assert build_prompt_l("E", TaskType.CLASSIFY) == GOLDENS["prompt_l_classify"]


def test_prompt_l_translate_requires_target_language():
    with pytest.raises(ValueError):
        build_prompt_l("E", TaskType.TRANSLATE)


def test_prompt_l_empty_text_slot_is_legal():
    assert build_prompt_l("", TaskType.ABSTRACT).endswith("Text: ")


# ---------------------------------------------------------------------------
# Mock backends.
# ---------------------------------------------------------------------------


def test_mock_echo_returns_last_user_content():
    echo = MockEcho()
    req = LlmRequest(
        messages=(
            Message("system", "sys"),
            Message("user", "first"),
            Message("assistant", "mid"),
            Message("user", "hello"),
        )
    )
    assert echo.complete(req) == "hello"
    assert complete(echo, req) == "hello"


def test_dict_translate_maps_known_words_and_keeps_placeholders():
    translator = MockDictTranslate({"cat": "chat", "the": "le"})
    out = translator.complete(LlmRequest.user("the cat <ORG>"))
    assert out == "le chat <ORG>"


def test_dict_translate_keeps_indexed_placeholders_verbatim():
    translator = MockDictTranslate({"cat": "chat"})
    out = translator.translate_text("cat <ORG_2> cat <DATE_11>")
    assert out == "chat <ORG_2> chat <DATE_11>"


def test_dict_translate_carries_edge_punctuation():
    translator = MockDictTranslate({"cat": "chat"})
    assert translator.translate_text("cat, (cat).") == "chat, (chat)."


def test_dict_translate_unknown_words_pass_verbatim():
    translator = MockDictTranslate({})
    assert translator.translate_text("Marie Curie 42%") == "Marie Curie 42%"


def test_dict_translate_is_case_insensitive_on_lookup():
    translator = MockDictTranslate({"cat": "chat"})
    assert translator.translate_text("Cat CAT") == "chat chat"


def test_dict_translate_placeholder_preservation_property(small_corpus):
    translator = MockDictTranslate.from_file(builtin_lexicon_path())
    import re

    for text in small_corpus:
        decorated = f"<ORG> {text} <DATE_3>"
        out = translator.translate_text(decorated)
        placeholders_in = sorted(re.findall(r"<[A-Z_]+(?:_[0-9]+)?>", decorated))
        placeholders_out = sorted(re.findall(r"<[A-Z_]+(?:_[0-9]+)?>", out))
        assert placeholders_in == placeholders_out


def test_builtin_lexicon_loads_and_is_casefolded():
    lexicon = load_lexicon(builtin_lexicon_path())
    assert lexicon and all(k == k.casefold() for k in lexicon)


def test_load_lexicon_rejects_malformed_lines(tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("word-without-tab\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_lexicon(bad)


def test_mock_classify_scores_keyword_table():
    classifier = MockClassify(
        {"sport": ["match", "team"], "business": ["profit", "market"]}
    )
    out = classifier.complete(
        LlmRequest.user("The team won the match before the market opened.")
    )
    assert out == "sport"


def test_mock_classify_tie_breaks_lexicographically():
    classifier = MockClassify({"b_label": ["shared"], "a_label": ["shared"]})
    assert classifier.complete(LlmRequest.user("shared word")) == "a_label"


def test_mock_classify_no_keywords_still_answers_deterministically():
    classifier = MockClassify({"beta": ["x"], "alpha": ["y"]})
    assert classifier.complete(LlmRequest.user("nothing relevant")) == "alpha"


# ---------------------------------------------------------------------------
# Remote chat client (transport monkeypatched; no network).
# ---------------------------------------------------------------------------


class FakeResponse:
    def __init__(self, status_code=200, payload=None, text=""):
        self.status_code = status_code
        self._payload = payload
        self.text = text

    def json(self):
        if self._payload is None:
            raise ValueError("not json")
        return self._payload


def ok_payload(content="bonjour"):
    return {"choices": [{"message": {"content": content}}]}


@pytest.fixture
def remote(monkeypatch):
    monkeypatch.setenv("TEST_LLM_KEY", "sekret")
    return RemoteChat(
        endpoint="https://llm.example/v1", model="m-1", key_env="TEST_LLM_KEY"
    )


def test_remote_requires_endpoint_and_key_env():
    with pytest.raises(ConfigError):
        RemoteChat(endpoint="", model="m", key_env="K")
    with pytest.raises(ConfigError):
        RemoteChat(endpoint="https://x", model="m", key_env="")
    with pytest.raises(ConfigError):
        RemoteChat(endpoint="https://x", model="m", key_env="K", max_attempts=0)


def test_remote_missing_key_is_config_error_before_any_request(remote, monkeypatch):
    calls = []
    monkeypatch.setattr(
        "hideseek.backends.requests.post", lambda *a, **k: calls.append(1)
    )
    monkeypatch.delenv("TEST_LLM_KEY")
    with pytest.raises(ConfigError):
        remote.complete(LlmRequest.user("hi"))
    assert calls == []


def test_remote_wire_format(remote, monkeypatch):
    seen = {}

    def fake_post(url, json=None, headers=None, timeout=None):
        seen.update(url=url, body=json, headers=headers, timeout=timeout)
        return FakeResponse(payload=ok_payload("salut"))

    monkeypatch.setattr("hideseek.backends.requests.post", fake_post)
    req = LlmRequest.user("hello", system="be brief")
    assert remote.complete(req) == "salut"
    assert seen["url"] == "https://llm.example/v1/chat/completions"
    assert seen["headers"]["Authorization"] == "Bearer sekret"
    assert seen["body"]["model"] == "m-1"
    assert seen["body"]["messages"] == [
        {"role": "system", "content": "be brief"},
        {"role": "user", "content": "hello"},
    ]
    assert seen["body"]["temperature"] == 0.0
    assert seen["body"]["max_tokens"] == 1024


def test_remote_sends_exactly_one_request_by_default(remote, monkeypatch):
    calls = []

    def fake_post(*a, **k):
        calls.append(1)
        raise __import__("requests").ConnectionError("refused")

    monkeypatch.setattr("hideseek.backends.requests.post", fake_post)
    with pytest.raises(TransportError):
        remote.complete(LlmRequest.user("hi"))
    assert len(calls) == 1


def test_remote_opt_in_retry_on_transport_failure(monkeypatch):
    monkeypatch.setenv("TEST_LLM_KEY", "k")
    client = RemoteChat(
        endpoint="https://llm.example",
        model="m",
        key_env="TEST_LLM_KEY",
        max_attempts=3,
        backoff_seconds=0.0,
    )
    calls = []

    def fake_post(*a, **k):
        calls.append(1)
        if len(calls) < 3:
            raise __import__("requests").ConnectionError("refused")
        return FakeResponse(payload=ok_payload())

    monkeypatch.setattr("hideseek.backends.requests.post", fake_post)
    assert client.complete(LlmRequest.user("hi")) == "bonjour"
    assert len(calls) == 3


def test_remote_non_2xx_raises_status_error(remote, monkeypatch):
    monkeypatch.setattr(
        "hideseek.backends.requests.post",
        lambda *a, **k: FakeResponse(status_code=403, text="forbidden"),
    )
    with pytest.raises(HttpStatusError) as exc:
        remote.complete(LlmRequest.user("hi"))
    assert exc.value.status == 403


def test_remote_malformed_bodies_raise_distinct_error(remote, monkeypatch):
    monkeypatch.setattr(
        "hideseek.backends.requests.post", lambda *a, **k: FakeResponse(payload=None)
    )
    with pytest.raises(MalformedResponseError):
        remote.complete(LlmRequest.user("hi"))
    monkeypatch.setattr(
        "hideseek.backends.requests.post",
        lambda *a, **k: FakeResponse(payload={"choices": []}),
    )
    with pytest.raises(MalformedResponseError):
        remote.complete(LlmRequest.user("hi"))
    monkeypatch.setattr(
        "hideseek.backends.requests.post",
        lambda *a, **k: FakeResponse(payload={"choices": [{"message": {"content": 7}}]}),
    )
    with pytest.raises(MalformedResponseError):
        remote.complete(LlmRequest.user("hi"))
