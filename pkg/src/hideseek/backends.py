"""LLM access: prompt templates, offline mock backends, and a
chat-completions wire client.

The three templates (substitution, task instruction, de-anonymization) are
byte-stable: golden tests pin them, so any edit here is a deliberate format
change. Mocks make the whole pipeline runnable and deterministic without
network access; the remote client speaks the common chat-completions shape.
"""

from __future__ import annotations

import os
import time
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import requests

from .errors import (
    ConfigError,
    HttpStatusError,
    MalformedResponseError,
    TransportError,
)
from .types import TaskType

ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class Message:
    role: str
    content: str

    def __post_init__(self) -> None:
        if self.role not in ROLES:
            raise ValueError(f"message role must be one of {ROLES}, got {self.role!r}")

    def to_dict(self) -> dict:
        return {"role": self.role, "content": self.content}


@dataclass(frozen=True)
class LlmRequest:
    messages: tuple[Message, ...]
    model: str = "default"
    temperature: float = 0.0
    max_tokens: int = 1024

    def __post_init__(self) -> None:
        object.__setattr__(self, "messages", tuple(self.messages))
        if not any(m.role == "user" for m in self.messages):
            raise ValueError("request needs at least one user message")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")

    def last_user_content(self) -> str:
        for m in reversed(self.messages):
            if m.role == "user":
                return m.content
        raise ValueError("no user message")  # unreachable after validation

    @classmethod
    def user(cls, content: str, system: str | None = None, **kwargs) -> "LlmRequest":
        messages = []
        if system is not None:
            messages.append(Message("system", system))
        messages.append(Message("user", content))
        return cls(messages=tuple(messages), **kwargs)


# ------------------------------------------------------------------ prompts


def format_entity_list(entities: list[str]) -> str:
    """Render ['FBI', 'August 10, 2023'] style: single-quoted, bracket-delimited."""
    return "[" + ", ".join(f"'{e}'" for e in entities) + "]"


def build_prompt_s(c: str, entities: list[str]) -> str:
    """The substitution prompt sent with (c, P(c)) to obtain s."""
    return (
        "Substitute given words in the text into other random words.\n"
        f"Text: {c}\n"
        f"Given words: {format_entity_list(entities)}\n"
        "Substituted text:"
    )


def prompt_l_instruction(task: TaskType, target_language: str | None = None) -> str:
    if task is TaskType.TRANSLATE:
        if not target_language:
            raise ValueError("Translate requires a target_language")
        return f"Translate the following text to {target_language}:"
    return f"{task.render()} the following text:"


def build_prompt_l(e: str, task: TaskType, target_language: str | None = None) -> str:
    """The task prompt sent with anonymized text e to obtain l."""
    return f"{prompt_l_instruction(task, target_language)}\nText: {e}"


def build_prompt_r(e: str, l: str, c: str, task: TaskType) -> str:
    """The de-anonymization prompt: (e, l, c) in, r expected after the final colon."""
    t = task.render()
    return f"Input: {e}\n{t}: {l}\nInput: {c}\n{t}:"


# ------------------------------------------------------------------ backends


class MockEcho:
    """Returns the last user message verbatim; the identity cloud LLM."""

    name = "echo"

    def complete(self, req: LlmRequest) -> str:
        return req.last_user_content()


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def builtin_lexicon_path() -> Path:
    """The shipped English->French demo lexicon."""
    return Path(str(resources.files("hideseek") / "data" / "lexicons" / "en_fr_demo.tsv"))


def load_lexicon(path) -> dict[str, str]:
    """Tab-separated source/target pairs, one per line, UTF-8."""
    lexicon: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise ConfigError(f"{path}: line {lineno}: expected 'source<TAB>target'")
            lexicon[parts[0].casefold()] = parts[1]
    if not lexicon:
        raise ConfigError(f"{path}: empty lexicon")
    return lexicon


class MockDictTranslate:
    """Word-for-word translation by lexicon lookup.

    Tokens are whitespace-delimited; edge punctuation is carried over
    unchanged, unknown words and placeholder tokens pass through verbatim.
    """

    name = "dict"

    def __init__(self, lexicon: dict[str, str], target: str = "French"):
        self.lexicon = dict(lexicon)
        self.target = target

    @classmethod
    def from_file(cls, path, target: str = "French") -> "MockDictTranslate":
        return cls(load_lexicon(path), target=target)

    def translate_text(self, text: str) -> str:
        out = []
        for token in text.split():
            start, end = 0, len(token)
            while start < end and _is_punct(token[start]):
                start += 1
            while end > start and _is_punct(token[end - 1]):
                end -= 1
            core = token[start:end]
            replacement = self.lexicon.get(core.casefold())
            if replacement is None:
                out.append(token)
            else:
                out.append(token[:start] + replacement + token[end:])
        return " ".join(out)

    def complete(self, req: LlmRequest) -> str:
        return self.translate_text(req.last_user_content())


class MockClassify:
    """Keyword-count classifier: the label whose keyword set matches the most
    tokens wins; ties go to the lexicographically smallest label."""

    name = "classify"

    def __init__(self, keyword_table: dict[str, list[str]]):
        if not keyword_table:
            raise ConfigError("classifier needs a non-empty keyword table")
        self.keyword_table = {
            label: frozenset(k.casefold() for k in keywords)
            for label, keywords in keyword_table.items()
        }

    def complete(self, req: LlmRequest) -> str:
        from .textutil import tokenize

        tokens = tokenize(req.last_user_content())
        scores = {
            label: sum(1 for tok in tokens if tok in keywords)
            for label, keywords in self.keyword_table.items()
        }
        return min(scores, key=lambda label: (-scores[label], label))


@dataclass(frozen=True)
class RemoteChat:
    """Chat-completions HTTP client. The API key is read from the environment
    variable named by key_env at call time and never stored or logged."""

    endpoint: str
    model: str
    key_env: str
    timeout: float = 30.0
    max_attempts: int = 1
    backoff_seconds: float = 0.5

    name = "remote"

    def __post_init__(self) -> None:
        if not self.endpoint:
            raise ConfigError("remote backend requires an endpoint")
        if not self.key_env:
            raise ConfigError("remote backend requires key_env naming the API key variable")
        if self.max_attempts < 1:
            raise ConfigError("max_attempts must be >= 1")

    def complete(self, req: LlmRequest) -> str:
        api_key = os.environ.get(self.key_env)
        if not api_key:
            raise ConfigError(f"environment variable {self.key_env} is not set")
        url = self.endpoint.rstrip("/") + "/chat/completions"
        body = {
            "model": self.model,
            "messages": [m.to_dict() for m in req.messages],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        headers = {"Authorization": f"Bearer {api_key}"}
        last_exc: Exception | None = None
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(self.backoff_seconds * (2 ** (attempt - 1)))
            try:
                response = requests.post(url, json=body, headers=headers, timeout=self.timeout)
            except requests.RequestException as exc:
                last_exc = TransportError(str(exc))
                continue
            if response.status_code >= 500:
                last_exc = HttpStatusError(response.status_code, response.text)
                continue
            if not (200 <= response.status_code < 300):
                raise HttpStatusError(response.status_code, response.text)
            return _parse_chat_response(response)
        raise last_exc  # type: ignore[misc]


def _parse_chat_response(response) -> str:
    try:
        payload = response.json()
    except ValueError as exc:
        raise MalformedResponseError(f"response body is not JSON: {exc}") from exc
    try:
        content = payload["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError) as exc:
        raise MalformedResponseError(
            "response JSON lacks choices[0].message.content"
        ) from exc
    if not isinstance(content, str):
        raise MalformedResponseError("choices[0].message.content is not a string")
    return content


Backend = MockEcho | MockDictTranslate | MockClassify | RemoteChat


def complete(backend: Backend, req: LlmRequest) -> str:
    """Run one request against any backend; exactly one upstream call unless
    the backend's own retry config says otherwise."""
    return backend.complete(req)
