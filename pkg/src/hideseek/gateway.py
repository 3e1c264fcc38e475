"""HTTP proxy that anonymizes chat requests before they reach a completion API.

The gateway accepts OpenAI-style /v1/chat/completions bodies, recognizes and
hides privacy entities in the outbound messages, forwards the anonymized
conversation to the configured upstream backend, and restores the original
entities in the reply before returning it.

All hidden messages of one request are anonymized through a single composite
document (contents joined by a blank line), so one mapping covers the whole
conversation: surrogates cannot collide across messages, indexed placeholders
number entities globally, and the upstream reply is de-anonymized with one
seek pass regardless of which message an entity first appeared in.

The original<->surrogate mapping lives only inside the request handler frame.
Nothing is cached between requests, and no error path echoes request content:
4xx/5xx bodies are built exclusively from fixed phrases and structural
indices.
"""

from __future__ import annotations

import json
import logging
import time
import uuid
from dataclasses import dataclass, field, replace

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from starlette.concurrency import run_in_threadpool

from . import __version__
from .backends import ROLES, Backend, LlmRequest, Message, RemoteChat, complete
from .errors import BackendError
from .hide import SurrogatePolicy, hide_generative, hide_label
from .recognizer import RecognizerConfig, merge_spans, recognize
from .seek import SeekConfig, seek
from .textutil import iter_token_bounded
from .types import AnonymizedDocument, EntitySpan, EntityType, HideStrategy

log = logging.getLogger(__name__)

SEPARATOR = "\n\n"


class _BadRequest(Exception):
    """Client error carrying a message safe to echo (never request content)."""


@dataclass(frozen=True)
class GatewayConfig:
    """Settings for one gateway instance.

    hide_system controls whether system prompts are anonymized too; user and
    assistant messages always are, because assistant history echoes restored
    entities back into later requests. transparent=True forwards requests
    unmodified (a measurement baseline, not a privacy mode). `seed` drives
    surrogate sampling and supersedes policy.seed, so one knob controls
    determinism.
    """

    upstream: Backend
    strategy: HideStrategy = field(default_factory=lambda: HideStrategy.label("indexed"))
    seed: int = 0
    recognizer: RecognizerConfig = field(default_factory=RecognizerConfig.default)
    policy: SurrogatePolicy = field(default_factory=SurrogatePolicy.default)
    seek_cfg: SeekConfig = field(default_factory=SeekConfig)
    entity_header: str = "X-HAS-Entities"
    hide_system: bool = True
    transparent: bool = False
    host: str = "127.0.0.1"
    port: int = 8787

    def hidden_roles(self) -> frozenset[str]:
        roles = {"user", "assistant"}
        if self.hide_system:
            roles.add("system")
        return frozenset(roles)


def strategy_label(cfg: GatewayConfig) -> str:
    if cfg.transparent:
        return "transparent"
    if cfg.strategy.kind == "label_based":
        return f"label_based/{cfg.strategy.placeholder_mode}"
    return "generative"


def _parse_chat_body(raw: bytes):
    """Validate an OpenAI-style chat body; returns (messages, model, temperature, max_tokens)."""
    try:
        body = json.loads(raw)
    except ValueError as exc:
        raise _BadRequest("request body is not valid JSON") from exc
    if not isinstance(body, dict):
        raise _BadRequest("request body must be a JSON object")
    messages = body.get("messages")
    if not isinstance(messages, list) or not messages:
        raise _BadRequest("messages must be a non-empty array")
    parsed: list[tuple[str, str]] = []
    for i, message in enumerate(messages):
        if not isinstance(message, dict):
            raise _BadRequest(f"messages[{i}] must be an object")
        role = message.get("role")
        content = message.get("content")
        if role not in ROLES:
            raise _BadRequest(f"messages[{i}].role must be one of {list(ROLES)}")
        if not isinstance(content, str):
            raise _BadRequest(f"messages[{i}].content must be a string")
        parsed.append((role, content))
    if not any(role == "user" for role, _ in parsed):
        raise _BadRequest("at least one user message is required")
    model = body.get("model", "default")
    if not isinstance(model, str) or not model:
        raise _BadRequest("model must be a non-empty string")
    temperature = body.get("temperature", 0.0)
    if isinstance(temperature, bool) or not isinstance(temperature, (int, float)) or temperature < 0:
        raise _BadRequest("temperature must be a number >= 0")
    max_tokens = body.get("max_tokens", 1024)
    if isinstance(max_tokens, bool) or not isinstance(max_tokens, int) or max_tokens < 1:
        raise _BadRequest("max_tokens must be an integer >= 1")
    return parsed, model, float(temperature), max_tokens


def _parse_entity_header(raw: str | None) -> list[tuple[str, EntityType]]:
    """Manual entities from the request header: a JSON array of
    {"surface": ..., "type": ...} objects. Surfaces are matched
    token-bounded in every hidden message."""
    if raw is None or not raw.strip():
        return []
    try:
        data = json.loads(raw)
    except ValueError as exc:
        raise _BadRequest("entity header is not valid JSON") from exc
    if not isinstance(data, list):
        raise _BadRequest("entity header must be a JSON array")
    out: list[tuple[str, EntityType]] = []
    for i, item in enumerate(data):
        if not isinstance(item, dict):
            raise _BadRequest(f"entity header entry {i} must be an object")
        surface = item.get("surface")
        code = item.get("type")
        if not isinstance(surface, str) or not surface:
            raise _BadRequest(f"entity header entry {i} needs a non-empty surface string")
        if not isinstance(code, str):
            raise _BadRequest(f"entity header entry {i} needs a type code string")
        try:
            etype = EntityType.parse(code)
        except (KeyError, ValueError) as exc:
            raise _BadRequest(f"entity header entry {i} has an unknown type code") from exc
        out.append((surface, etype))
    return out


def _manual_spans(content: str, requested: list[tuple[str, EntityType]]) -> list[EntitySpan]:
    """Token-bounded matches of the requested surfaces, longest-wins on overlap.

    Header entries are surface requests rather than exact offsets, so
    overlaps between them (e.g. "New York" inside "New York City") are
    resolved here with the same longest-then-leftmost rule the recognizer
    uses, instead of being treated as caller errors.
    """
    candidates: list[EntitySpan] = []
    for surface, etype in requested:
        for pos in iter_token_bounded(content, surface):
            candidates.append(EntitySpan(pos, pos + len(surface), surface, etype, source="manual"))
    chosen: list[EntitySpan] = []
    for span in sorted(candidates, key=lambda s: (-(s.end - s.start), s.start)):
        if all(span.end <= other.start or span.start >= other.end for other in chosen):
            chosen.append(span)
    chosen.sort(key=lambda s: s.start)
    return chosen


@dataclass(frozen=True)
class HiddenConversation:
    """One request's anonymization outcome: the composite document whose
    mapping covers every hidden message, and the outbound message list."""

    doc: AnonymizedDocument
    outbound: tuple[tuple[str, str], ...]
    entities_hidden: int


def hide_conversation(
    parsed: list[tuple[str, str]],
    manual: list[tuple[str, EntityType]],
    cfg: GatewayConfig,
) -> HiddenConversation:
    """Anonymize all hidden-role messages through one composite document."""
    hidden_roles = cfg.hidden_roles()
    hidden_idx = [i for i, (role, _) in enumerate(parsed) if role in hidden_roles]
    local_spans: dict[int, list[EntitySpan]] = {}
    for i in hidden_idx:
        content = parsed[i][1]
        auto = recognize(content, cfg.recognizer)
        local_spans[i] = merge_spans(auto, _manual_spans(content, manual))

    composite = SEPARATOR.join(parsed[i][1] for i in hidden_idx)
    shifted: list[EntitySpan] = []
    base = 0
    for i in hidden_idx:
        for span in local_spans[i]:
            shifted.append(
                EntitySpan(base + span.start, base + span.end, span.surface, span.etype, span.source)
            )
        base += len(parsed[i][1]) + len(SEPARATOR)

    if cfg.strategy.kind == "label_based":
        doc = hide_label(composite, shifted, cfg.strategy.placeholder_mode)
    else:
        doc = hide_generative(composite, shifted, replace(cfg.policy, seed=cfg.seed))

    surrogate_of = {entry.original.casefold(): entry.surrogate for entry in doc.mapping.entries}
    outbound: list[tuple[str, str]] = []
    for i, (role, content) in enumerate(parsed):
        if i in local_spans:
            outbound.append((role, _apply_mapping(content, local_spans[i], surrogate_of)))
        else:
            outbound.append((role, content))
    return HiddenConversation(doc=doc, outbound=tuple(outbound), entities_hidden=len(shifted))


def _apply_mapping(
    content: str, spans: list[EntitySpan], surrogate_of: dict[str, str]
) -> str:
    parts: list[str] = []
    cursor = 0
    for span in sorted(spans, key=lambda s: s.start):
        parts.append(content[cursor : span.start])
        parts.append(surrogate_of[span.surface.casefold()])
        cursor = span.end
    parts.append(content[cursor:])
    return "".join(parts)


def _probe_upstream(backend: Backend) -> bool:
    """Reachability only: any HTTP response from a remote endpoint counts."""
    if isinstance(backend, RemoteChat):
        import requests

        try:
            requests.head(backend.endpoint, timeout=2.0, allow_redirects=False)
        except requests.RequestException:
            return False
        return True
    return True


def _error_response(status: int, message: str, kind: str) -> JSONResponse:
    return JSONResponse(
        {"error": {"message": message, "type": kind, "code": status}}, status_code=status
    )


def build_app(cfg: GatewayConfig) -> FastAPI:
    """A stateless FastAPI app exposing the anonymizing chat proxy."""
    app = FastAPI(title="hideseek gateway", docs_url=None, redoc_url=None, openapi_url=None)

    @app.get("/healthz")
    async def healthz():
        return {
            "status": "ok",
            "version": __version__,
            "strategy": strategy_label(cfg),
            "upstream": getattr(cfg.upstream, "name", type(cfg.upstream).__name__),
            "upstream_reachable": await run_in_threadpool(_probe_upstream, cfg.upstream),
        }

    @app.post("/v1/chat/completions")
    async def chat_completions(request: Request):
        raw = await request.body()
        try:
            parsed, model, temperature, max_tokens = _parse_chat_body(raw)
            manual = _parse_entity_header(request.headers.get(cfg.entity_header))
        except _BadRequest as exc:
            return _error_response(400, str(exc), "invalid_request_error")

        if cfg.transparent:
            doc = None
            outbound: tuple[tuple[str, str], ...] = tuple(parsed)
            entities_hidden = 0
        else:
            try:
                hidden = hide_conversation(parsed, manual, cfg)
            except Exception:
                log.exception("anonymization failed")
                return _error_response(500, "anonymization failed", "gateway_error")
            doc = hidden.doc
            outbound = hidden.outbound
            entities_hidden = hidden.entities_hidden

        req = LlmRequest(
            messages=tuple(Message(role, content) for role, content in outbound),
            model=model,
            temperature=temperature,
            max_tokens=max_tokens,
        )
        try:
            reply = await run_in_threadpool(complete, cfg.upstream, req)
        except BackendError:
            log.exception("upstream completion failed")
            return _error_response(502, "upstream completion failed", "upstream_error")

        if doc is None:
            restored_text = reply
            restored_count = 0
            unresolved: tuple[str, ...] = ()
        else:
            result = seek(doc, reply, cfg.seek_cfg)
            restored_text = result.text
            restored_count = result.restored
            unresolved = result.unresolved

        return JSONResponse(
            {
                "id": "hasgw-" + uuid.uuid4().hex[:24],
                "object": "chat.completion",
                "created": int(time.time()),
                "model": model,
                "choices": [
                    {
                        "index": 0,
                        "message": {"role": "assistant", "content": restored_text},
                        "finish_reason": "stop",
                    }
                ],
                "has": {
                    "strategy": strategy_label(cfg),
                    "entities_hidden": entities_hidden,
                    "entities_restored": restored_count,
                    "unresolved": len(unresolved),
                },
            }
        )

    return app


def run_gateway(cfg: GatewayConfig) -> None:  # pragma: no cover - needs a live socket
    import uvicorn

    uvicorn.run(build_app(cfg), host=cfg.host, port=cfg.port, log_level="info")
