"""YAML configuration: one file drives the CLI, the pipeline and the gateway.

Every key is optional; an absent file means all defaults. Sections:

    seed: 0                     # drives surrogate sampling everywhere
    strategy: label             # label | generative
    label_mode: bare            # bare | indexed (label strategy only)
    task: translate             # translate | abstract | polish | classify
    target_language: French
    backend:
      kind: dict                # echo | dict | classify | remote
      lexicon: builtin          # dict: TSV path or "builtin"
      target: French            # dict: language tag written into prompts
      keywords: builtin         # classify: {label: [words]} or "builtin"
      endpoint: https://...     # remote
      model: gpt-4o-mini        # remote
      key_env: OPENAI_API_KEY   # remote: env var holding the API key
      timeout: 30.0             # remote
      max_attempts: 1           # remote
    recognizer:
      enabled_types: [PERSON, ORG, ...]
      gazetteers: builtin       # or {CODE: path}
      patterns: [{etype: CODE, pattern: "..."}]
    policy:
      numeric_jitter: 0.5
      date_shift_days: 400
    seek:
      fuzzy_threshold: 0.8
      case_insensitive_pass: true
      window_slack: 2
    gateway:
      host: 127.0.0.1
      port: 8787
      entity_header: X-HAS-Entities
      hide_system: true
      transparent: false
      label_mode: indexed       # gateway default differs: multi-message
                                # requests need globally numbered placeholders

Unknown keys raise ConfigError so typos fail loudly instead of silently
running with defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .backends import (
    Backend,
    MockClassify,
    MockDictTranslate,
    MockEcho,
    RemoteChat,
    builtin_lexicon_path,
)
from .errors import ConfigError
from .gateway import GatewayConfig
from .hide import SurrogatePolicy
from .recognizer import RecognizerConfig
from .seek import SeekConfig
from .types import HideStrategy, TaskType

_TOP_KEYS = {
    "seed",
    "strategy",
    "label_mode",
    "task",
    "target_language",
    "backend",
    "recognizer",
    "policy",
    "seek",
    "gateway",
}
_BACKEND_KEYS = {
    "kind",
    "lexicon",
    "target",
    "keywords",
    "endpoint",
    "model",
    "key_env",
    "timeout",
    "max_attempts",
}
_POLICY_KEYS = {"numeric_jitter", "date_shift_days"}
_SEEK_KEYS = {"fuzzy_threshold", "case_insensitive_pass", "window_slack"}
_GATEWAY_KEYS = {"host", "port", "entity_header", "hide_system", "transparent", "label_mode"}
_RECOGNIZER_KEYS = {"enabled_types", "gazetteers", "patterns"}


def _require_keys(section: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown {where} keys: {unknown}")


def _section(raw: dict, key: str) -> dict:
    value = raw.get(key, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"{key} section must be a mapping")
    return dict(value)


@dataclass(frozen=True)
class AppConfig:
    """Everything a command needs, already validated.

    `strategy` covers the pipeline commands; the gateway keeps its own
    label mode (default indexed) because one request can span several
    messages and bare placeholders would not number entities globally.
    """

    seed: int = 0
    strategy: HideStrategy = field(default_factory=HideStrategy.label)
    task: TaskType = TaskType.TRANSLATE
    target_language: str | None = "French"
    backend_spec: tuple[tuple[str, object], ...] = (("kind", "echo"),)
    recognizer: RecognizerConfig = field(default_factory=RecognizerConfig.default)
    policy: SurrogatePolicy = field(default_factory=SurrogatePolicy.default)
    seek_cfg: SeekConfig = field(default_factory=SeekConfig)
    gateway: tuple[tuple[str, object], ...] = ()

    def backend_dict(self) -> dict:
        return dict(self.backend_spec)

    def gateway_dict(self) -> dict:
        return dict(self.gateway)


def _parse_strategy(raw: dict) -> HideStrategy:
    kind = raw.get("strategy", "label")
    if kind not in ("label", "generative"):
        raise ConfigError(f"strategy must be 'label' or 'generative', got {kind!r}")
    if kind == "generative":
        if "label_mode" in raw:
            raise ConfigError("label_mode is only valid with strategy: label")
        return HideStrategy.generative()
    mode = raw.get("label_mode", "bare")
    if mode not in ("bare", "indexed"):
        raise ConfigError(f"label_mode must be 'bare' or 'indexed', got {mode!r}")
    return HideStrategy.label(mode)


def load_config(path: str | Path | None) -> AppConfig:
    """Parse a YAML config file; path=None yields pure defaults."""
    if path is None:
        return AppConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    _require_keys(raw, _TOP_KEYS, "config")

    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not (0 <= seed < 2**64):
        raise ConfigError("seed must be an integer in [0, 2**64)")

    strategy = _parse_strategy(raw)

    task_name = raw.get("task", "translate")
    try:
        task = TaskType.parse(str(task_name))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    target_language = raw.get("target_language", "French")
    if target_language is not None and not isinstance(target_language, str):
        raise ConfigError("target_language must be a string or null")

    backend = _section(raw, "backend")
    _require_keys(backend, _BACKEND_KEYS, "backend")
    if not backend:
        backend = {"kind": "echo"}

    recognizer_raw = _section(raw, "recognizer")
    _require_keys(recognizer_raw, _RECOGNIZER_KEYS, "recognizer")
    if recognizer_raw:
        recognizer = RecognizerConfig.from_dict(recognizer_raw)
    else:
        recognizer = RecognizerConfig.default()

    policy_raw = _section(raw, "policy")
    _require_keys(policy_raw, _POLICY_KEYS, "policy")
    try:
        policy = replace(
            SurrogatePolicy.default(seed),
            numeric_jitter=policy_raw.get("numeric_jitter", 0.5),
            date_shift_days=policy_raw.get("date_shift_days", 400),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"policy: {exc}") from exc

    seek_raw = _section(raw, "seek")
    _require_keys(seek_raw, _SEEK_KEYS, "seek")
    try:
        seek_cfg = SeekConfig(
            fuzzy_threshold=seek_raw.get("fuzzy_threshold", 0.80),
            case_insensitive_pass=seek_raw.get("case_insensitive_pass", True),
            window_slack=seek_raw.get("window_slack", 2),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"seek: {exc}") from exc

    gateway_raw = _section(raw, "gateway")
    _require_keys(gateway_raw, _GATEWAY_KEYS, "gateway")

    return AppConfig(
        seed=seed,
        strategy=strategy,
        task=task,
        target_language=target_language,
        backend_spec=tuple(sorted(backend.items())),
        recognizer=recognizer,
        policy=policy,
        seek_cfg=seek_cfg,
        gateway=tuple(sorted(gateway_raw.items())),
    )


def apply_overrides(
    cfg: AppConfig,
    *,
    seed: int | None = None,
    strategy: str | None = None,
    task: str | None = None,
    backend: str | None = None,
) -> AppConfig:
    """Fold CLI flags over a loaded config (flag > file > default)."""
    if seed is not None:
        if not (0 <= seed < 2**64):
            raise ConfigError("seed must be an integer in [0, 2**64)")
        cfg = replace(cfg, seed=seed, policy=replace(cfg.policy, seed=seed))
    if strategy is not None:
        if strategy == "generative":
            cfg = replace(cfg, strategy=HideStrategy.generative())
        elif strategy == "label":
            mode = (
                cfg.strategy.placeholder_mode
                if cfg.strategy.kind == "label_based"
                else "bare"
            )
            cfg = replace(cfg, strategy=HideStrategy.label(mode))
        else:
            raise ConfigError(f"strategy must be 'label' or 'generative', got {strategy!r}")
    if task is not None:
        try:
            cfg = replace(cfg, task=TaskType.parse(task))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    if backend is not None:
        spec = cfg.backend_dict()
        spec["kind"] = backend
        cfg = replace(cfg, backend_spec=tuple(sorted(spec.items())))
    return cfg


def build_backend(cfg: AppConfig) -> Backend:
    """Instantiate the backend named by the config's backend section."""
    spec = cfg.backend_dict()
    kind = spec.get("kind", "echo")
    if kind == "echo":
        return MockEcho()
    if kind == "dict":
        lexicon = spec.get("lexicon", "builtin")
        path = builtin_lexicon_path() if lexicon == "builtin" else Path(str(lexicon))
        target = spec.get("target", cfg.target_language or "French")
        return MockDictTranslate.from_file(path, target=str(target))
    if kind == "classify":
        keywords = spec.get("keywords", "builtin")
        if keywords == "builtin":
            from .corpus import default_keyword_table

            table = default_keyword_table()
        elif isinstance(keywords, dict):
            table = {str(k): [str(w) for w in v] for k, v in keywords.items()}
        else:
            raise ConfigError("backend.keywords must be 'builtin' or a mapping")
        return MockClassify(table)
    if kind == "remote":
        endpoint = spec.get("endpoint")
        model = spec.get("model")
        key_env = spec.get("key_env")
        if not endpoint or not model or not key_env:
            raise ConfigError("remote backend needs endpoint, model and key_env")
        try:
            return RemoteChat(
                endpoint=str(endpoint),
                model=str(model),
                key_env=str(key_env),
                timeout=float(spec.get("timeout", 30.0)),
                max_attempts=int(spec.get("max_attempts", 1)),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"backend: {exc}") from exc
    raise ConfigError(f"backend.kind must be one of echo, dict, classify, remote; got {kind!r}")


def build_gateway_config(cfg: AppConfig, upstream: Backend) -> GatewayConfig:
    """Assemble the gateway settings from the app config plus an upstream."""
    g = cfg.gateway_dict()
    if cfg.strategy.kind == "generative":
        strategy = cfg.strategy
        if "label_mode" in g:
            raise ConfigError("gateway.label_mode is only valid with strategy: label")
    else:
        mode = g.get("label_mode", "indexed")
        if mode not in ("bare", "indexed"):
            raise ConfigError(f"gateway.label_mode must be 'bare' or 'indexed', got {mode!r}")
        strategy = HideStrategy.label(mode)
    port = g.get("port", 8787)
    if isinstance(port, bool) or not isinstance(port, int) or not (0 < port < 65536):
        raise ConfigError("gateway.port must be an integer in (0, 65536)")
    return GatewayConfig(
        upstream=upstream,
        strategy=strategy,
        seed=cfg.seed,
        recognizer=cfg.recognizer,
        policy=cfg.policy,
        seek_cfg=cfg.seek_cfg,
        entity_header=str(g.get("entity_header", "X-HAS-Entities")),
        hide_system=bool(g.get("hide_system", True)),
        transparent=bool(g.get("transparent", False)),
        host=str(g.get("host", "127.0.0.1")),
        port=port,
    )
