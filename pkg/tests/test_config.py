"""YAML config: defaults, validation, CLI overrides, backend construction,
and gateway settings assembly."""

from __future__ import annotations

import pytest

from hideseek.backends import MockClassify, MockDictTranslate, MockEcho, RemoteChat
from hideseek.config import (
    AppConfig,
    apply_overrides,
    build_backend,
    build_gateway_config,
    load_config,
)
from hideseek.errors import ConfigError
from hideseek.types import TaskType


def write_config(tmp_path, text: str):
    path = tmp_path / "config.yaml"
    path.write_text(text, encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Loading and validation.
# ---------------------------------------------------------------------------


def test_no_file_means_all_defaults():
    cfg = load_config(None)
    assert cfg.seed == 0
    assert cfg.strategy.kind == "label_based"
    assert cfg.strategy.placeholder_mode == "bare"
    assert cfg.task is TaskType.TRANSLATE
    assert cfg.backend_dict() == {"kind": "echo"}


def test_empty_file_means_all_defaults(tmp_path):
    assert load_config(write_config(tmp_path, "")) == AppConfig()


def test_full_document_parses(tmp_path):
    path = write_config(
        tmp_path,
        """
        seed: 42
        strategy: label
        label_mode: indexed
        task: classify
        target_language: null
        backend:
          kind: classify
        policy:
          numeric_jitter: 1.5
          date_shift_days: 100
        seek:
          fuzzy_threshold: 0.7
          window_slack: 3
        gateway:
          port: 9000
          transparent: true
        """,
    )
    cfg = load_config(path)
    assert cfg.seed == 42
    assert cfg.policy.seed == 42
    assert cfg.strategy.placeholder_mode == "indexed"
    assert cfg.task is TaskType.CLASSIFY
    assert cfg.target_language is None
    assert cfg.policy.numeric_jitter == 1.5
    assert cfg.policy.date_shift_days == 100
    assert cfg.seek_cfg.fuzzy_threshold == 0.7
    assert cfg.seek_cfg.window_slack == 3
    assert cfg.gateway_dict() == {"port": 9000, "transparent": True}


def test_unknown_top_level_key_fails_loudly(tmp_path):
    with pytest.raises(ConfigError, match="stratgy"):
        load_config(write_config(tmp_path, "stratgy: label\n"))


def test_unknown_section_key_fails_loudly(tmp_path):
    with pytest.raises(ConfigError, match="fuzzy_treshold"):
        load_config(write_config(tmp_path, "seek:\n  fuzzy_treshold: 0.9\n"))
    with pytest.raises(ConfigError, match="backend"):
        load_config(write_config(tmp_path, "backend:\n  lexcion: builtin\n"))


def test_invalid_yaml_and_shapes(tmp_path):
    with pytest.raises(ConfigError, match="invalid YAML"):
        load_config(write_config(tmp_path, "a: [unclosed\n"))
    with pytest.raises(ConfigError, match="mapping"):
        load_config(write_config(tmp_path, "- just\n- a list\n"))
    with pytest.raises(ConfigError, match="mapping"):
        load_config(write_config(tmp_path, "backend: echo\n"))


def test_missing_file_is_a_config_error(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.yaml")


def test_seed_bounds(tmp_path):
    with pytest.raises(ConfigError, match="seed"):
        load_config(write_config(tmp_path, "seed: -1\n"))
    with pytest.raises(ConfigError, match="seed"):
        load_config(write_config(tmp_path, "seed: true\n"))


def test_label_mode_rejected_for_generative(tmp_path):
    path = write_config(tmp_path, "strategy: generative\nlabel_mode: bare\n")
    with pytest.raises(ConfigError, match="label_mode"):
        load_config(path)


def test_bad_enum_values(tmp_path):
    with pytest.raises(ConfigError, match="strategy"):
        load_config(write_config(tmp_path, "strategy: redact\n"))
    with pytest.raises(ConfigError, match="label_mode"):
        load_config(write_config(tmp_path, "label_mode: numbered\n"))
    with pytest.raises(ConfigError):
        load_config(write_config(tmp_path, "task: summarize\n"))


def test_policy_values_are_validated(tmp_path):
    with pytest.raises(ConfigError, match="policy"):
        load_config(write_config(tmp_path, "policy:\n  numeric_jitter: 0\n"))


def test_seek_values_are_validated(tmp_path):
    with pytest.raises(ConfigError, match="seek"):
        load_config(write_config(tmp_path, "seek:\n  fuzzy_threshold: 1.5\n"))


def test_custom_recognizer_section(tmp_path):
    path = write_config(
        tmp_path,
        """
        recognizer:
          enabled_types: [ORG, GPE]
          gazetteers: builtin
        """,
    )
    cfg = load_config(path)
    codes = {t.code for t in cfg.recognizer.enabled_types}
    assert codes == {"ORG", "GPE"}


# ---------------------------------------------------------------------------
# CLI flag overrides.
# ---------------------------------------------------------------------------


def test_overrides_win_over_file_values(tmp_path):
    cfg = load_config(write_config(tmp_path, "seed: 1\nstrategy: label\nlabel_mode: indexed\n"))
    out = apply_overrides(cfg, seed=9, strategy="generative", task="polish", backend="echo")
    assert out.seed == 9
    assert out.policy.seed == 9
    assert out.strategy.kind == "generative"
    assert out.task is TaskType.POLISH
    assert out.backend_dict()["kind"] == "echo"


def test_override_back_to_label_keeps_configured_mode(tmp_path):
    cfg = load_config(write_config(tmp_path, "strategy: label\nlabel_mode: indexed\n"))
    out = apply_overrides(cfg, strategy="label")
    assert out.strategy.placeholder_mode == "indexed"


def test_none_overrides_change_nothing():
    cfg = load_config(None)
    assert apply_overrides(cfg) == cfg


def test_override_validation():
    cfg = load_config(None)
    with pytest.raises(ConfigError):
        apply_overrides(cfg, seed=-3)
    with pytest.raises(ConfigError):
        apply_overrides(cfg, strategy="redact")
    with pytest.raises(ConfigError):
        apply_overrides(cfg, task="summarize")


# ---------------------------------------------------------------------------
# Backend construction.
# ---------------------------------------------------------------------------


def test_build_backend_kinds(tmp_path):
    assert isinstance(build_backend(load_config(None)), MockEcho)

    cfg = load_config(write_config(tmp_path, "backend:\n  kind: dict\n"))
    backend = build_backend(cfg)
    assert isinstance(backend, MockDictTranslate)
    assert backend.translate_text("report is on time") == "rapport est sur time"

    cfg = load_config(write_config(tmp_path, "backend:\n  kind: classify\n"))
    assert isinstance(build_backend(cfg), MockClassify)


def test_build_backend_classify_custom_keywords(tmp_path):
    path = write_config(
        tmp_path,
        """
        backend:
          kind: classify
          keywords:
            yes_label: [good]
            no_label: [bad]
        """,
    )
    backend = build_backend(load_config(path))
    from hideseek.backends import LlmRequest

    assert backend.complete(LlmRequest.user("a good day")) == "yes_label"


def test_build_backend_remote(tmp_path):
    path = write_config(
        tmp_path,
        """
        backend:
          kind: remote
          endpoint: https://api.example/v1
          model: demo-model
          key_env: DEMO_KEY
          timeout: 5.0
          max_attempts: 2
        """,
    )
    backend = build_backend(load_config(path))
    assert isinstance(backend, RemoteChat)
    assert backend.endpoint == "https://api.example/v1"
    assert backend.max_attempts == 2


def test_build_backend_remote_requires_connection_fields(tmp_path):
    path = write_config(tmp_path, "backend:\n  kind: remote\n  model: m\n")
    with pytest.raises(ConfigError, match="endpoint"):
        build_backend(load_config(path))


def test_build_backend_unknown_kind(tmp_path):
    path = write_config(tmp_path, "backend:\n  kind: quantum\n")
    with pytest.raises(ConfigError, match="quantum"):
        build_backend(load_config(path))


# ---------------------------------------------------------------------------
# Gateway assembly.
# ---------------------------------------------------------------------------


def test_gateway_defaults_to_indexed_labels():
    cfg = load_config(None)
    gw = build_gateway_config(cfg, MockEcho())
    assert gw.strategy.kind == "label_based"
    assert gw.strategy.placeholder_mode == "indexed"
    assert gw.entity_header == "X-HAS-Entities"
    assert gw.hide_system is True
    assert gw.transparent is False
    assert (gw.host, gw.port) == ("127.0.0.1", 8787)


def test_gateway_section_overrides(tmp_path):
    path = write_config(
        tmp_path,
        """
        seed: 5
        gateway:
          label_mode: bare
          port: 9999
          hide_system: false
          entity_header: X-Spans
        """,
    )
    gw = build_gateway_config(load_config(path), MockEcho())
    assert gw.strategy.placeholder_mode == "bare"
    assert gw.port == 9999
    assert gw.hide_system is False
    assert gw.entity_header == "X-Spans"
    assert gw.seed == 5


def test_gateway_generative_strategy_carries_over(tmp_path):
    cfg = load_config(write_config(tmp_path, "strategy: generative\n"))
    gw = build_gateway_config(cfg, MockEcho())
    assert gw.strategy.kind == "generative"


def test_gateway_label_mode_invalid_with_generative(tmp_path):
    path = write_config(tmp_path, "strategy: generative\ngateway:\n  label_mode: bare\n")
    with pytest.raises(ConfigError, match="label_mode"):
        build_gateway_config(load_config(path), MockEcho())


def test_gateway_port_validation(tmp_path):
    path = write_config(tmp_path, "gateway:\n  port: 70000\n")
    with pytest.raises(ConfigError, match="port"):
        build_gateway_config(load_config(path), MockEcho())
