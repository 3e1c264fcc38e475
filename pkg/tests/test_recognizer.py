"""Entity extraction: rule table, gazetteers, manual merge, dedup."""

from __future__ import annotations

import pytest

from hideseek.errors import ConfigError, OverlappingSpansError
from hideseek.recognizer import (
    Gazetteer,
    RecognizerConfig,
    dedup_surfaces,
    merge_spans,
    recognize,
)
from hideseek.types import EntitySpan, EntityType

from conftest import INCIDENT, manual_org_span


@pytest.fixture(scope="module")
def cfg() -> RecognizerConfig:
    return RecognizerConfig.default()


def surfaces(spans):
    return [(s.surface, s.etype.code) for s in spans]


def test_incident_report_extraction(cfg):
    spans = recognize(INCIDENT, cfg)
    assert dedup_surfaces(spans) == ["FBI", "August 10, 2023", "Washington DC"]
    kinds = {s.surface: s.etype for s in spans}
    assert kinds["FBI"] is EntityType.ORG
    assert kinds["August 10, 2023"] is EntityType.DATE
    assert kinds["Washington DC"] is EntityType.GPE
    # FBI appears twice in the text and must be found both times.
    assert sum(1 for s in spans if s.surface == "FBI") == 2


def test_empty_text(cfg):
    assert recognize("", cfg) == []


def test_numeric_rule_walk(cfg):
    spans = recognize("Revenue grew 12% to $3.5 million in 2021.", cfg)
    assert surfaces(spans) == [
        ("12%", "PERCENT"),
        ("$3.5 million", "MONEY"),
        ("2021", "DATE"),
    ]


def test_time_and_quantity_rules(cfg):
    spans = recognize("The flight left at 9:30 AM carrying 250 kg of cargo.", cfg)
    kinds = {s.etype.code for s in spans}
    assert "TIME" in kinds
    assert "QUANTITY" in kinds


def test_spans_are_sorted_nonoverlapping_and_anchored(cfg, small_corpus):
    for text in small_corpus + [INCIDENT]:
        spans = recognize(text, cfg)
        for sp in spans:
            assert text[sp.start : sp.end] == sp.surface
        starts = [sp.start for sp in spans]
        assert starts == sorted(starts)
        for prev, cur in zip(spans, spans[1:]):
            assert cur.start >= prev.end


def test_recognition_is_deterministic(cfg, small_corpus):
    for text in small_corpus:
        assert recognize(text, cfg) == recognize(text, cfg)


def test_token_boundary_discipline(cfg):
    # 'US' must not fire inside an ordinary word.
    spans = recognize("The USUALLY label stays put.", cfg)
    assert all(s.surface != "US" for s in spans)


def test_disabled_types_are_filtered():
    cfg = RecognizerConfig.from_dict({"enabled_types": ["DATE"]})
    spans = recognize("The FBI met on August 10, 2023 in Washington DC.", cfg)
    assert {s.etype for s in spans} == {EntityType.DATE}


def test_custom_pattern_extends_rules():
    cfg = RecognizerConfig.from_dict(
        {
            "enabled_types": ["LAW"],
            "gazetteers": {},
            "patterns": [{"etype": "LAW", "pattern": r"Directive [0-9]{4}/[0-9]+"}],
        }
    )
    spans = recognize("Directive 2016/679 applies.", cfg)
    assert surfaces(spans) == [("Directive 2016/679", "LAW")]


def test_invalid_pattern_fails_at_config_time():
    with pytest.raises(ConfigError):
        RecognizerConfig(
            enabled_types=frozenset({EntityType.LAW}),
            custom_patterns=((EntityType.LAW, "(unclosed"),),
        )


def test_gazetteer_for_disabled_type_is_rejected():
    with pytest.raises(ConfigError):
        RecognizerConfig(
            enabled_types=frozenset({EntityType.DATE}),
            gazetteer_paths=((EntityType.ORG, "/nonexistent"),),
        )


def test_gazetteer_entry_validation():
    with pytest.raises(ConfigError):
        Gazetteer(etype=EntityType.ORG, entries=frozenset())
    with pytest.raises(ConfigError):
        Gazetteer(etype=EntityType.ORG, entries=frozenset({"  "}))


def test_merge_spans_manual_only():
    manual = manual_org_span(INCIDENT)
    assert merge_spans([], [manual]) == [manual]


def test_merge_spans_longest_auto_wins():
    text = "She flew to New York City yesterday."
    short = EntitySpan(12, 20, "New York", EntityType.GPE)
    long = EntitySpan(12, 25, "New York City", EntityType.GPE)
    merged = merge_spans([short, long], [])
    assert merged == [long]
    # Tie on length breaks toward the smaller start.
    a = EntitySpan(0, 3, "She", EntityType.PERSON)
    b = EntitySpan(1, 4, "he ", EntityType.PERSON)
    assert merge_spans([a, b], []) == [a]


def test_merge_spans_manual_beats_auto():
    text = "Jordan visited."
    auto = EntitySpan(0, 6, "Jordan", EntityType.GPE)
    manual = EntitySpan(0, 6, "Jordan", EntityType.PERSON, source="manual")
    merged = merge_spans([auto], [manual])
    assert merged == [manual]
    assert merged[0].etype is EntityType.PERSON


def test_merge_spans_rejects_overlapping_manual():
    m1 = EntitySpan(0, 5, "aaaaa", EntityType.ORG, source="manual")
    m2 = EntitySpan(3, 8, "bbbbb", EntityType.ORG, source="manual")
    with pytest.raises(OverlappingSpansError) as exc:
        merge_spans([], [m1, m2])
    message = str(exc.value)
    assert "0" in message and "3" in message  # both offenders identified


def test_merge_result_is_sorted_and_disjoint():
    auto = [
        EntitySpan(10, 14, "abcd", EntityType.ORG),
        EntitySpan(0, 4, "wxyz", EntityType.GPE),
    ]
    manual = [EntitySpan(12, 20, "cdefghij", EntityType.PERSON, source="manual")]
    merged = merge_spans(auto, manual)
    starts = [s.start for s in merged]
    assert starts == sorted(starts)
    for prev, cur in zip(merged, merged[1:]):
        assert cur.start >= prev.end
    # The auto span overlapping the manual one is evicted.
    assert all(not (s.start == 10 and s.source == "auto") for s in merged)


def test_dedup_surfaces_first_occurrence_case_sensitive():
    spans = [
        EntitySpan(0, 3, "FBI", EntityType.ORG),
        EntitySpan(10, 13, "FBI", EntityType.ORG),
        EntitySpan(20, 23, "fbi", EntityType.ORG),
    ]
    assert dedup_surfaces(spans) == ["FBI", "fbi"]
    assert dedup_surfaces([]) == []


def test_manual_override_merges_into_incident_extraction(cfg):
    manual = manual_org_span(INCIDENT)
    merged = merge_spans(recognize(INCIDENT, cfg), [manual])
    assert "Federal Bureau of Investigation" in dedup_surfaces(merged)
    assert all(
        text_ok
        for text_ok in (
            INCIDENT[s.start : s.end] == s.surface for s in merged
        )
    )
