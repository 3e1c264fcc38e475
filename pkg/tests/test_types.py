"""Domain types: entity taxonomy, placeholder grammar, span and mapping
invariants, serialization round-trips."""

from __future__ import annotations

import pytest

from hideseek.types import (
    AnonymizedDocument,
    EntityMapping,
    EntitySpan,
    EntityType,
    HideStrategy,
    MappingEntry,
    PipelineRecord,
    SeekMatch,
    SeekResult,
    TaskType,
    is_placeholder,
    render_placeholder,
    span_violations,
    validate_record,
)

ALL_CODES = [
    "DATE", "MONEY", "PERCENT", "QUANTITY", "TIME", "GPE", "LOC",
    "PERSON", "WORK_OF_ART", "ORG", "NORP", "LAW", "FAC", "LANGUAGE",
]


def org_entry(original="FBI", surrogate="CIA"):
    return MappingEntry(original, surrogate, EntityType.ORG)


def test_entity_taxonomy_is_exactly_fourteen_types():
    assert sorted(t.code for t in EntityType) == sorted(ALL_CODES)
    assert len(list(EntityType)) == 14


def test_entity_type_parse_round_trips():
    for code in ALL_CODES:
        assert EntityType.parse(code).code == code
    with pytest.raises(ValueError):
        EntityType.parse("EMAIL")


def test_render_placeholder_grammar():
    assert render_placeholder(EntityType.ORG) == "<ORG>"
    assert render_placeholder(EntityType.ORG, 2) == "<ORG_2>"
    assert render_placeholder(EntityType.WORK_OF_ART, 11) == "<WORK_OF_ART_11>"


def test_is_placeholder_accepts_known_codes_only():
    assert is_placeholder("<ORG>")
    assert is_placeholder("<DATE_3>")
    assert is_placeholder("<WORK_OF_ART>")
    assert not is_placeholder("<EMAIL>")
    assert not is_placeholder("<org>")
    assert not is_placeholder("ORG")
    assert not is_placeholder("<ORG_>")
    assert not is_placeholder("x<ORG>")


def test_entity_span_validation():
    sp = EntitySpan(0, 3, "FBI", EntityType.ORG)
    assert sp.source == "auto"
    with pytest.raises(ValueError):
        EntitySpan(3, 3, "", EntityType.ORG)
    with pytest.raises(ValueError):
        EntitySpan(-1, 2, "ab", EntityType.ORG)
    with pytest.raises(ValueError):
        EntitySpan(0, 3, "FBI", EntityType.ORG, source="guessed")


def test_entity_span_serialization_round_trip():
    sp = EntitySpan(4, 7, "FBI", EntityType.ORG, source="manual")
    assert EntitySpan.from_dict(sp.to_dict()) == sp


def test_span_violations_detects_each_failure_mode():
    text = "The FBI met Marie Curie."
    fbi = EntitySpan(4, 7, "FBI", EntityType.ORG)
    marie = EntitySpan(12, 23, "Marie Curie", EntityType.PERSON)
    assert span_violations([fbi, marie], text) == []
    # Surface mismatch.
    assert span_violations([EntitySpan(4, 7, "CIA", EntityType.ORG)], text)
    # Out of range.
    assert span_violations([EntitySpan(20, 99, "Marie Curie.", EntityType.PERSON)], text)
    # Unsorted.
    assert span_violations([marie, fbi], text)
    # Overlapping.
    overlap = EntitySpan(5, 10, text[5:10], EntityType.ORG)
    assert span_violations([fbi, overlap], text)


def test_hide_strategy_constructors_and_validation():
    assert HideStrategy.label().placeholder_mode == "bare"
    assert HideStrategy.label("indexed").placeholder_mode == "indexed"
    assert HideStrategy.generative().placeholder_mode is None
    with pytest.raises(ValueError):
        HideStrategy(kind="label_based")
    with pytest.raises(ValueError):
        HideStrategy(kind="generative", placeholder_mode="bare")
    with pytest.raises(ValueError):
        HideStrategy(kind="surrogate")
    strategy = HideStrategy.label("indexed")
    assert HideStrategy.from_dict(strategy.to_dict()) == strategy


def test_mapping_requires_distinct_originals():
    mapping = EntityMapping(
        entries=(org_entry("FBI", "CIA"), org_entry("fbi", "NSA")),
        strategy=HideStrategy.generative(),
    )
    assert any("distinct" in v for v in mapping.violations())


def test_mapping_bare_labels_may_repeat_surrogates():
    entries = (
        MappingEntry("FBI", "<ORG>", EntityType.ORG),
        MappingEntry("NSA", "<ORG>", EntityType.ORG),
    )
    bare = EntityMapping(entries=entries, strategy=HideStrategy.label("bare"))
    assert bare.violations() == []
    indexed = EntityMapping(entries=entries, strategy=HideStrategy.label("indexed"))
    assert any("pairwise distinct" in v for v in indexed.violations())


def test_mapping_generative_surrogates_must_be_distinct():
    mapping = EntityMapping(
        entries=(org_entry("FBI", "CIA"), org_entry("NSA", "CIA")),
        strategy=HideStrategy.generative(),
    )
    assert any("pairwise distinct" in v for v in mapping.violations())


def test_mapping_surrogate_may_not_collide_with_original():
    mapping = EntityMapping(
        entries=(org_entry("FBI", "NSA"), org_entry("NSA", "CIA")),
        strategy=HideStrategy.generative(),
    )
    assert any("collides" in v for v in mapping.violations())


def test_label_mapping_surrogate_must_be_typed_placeholder():
    mapping = EntityMapping(
        entries=(MappingEntry("FBI", "<DATE>", EntityType.ORG),),
        strategy=HideStrategy.label("bare"),
    )
    assert any("placeholder of its type" in v for v in mapping.violations())


def test_mapping_seed_bounds():
    with pytest.raises(ValueError):
        EntityMapping(entries=(), strategy=HideStrategy.generative(), seed=-1)
    with pytest.raises(ValueError):
        EntityMapping(entries=(), strategy=HideStrategy.generative(), seed=2**64)


def test_mapping_serialization_round_trip():
    mapping = EntityMapping(
        entries=(org_entry(), MappingEntry("Paris", "Lyon", EntityType.GPE)),
        strategy=HideStrategy.generative(),
        seed=9,
    )
    assert EntityMapping.from_dict(mapping.to_dict()) == mapping


def test_anonymized_document_violations_catch_leak_and_bad_inverse():
    mapping = EntityMapping(
        entries=(org_entry("FBI", "CIA"),),
        strategy=HideStrategy.generative(),
    )
    good = AnonymizedDocument(
        original="The FBI met.",
        anonymized="The CIA met.",
        mapping=mapping,
        spans=(EntitySpan(4, 7, "FBI", EntityType.ORG),),
    )
    assert good.violations() == []
    leaky = AnonymizedDocument(
        original="The FBI met.", anonymized="The FBI met.", mapping=mapping
    )
    assert any("leaks" in v for v in leaky.violations())
    drifted = AnonymizedDocument(
        original="The FBI met.", anonymized="A CIA met.", mapping=mapping
    )
    assert any("inverse substitution" in v for v in drifted.violations())


def test_anonymized_document_serialization_round_trip():
    mapping = EntityMapping(entries=(org_entry(),), strategy=HideStrategy.generative())
    doc = AnonymizedDocument(
        original="The FBI met.",
        anonymized="The CIA met.",
        mapping=mapping,
        spans=(EntitySpan(4, 7, "FBI", EntityType.ORG),),
    )
    assert AnonymizedDocument.from_dict(doc.to_dict()) == doc


def test_task_type_parse_is_case_insensitive():
    assert TaskType.parse("translate") is TaskType.TRANSLATE
    assert TaskType.parse("TRANSLATE") is TaskType.TRANSLATE
    assert TaskType.parse("Classify") is TaskType.CLASSIFY
    assert TaskType.TRANSLATE.render() == "Translate"
    with pytest.raises(ValueError):
        TaskType.parse("summarize")


def test_seek_result_confidence_bounds():
    SeekResult(text="x", restored=0, matches=(SeekMatch("a", "b", 0.5),))
    with pytest.raises(ValueError):
        SeekResult(text="x", restored=0, matches=(SeekMatch("a", "b", 1.5),))


def test_pipeline_record_round_trip_and_stage_order():
    record = PipelineRecord(
        c="The FBI met.",
        p=(EntitySpan(4, 7, "FBI", EntityType.ORG),),
        e="The <ORG> met.",
        l="Le <ORG> a rencontré.",
        d="Le FBI a rencontré.",
    )
    assert validate_record(record) == []
    assert PipelineRecord.from_dict(record.to_dict()) == record

    out_of_order = PipelineRecord(c="x y", p=(), l="output with no e")
    assert any("without e" in v for v in validate_record(out_of_order))
    d_without_l = PipelineRecord(c="x y", p=(), e="e", d="d")
    assert any("without l" in v for v in validate_record(d_without_l))


def test_validate_record_rejects_foreign_values():
    assert validate_record(42) == ["unsupported value for validation: int"]
