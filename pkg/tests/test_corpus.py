"""Synthetic corpus generator: determinism, document shape, slot grammar
conformance with the recognizer, and the lexicon/surrogate disjointness that
keeps restored translations exact."""

from __future__ import annotations

import random
import re

import pytest

from hideseek.backends import MockClassify, builtin_lexicon_path, load_lexicon, LlmRequest
from hideseek.corpus import (
    TOPICS,
    SynthDoc,
    default_keyword_table,
    synth_corpus,
    synth_doc,
    zipf_pick,
)
from hideseek.hide import SurrogatePolicy
from hideseek.recognizer import RecognizerConfig, recognize
from hideseek.types import EntityType

SLOT_RE = re.compile(r"\{([A-Z_]+)\}")


# ---------------------------------------------------------------------------
# Determinism and corpus shape.
# ---------------------------------------------------------------------------


def test_same_seed_same_corpus():
    a = synth_corpus(8, seed=3)
    b = synth_corpus(8, seed=3)
    assert a == b


def test_different_seeds_differ():
    assert synth_corpus(4, seed=1) != synth_corpus(4, seed=2)


def test_growing_the_corpus_is_prefix_stable():
    assert synth_corpus(12, seed=5)[:5] == synth_corpus(5, seed=5)


def test_labels_cycle_through_topics():
    docs = synth_corpus(10, seed=0)
    assert [d.label for d in docs] == list(TOPICS) * 2
    for d in docs:
        assert d.text.startswith(f"{d.label} report.")


def test_documents_hit_the_target_length():
    for doc in synth_corpus(10, seed=7, target_chars=1000):
        assert 1000 <= len(doc.text) <= 1400
        assert "\n" not in doc.text


def test_target_chars_is_respected_for_small_documents():
    doc = synth_doc(seed=1, index=0, target_chars=200)
    assert 200 <= len(doc.text) <= 500


def test_documents_are_entity_dense():
    cfg = RecognizerConfig.default()
    for doc in synth_corpus(5, seed=9):
        assert len(recognize(doc.text, cfg)) >= 8


def test_synth_doc_dict_round_trip():
    doc = synth_doc(seed=2, index=3)
    assert SynthDoc.from_dict(doc.to_dict()) == doc
    assert SynthDoc.from_dict({"text": "x"}).label == ""


def test_negative_corpus_size_rejected():
    with pytest.raises(ValueError):
        synth_corpus(-1)


# ---------------------------------------------------------------------------
# zipf_pick.
# ---------------------------------------------------------------------------


def test_zipf_pick_skews_toward_early_ranks():
    rng = random.Random(0)
    draws = [zipf_pick(rng, ("a", "b", "c", "d")) for _ in range(4000)]
    counts = {item: draws.count(item) for item in "abcd"}
    assert counts["a"] > counts["b"] > counts["d"]


def test_zipf_pick_empty_pool_raises():
    with pytest.raises(ValueError):
        zipf_pick(random.Random(0), ())


def test_zipf_pick_is_deterministic_under_seed():
    a = [zipf_pick(random.Random(4), tuple("abcdef")) for _ in range(10)]
    b = [zipf_pick(random.Random(4), tuple("abcdef")) for _ in range(10)]
    assert a == b


# ---------------------------------------------------------------------------
# Slot grammar: generated numeric/calendar surfaces parse back as their type.
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("slot,expected", [
    ("DATE", EntityType.DATE),
    ("TIME", EntityType.TIME),
    ("MONEY", EntityType.MONEY),
    ("PERCENT", EntityType.PERCENT),
    ("QUANTITY", EntityType.QUANTITY),
])
def test_generated_surfaces_are_recognized_as_their_type(slot, expected):
    from hideseek.corpus import _fill_slot

    cfg = RecognizerConfig.default()
    rng = random.Random(13)
    for _ in range(40):
        surface = _fill_slot(slot, rng)
        carrier = f"officials reported {surface} according to the summary."
        spans = [s for s in recognize(carrier, cfg) if s.surface == surface]
        assert spans, f"{surface!r} not recognized"
        assert spans[0].etype is expected, f"{surface!r} -> {spans[0].etype}"


def test_template_slots_are_word_separated():
    from hideseek.corpus import _TEMPLATES

    for topic, templates in _TEMPLATES.items():
        for template in templates:
            positions = list(SLOT_RE.finditer(template))
            for left, right in zip(positions, positions[1:]):
                gap = template[left.end() : right.start()]
                assert re.search(r"\w", gap), (topic, template)


def test_keyword_table_covers_every_topic():
    table = default_keyword_table()
    assert set(table) == set(TOPICS)
    assert all(table[t] for t in TOPICS)


def test_topic_labels_are_learnable_from_keywords():
    classifier = MockClassify({t: list(w) for t, w in default_keyword_table().items()})
    docs = synth_corpus(50, seed=21)
    hits = sum(
        classifier.complete(LlmRequest.user(d.text)) == d.label for d in docs
    )
    assert hits / len(docs) >= 0.6


# ---------------------------------------------------------------------------
# The lexicon must not touch any entity or surrogate surface: a shared token
# would let the word-for-word translator rewrite inside an entity and break
# restored-translation exactness.
# ---------------------------------------------------------------------------


def test_lexicon_is_disjoint_from_every_surrogate_pool():
    lexicon = set(load_lexicon(builtin_lexicon_path()))
    offending = []
    for etype, gaz in SurrogatePolicy.default().surrogate_gazetteers:
        for entry in gaz.entries:
            for token in re.findall(r"\w+", entry):
                if token.casefold() in lexicon:
                    offending.append((etype.code, entry, token))
    assert offending == []
