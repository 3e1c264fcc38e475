"""Shared domain types for the anonymization pipeline.

These carry no behavior beyond construction, validation and JSON
(de)serialization. All of them are immutable after construction and safe to
share across threads.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .textutil import contains_token_bounded


class EntityType(enum.Enum):
    """The 14 entity categories treated as private."""

    DATE = "DATE"
    MONEY = "MONEY"
    PERCENT = "PERCENT"
    QUANTITY = "QUANTITY"
    TIME = "TIME"
    GPE = "GPE"
    LOC = "LOC"
    PERSON = "PERSON"
    WORK_OF_ART = "WORK_OF_ART"
    ORG = "ORG"
    NORP = "NORP"
    LAW = "LAW"
    FAC = "FAC"
    LANGUAGE = "LANGUAGE"

    @property
    def code(self) -> str:
        return self.value

    @classmethod
    def parse(cls, code: str) -> "EntityType":
        try:
            return cls(code)
        except ValueError:
            raise ValueError(f"unknown entity type code: {code!r}") from None


# Longest codes first so WORK_OF_ART never half-matches as a shorter code.
_CODE_ALTERNATION = "|".join(
    sorted((t.value for t in EntityType), key=len, reverse=True)
)
PLACEHOLDER_RE = re.compile(rf"<({_CODE_ALTERNATION})(?:_([0-9]+))?>")
# Anything shaped like a placeholder, unknown codes included, for malformed-token reporting.
ANY_PLACEHOLDER_RE = re.compile(r"<([A-Z][A-Z_]*)(?:_([0-9]+))?>")


def render_placeholder(etype: EntityType, index: int | None = None) -> str:
    """Placeholder grammar: '<' + code + optional '_' + decimal index + '>'."""
    if index is None:
        return f"<{etype.code}>"
    return f"<{etype.code}_{index}>"


def is_placeholder(token: str) -> bool:
    return PLACEHOLDER_RE.fullmatch(token) is not None


@dataclass(frozen=True)
class EntitySpan:
    """A located privacy entity: character offsets, surface and type.

    Offsets are Unicode code point offsets (start inclusive, end exclusive);
    `surface` must equal the document slice they address. `source` records
    whether the span came from automatic recognition or a manual override.
    """

    start: int
    end: int
    surface: str
    etype: EntityType
    source: str = "auto"

    def __post_init__(self) -> None:
        if self.source not in ("auto", "manual"):
            raise ValueError(f"span source must be 'auto' or 'manual', got {self.source!r}")
        if not (0 <= self.start < self.end):
            raise ValueError(f"bad span offsets [{self.start}, {self.end})")

    def to_dict(self) -> dict:
        return {
            "start": self.start,
            "end": self.end,
            "surface": self.surface,
            "etype": self.etype.code,
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EntitySpan":
        return cls(
            start=d["start"],
            end=d["end"],
            surface=d["surface"],
            etype=EntityType.parse(d["etype"]),
            source=d.get("source", "auto"),
        )


def span_violations(spans: list[EntitySpan], text: str) -> list[str]:
    """Check a span list against its document: offsets in range, surfaces
    matching, sorted by start, pairwise non-overlapping."""
    report = []
    for sp in spans:
        if sp.end > len(text):
            report.append(f"span [{sp.start},{sp.end}) exceeds document length {len(text)}")
        elif text[sp.start : sp.end] != sp.surface:
            report.append(
                f"span surface {sp.surface!r} differs from document slice "
                f"{text[sp.start:sp.end]!r} at [{sp.start},{sp.end})"
            )
    for prev, cur in zip(spans, spans[1:]):
        if cur.start < prev.start:
            report.append(f"spans not sorted by start: {prev.start} then {cur.start}")
        elif cur.start < prev.end:
            report.append(
                f"spans overlap: [{prev.start},{prev.end}) and [{cur.start},{cur.end})"
            )
    return report


@dataclass(frozen=True)
class HideStrategy:
    """Which anonymization scheme is in effect.

    kind is 'label_based' (placeholders like <ORG>) or 'generative'
    (same-type surrogate words). placeholder_mode ('bare' or 'indexed') is
    present exactly when kind is label_based.
    """

    kind: str
    placeholder_mode: str | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("label_based", "generative"):
            raise ValueError(f"unknown strategy kind: {self.kind!r}")
        if self.kind == "label_based":
            if self.placeholder_mode not in ("bare", "indexed"):
                raise ValueError("label_based strategy requires placeholder_mode 'bare' or 'indexed'")
        elif self.placeholder_mode is not None:
            raise ValueError("placeholder_mode is only valid for label_based strategy")

    @classmethod
    def label(cls, mode: str = "bare") -> "HideStrategy":
        return cls(kind="label_based", placeholder_mode=mode)

    @classmethod
    def generative(cls) -> "HideStrategy":
        return cls(kind="generative")

    def to_dict(self) -> dict:
        d = {"kind": self.kind}
        if self.placeholder_mode is not None:
            d["placeholder_mode"] = self.placeholder_mode
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "HideStrategy":
        return cls(kind=d["kind"], placeholder_mode=d.get("placeholder_mode"))


@dataclass(frozen=True)
class MappingEntry:
    original: str
    surrogate: str
    etype: EntityType

    def to_dict(self) -> dict:
        return {"original": self.original, "surrogate": self.surrogate, "etype": self.etype.code}

    @classmethod
    def from_dict(cls, d: dict) -> "MappingEntry":
        return cls(d["original"], d["surrogate"], EntityType.parse(d["etype"]))


@dataclass(frozen=True)
class EntityMapping:
    """The collision-free original<->surrogate table recorded at hide time.

    This is the per-request secret: it never leaves the device and is the
    only thing that makes deterministic de-anonymization possible.
    """

    entries: tuple[MappingEntry, ...]
    strategy: HideStrategy
    seed: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in 64 unsigned bits")
        object.__setattr__(self, "entries", tuple(self.entries))

    def originals(self) -> list[str]:
        return [e.original for e in self.entries]

    def surrogates(self) -> list[str]:
        return [e.surrogate for e in self.entries]

    def violations(self) -> list[str]:
        report = []
        folded = [e.original.casefold() for e in self.entries]
        if len(set(folded)) != len(folded):
            dupes = sorted({f for f in folded if folded.count(f) > 1})
            report.append(f"originals not distinct after case-normalization: {dupes}")
        # Bare placeholders legitimately repeat (two ORGs both become <ORG>);
        # every other configuration requires pairwise-distinct surrogates.
        bare = self.strategy.kind == "label_based" and self.strategy.placeholder_mode == "bare"
        if not bare:
            surr = self.surrogates()
            if len(set(surr)) != len(surr):
                dupes = sorted({s for s in surr if surr.count(s) > 1})
                report.append(f"surrogates not pairwise distinct: {dupes}")
        originals_folded = {e.original.casefold() for e in self.entries}
        for e in self.entries:
            if e.surrogate.casefold() in originals_folded:
                report.append(f"surrogate collides with an original: {e.surrogate!r}")
        if self.strategy.kind == "label_based":
            for e in self.entries:
                m = PLACEHOLDER_RE.fullmatch(e.surrogate)
                if m is None or EntityType.parse(m.group(1)) is not e.etype:
                    report.append(f"label surrogate is not a placeholder of its type: {e.surrogate!r}")
        return report

    def to_dict(self) -> dict:
        return {
            "entries": [e.to_dict() for e in self.entries],
            "strategy": self.strategy.to_dict(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EntityMapping":
        return cls(
            entries=tuple(MappingEntry.from_dict(e) for e in d["entries"]),
            strategy=HideStrategy.from_dict(d["strategy"]),
            seed=d.get("seed", 0),
        )


@dataclass(frozen=True)
class AnonymizedDocument:
    """A document after hiding: the original text, the anonymized text the
    cloud sees, the mapping that reverses it, and the spans it came from."""

    original: str
    anonymized: str
    mapping: EntityMapping
    spans: tuple[EntitySpan, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "spans", tuple(self.spans))

    def violations(self) -> list[str]:
        report = self.mapping.violations()
        report.extend(span_violations(list(self.spans), self.original))
        if self.mapping.strategy.kind == "generative":
            restored = self.anonymized
            for entry in sorted(self.mapping.entries, key=lambda e: len(e.surrogate), reverse=True):
                restored = restored.replace(entry.surrogate, entry.original)
            if restored != self.original:
                report.append("inverse substitution does not reproduce the original text")
        for entry in self.mapping.entries:
            if contains_token_bounded(self.anonymized, entry.original):
                report.append(f"anonymized text leaks original surface: {entry.original!r}")
        return report

    def to_dict(self) -> dict:
        return {
            "original": self.original,
            "anonymized": self.anonymized,
            "mapping": self.mapping.to_dict(),
            "spans": [sp.to_dict() for sp in self.spans],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AnonymizedDocument":
        return cls(
            original=d["original"],
            anonymized=d["anonymized"],
            mapping=EntityMapping.from_dict(d["mapping"]),
            spans=tuple(EntitySpan.from_dict(sp) for sp in d.get("spans", [])),
        )


class TaskType(enum.Enum):
    TRANSLATE = "Translate"
    ABSTRACT = "Abstract"
    POLISH = "Polish"
    CLASSIFY = "Classify"

    def render(self) -> str:
        return self.value

    @classmethod
    def parse(cls, text: str) -> "TaskType":
        for t in cls:
            if t.value.lower() == text.lower():
                return t
        raise ValueError(f"unknown task type: {text!r}")


@dataclass(frozen=True)
class SeekMatch:
    surrogate: str
    matched_segment: str
    confidence: float

    def to_dict(self) -> dict:
        return {
            "surrogate": self.surrogate,
            "matched_segment": self.matched_segment,
            "confidence": self.confidence,
        }


@dataclass(frozen=True)
class SeekResult:
    """Outcome of de-anonymization: restored text plus per-entity accounting.

    `restored` counts mapping entries whose surrogate was located and
    replaced; each entry not located contributes one token to `unresolved`.
    Placeholder tokens in the LLM output that correspond to no entry (excess
    or malformed) are appended to `unresolved` as well, so
    restored + unresolved may exceed the entry count only in that case.
    """

    text: str
    restored: int
    unresolved: tuple[str, ...] = ()
    matches: tuple[SeekMatch, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "unresolved", tuple(self.unresolved))
        object.__setattr__(self, "matches", tuple(self.matches))
        for m in self.matches:
            if not (0.0 <= m.confidence <= 1.0):
                raise ValueError(f"confidence out of [0,1]: {m.confidence}")

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "restored": self.restored,
            "unresolved": list(self.unresolved),
            "matches": [m.to_dict() for m in self.matches],
        }


@dataclass(frozen=True)
class PipelineRecord:
    """One corpus row carrying every pipeline stage of a document.

    c: original text         p: recognized entity spans
    s: substituted text      e: anonymized text
    l: LLM output for e      r: de-anonymized LLM answer
    d: locally de-anonymized result
    Stages are populated monotonically; c and p are always present.
    """

    c: str
    p: tuple[EntitySpan, ...]
    task: TaskType = TaskType.TRANSLATE
    s: str | None = None
    e: str | None = None
    l: str | None = None
    r: str | None = None
    d: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", tuple(self.p))

    def to_dict(self) -> dict:
        d = {"c": self.c, "p": [sp.to_dict() for sp in self.p], "task": self.task.render()}
        for name in ("s", "e", "l", "r", "d"):
            value = getattr(self, name)
            if value is not None:
                d[name] = value
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineRecord":
        return cls(
            c=d["c"],
            p=tuple(EntitySpan.from_dict(sp) for sp in d["p"]),
            task=TaskType.parse(d.get("task", "Translate")),
            s=d.get("s"),
            e=d.get("e"),
            l=d.get("l"),
            r=d.get("r"),
            d=d.get("d"),
        )


def validate_record(value) -> list[str]:
    """Report violated invariants for a domain value; empty report means valid.

    Accepts a PipelineRecord, an AnonymizedDocument or an EntityMapping.
    Violations are reported, never raised.
    """
    if isinstance(value, PipelineRecord):
        report = span_violations(list(value.p), value.c)
        # l and r depend on e being present; d depends on l.
        if (value.l is not None or value.r is not None) and value.e is None:
            report.append("record has l/r without e (stages must fill in pipeline order)")
        if value.d is not None and value.l is None:
            report.append("record has d without l (stages must fill in pipeline order)")
        return report
    if isinstance(value, AnonymizedDocument):
        return value.violations()
    if isinstance(value, EntityMapping):
        return value.violations()
    return [f"unsupported value for validation: {type(value).__name__}"]
