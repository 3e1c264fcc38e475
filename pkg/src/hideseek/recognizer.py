"""Rule- and gazetteer-based privacy entity extraction.

Numeric-ish types (DATE, TIME, MONEY, PERCENT, QUANTITY) come from a regex
rule table; the nine name-like types come from gazetteer word lists shipped
with the package and extensible through configuration. Matching is
token-boundary anchored and recognition is a pure function of (text, config).
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError, OverlappingSpansError
from .textutil import is_token_bounded
from .types import EntitySpan, EntityType, span_violations

_MONTHS = (
    "January|February|March|April|May|June|July|August|September|October|November|December"
)
_CURRENCY_WORDS = r"dollars?|euros?|pounds?|yen|cents?|USD|EUR|GBP"
_UNIT_WORDS = (
    r"kilometers?|kilometres?|km|miles?|meters?|metres?|kilograms?|kg|grams?|"
    r"pounds|lbs|tons?|tonnes?|liters?|litres?|gallons?|barrels?|acres?|hectares?|"
    r"feet|foot|ft|inches|inch|yards?|mph|megawatts?|MW|kilowatts?|kWh|gigabytes?|"
    r"terabytes?|GB|TB|degrees"
)

# Order within a type does not matter; overlaps anywhere are resolved by the
# longest-match discipline below.
_BUILTIN_RULES: list[tuple[EntityType, str]] = [
    (EntityType.DATE, rf"(?:{_MONTHS})\s+\d{{1,2}},\s+\d{{4}}"),
    (EntityType.DATE, rf"(?:{_MONTHS})\s+\d{{1,2}}(?!\d)"),
    (EntityType.DATE, rf"\d{{1,2}}\s+(?:{_MONTHS})\s+\d{{4}}"),
    (EntityType.DATE, rf"(?:{_MONTHS})\s+\d{{4}}"),
    (EntityType.DATE, r"\d{4}-\d{2}-\d{2}"),
    (EntityType.DATE, r"\d{1,2}/\d{1,2}/\d{4}"),
    (EntityType.DATE, r"(?:19|20)\d{2}"),
    (EntityType.TIME, r"\d{1,2}:\d{2}(?::\d{2})?(?:\s?(?:AM|PM|am|pm))?"),
    (EntityType.TIME, r"\d{1,2}\s?(?:AM|PM|am|pm)"),
    (EntityType.MONEY, r"[$€£¥]\s?\d[\d,]*(?:\.\d+)?(?:\s(?:thousand|million|billion|trillion))?"),
    (EntityType.MONEY, rf"\d[\d,]*(?:\.\d+)?(?:\s(?:thousand|million|billion|trillion))?\s(?:{_CURRENCY_WORDS})(?![a-z])"),
    (EntityType.PERCENT, r"\d[\d,]*(?:\.\d+)?\s?(?:%|percent|per cent)"),
    (EntityType.QUANTITY, rf"\d[\d,]*(?:\.\d+)?\s?(?:{_UNIT_WORDS})(?![a-z])"),
]

GAZETTEER_TYPES = (
    EntityType.PERSON,
    EntityType.ORG,
    EntityType.GPE,
    EntityType.LOC,
    EntityType.NORP,
    EntityType.FAC,
    EntityType.LAW,
    EntityType.LANGUAGE,
    EntityType.WORK_OF_ART,
)

# Same-range ties across types resolve to the earlier enum member, so the
# outcome never depends on rule or gazetteer iteration order.
_TYPE_PRIORITY = {t: i for i, t in enumerate(EntityType)}


@dataclass(frozen=True)
class Gazetteer:
    """One entity type's word list; multi-word entries allowed."""

    etype: EntityType
    entries: frozenset[str]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ConfigError(f"gazetteer for {self.etype.code} is empty")
        for entry in self.entries:
            if not entry.strip():
                raise ConfigError(f"gazetteer for {self.etype.code} has a whitespace-only entry")

    @classmethod
    def load(cls, etype: EntityType, path: str | Path) -> "Gazetteer":
        """Read a UTF-8 word list, one entry per line, '#' starting a comment line."""
        entries = set()
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                entries.add(line)
        return cls(etype=etype, entries=frozenset(entries))


def builtin_gazetteer_path(etype: EntityType) -> Path:
    name = etype.code.lower() + ".txt"
    return Path(str(resources.files("hideseek") / "data" / "gazetteers" / name))


@dataclass(frozen=True)
class RecognizerConfig:
    enabled_types: frozenset[EntityType]
    gazetteer_paths: tuple[tuple[EntityType, str], ...] = ()
    custom_patterns: tuple[tuple[EntityType, str], ...] = ()

    def __post_init__(self) -> None:
        for etype, _ in self.gazetteer_paths:
            if etype not in self.enabled_types:
                raise ConfigError(f"gazetteer configured for disabled type {etype.code}")
        for etype, pattern in self.custom_patterns:
            try:
                re.compile(pattern)
            except re.error as exc:
                raise ConfigError(f"pattern for {etype.code} does not compile: {exc}") from exc

    @classmethod
    def default(cls) -> "RecognizerConfig":
        """All 14 types enabled, rule table plus the shipped gazetteers."""
        return cls(
            enabled_types=frozenset(EntityType),
            gazetteer_paths=tuple(
                (t, str(builtin_gazetteer_path(t))) for t in GAZETTEER_TYPES
            ),
        )

    @classmethod
    def from_dict(cls, raw: dict) -> "RecognizerConfig":
        enabled = frozenset(
            EntityType.parse(code) for code in raw.get("enabled_types", [t.code for t in EntityType])
        )
        gaz = raw.get("gazetteers", "builtin")
        if gaz == "builtin":
            paths = tuple(
                (t, str(builtin_gazetteer_path(t))) for t in GAZETTEER_TYPES if t in enabled
            )
        else:
            paths = tuple((EntityType.parse(code), str(p)) for code, p in dict(gaz).items())
        patterns = tuple(
            (EntityType.parse(p["etype"]), p["pattern"]) for p in raw.get("patterns", [])
        )
        return cls(enabled_types=enabled, gazetteer_paths=paths, custom_patterns=patterns)


class Recognizer:
    """Compiled form of a RecognizerConfig; immutable after construction."""

    def __init__(self, cfg: RecognizerConfig):
        self.cfg = cfg
        self._rules: list[tuple[EntityType, re.Pattern]] = []
        for etype, pattern in _BUILTIN_RULES:
            if etype in cfg.enabled_types:
                self._rules.append((etype, re.compile(pattern)))
        for etype, pattern in cfg.custom_patterns:
            if etype in cfg.enabled_types:
                try:
                    self._rules.append((etype, re.compile(pattern)))
                except re.error as exc:
                    raise ConfigError(f"pattern for {etype.code} does not compile: {exc}") from exc
        self.gazetteers: dict[EntityType, Gazetteer] = {}
        self._gazetteer_res: list[tuple[EntityType, re.Pattern]] = []
        for etype, path in cfg.gazetteer_paths:
            gazetteer = Gazetteer.load(etype, path)
            self.gazetteers[etype] = gazetteer
            # Longest alternative first: the regex engine takes the first
            # alternative that matches at a position.
            ordered = sorted(gazetteer.entries, key=len, reverse=True)
            alternation = "|".join(re.escape(e) for e in ordered)
            self._gazetteer_res.append((etype, re.compile(alternation)))

    def recognize(self, text: str) -> list[EntitySpan]:
        if not text:
            return []
        candidates: list[tuple[int, int, EntityType]] = []
        for etype, compiled in self._rules + self._gazetteer_res:
            for m in compiled.finditer(text):
                if m.start() < m.end() and is_token_bounded(text, m.start(), m.end()):
                    candidates.append((m.start(), m.end(), etype))
        chosen = _resolve_overlaps(candidates)
        return [
            EntitySpan(start=s, end=e, surface=text[s:e], etype=t, source="auto")
            for s, e, t in chosen
        ]


def _resolve_overlaps(candidates: list[tuple[int, int, EntityType]]):
    """Greedy longest-match selection: longer wins, ties to the smaller start,
    then to the higher-priority type."""
    ordered = sorted(
        set(candidates),
        key=lambda c: (-(c[1] - c[0]), c[0], _TYPE_PRIORITY[c[2]]),
    )
    chosen: list[tuple[int, int, EntityType]] = []
    for start, end, etype in ordered:
        if all(end <= s or start >= e for s, e, _ in chosen):
            chosen.append((start, end, etype))
    chosen.sort(key=lambda c: c[0])
    return chosen


@functools.lru_cache(maxsize=16)
def _compiled(cfg: RecognizerConfig) -> Recognizer:
    return Recognizer(cfg)


def recognize(text: str, cfg: RecognizerConfig) -> list[EntitySpan]:
    """Extract privacy entity spans; deterministic for a fixed (text, cfg)."""
    return _compiled(cfg).recognize(text)


def merge_spans(auto: list[EntitySpan], manual: list[EntitySpan]) -> list[EntitySpan]:
    """Union of automatic and manual spans. Manual always wins a conflict;
    among auto overlaps the longest span wins, ties to the smaller start.
    Overlapping manual spans are a caller error."""
    manual_sorted = sorted(manual, key=lambda sp: sp.start)
    for prev, cur in zip(manual_sorted, manual_sorted[1:]):
        if cur.start < prev.end:
            raise OverlappingSpansError(prev, cur)
    chosen = list(manual_sorted)
    for sp in sorted(auto, key=lambda sp: (-(sp.end - sp.start), sp.start)):
        if all(sp.end <= other.start or sp.start >= other.end for other in chosen):
            chosen.append(sp)
    chosen.sort(key=lambda sp: sp.start)
    return chosen


def dedup_surfaces(spans: list[EntitySpan]) -> list[str]:
    """Unique span surfaces in first-occurrence order (case-sensitive)."""
    seen = set()
    out = []
    for sp in spans:
        if sp.surface not in seen:
            seen.add(sp.surface)
            out.append(sp.surface)
    return out


def check_spans(spans: list[EntitySpan], text: str) -> None:
    problems = span_violations(spans, text)
    if problems:
        raise ValueError("; ".join(problems))
