"""Anonymization: turn (c, spans) into an AnonymizedDocument.

Two strategies. Label-based replaces each entity with a type placeholder
(<ORG>, or <ORG_1> in indexed mode). Generative replaces each entity with a
same-type surrogate word drawn deterministically from the policy: gazetteer
rotation for name-like types, magnitude jitter for MONEY/PERCENT/QUANTITY,
calendar shifts for DATE/TIME. All sampling is a pure function of
(c, spans, policy), so identical inputs always anonymize identically.
"""

from __future__ import annotations

import datetime
import functools
import re
from dataclasses import dataclass

from .errors import SurrogatePoolError
from .recognizer import Gazetteer, builtin_gazetteer_path, GAZETTEER_TYPES
from .textutil import contains_token_bounded, stable_hash64
from .types import (
    AnonymizedDocument,
    EntityMapping,
    EntitySpan,
    EntityType,
    HideStrategy,
    MappingEntry,
    PLACEHOLDER_RE,
    render_placeholder,
    span_violations,
)

NUMERIC_TYPES = (EntityType.MONEY, EntityType.PERCENT, EntityType.QUANTITY)
CALENDAR_TYPES = (EntityType.DATE, EntityType.TIME)


def builtin_surrogate_path(etype: EntityType):
    from importlib import resources
    from pathlib import Path

    name = etype.code.lower() + ".txt"
    return Path(str(resources.files("hideseek") / "data" / "surrogates" / name))


@dataclass(frozen=True)
class SurrogatePolicy:
    """Deterministic source of replacement words.

    numeric_jitter is the relative magnitude range for MONEY/PERCENT/QUANTITY
    (0.5 means up to +-50%); date_shift_days bounds the calendar offset for
    DATE (and, scaled to minutes, TIME).
    """

    seed: int = 0
    surrogate_gazetteers: tuple[tuple[EntityType, Gazetteer], ...] = ()
    numeric_jitter: float = 0.5
    date_shift_days: int = 400

    def __post_init__(self) -> None:
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must fit in 64 unsigned bits")
        if not (0 < self.numeric_jitter <= 4.0):
            raise ValueError("numeric_jitter must be in (0, 4]")
        if self.date_shift_days < 1:
            raise ValueError("date_shift_days must be >= 1")

    def gazetteer_for(self, etype: EntityType) -> Gazetteer | None:
        for t, g in self.surrogate_gazetteers:
            if t is etype:
                return g
        return None

    @classmethod
    def default(cls, seed: int = 0) -> "SurrogatePolicy":
        return cls(seed=seed, surrogate_gazetteers=_builtin_surrogate_gazetteers())


@functools.lru_cache(maxsize=1)
def _builtin_surrogate_gazetteers() -> tuple[tuple[EntityType, Gazetteer], ...]:
    pairs = [(t, Gazetteer.load(t, builtin_gazetteer_path(t))) for t in GAZETTEER_TYPES]
    for t in CALENDAR_TYPES:
        pairs.append((t, Gazetteer.load(t, builtin_surrogate_path(t))))
    return tuple(pairs)


def _group_spans(spans: list[EntitySpan]):
    """Casefold-group spans so every occurrence of one surface shares one
    surrogate; the first occurrence's exact surface is the canonical original."""
    order: list[str] = []
    groups: dict[str, dict] = {}
    for sp in sorted(spans, key=lambda s: s.start):
        key = sp.surface.casefold()
        if key not in groups:
            groups[key] = {"original": sp.surface, "etype": sp.etype}
            order.append(key)
    return order, groups


def _substitute(c: str, spans: list[EntitySpan], surrogate_of: dict[str, str]) -> str:
    parts = []
    cursor = 0
    for sp in sorted(spans, key=lambda s: s.start):
        parts.append(c[cursor : sp.start])
        parts.append(surrogate_of[sp.surface.casefold()])
        cursor = sp.end
    parts.append(c[cursor:])
    return "".join(parts)


def hide_label(
    c: str,
    spans: list[EntitySpan],
    mode: str = "bare",
    *,
    prior: EntityMapping | None = None,
) -> AnonymizedDocument:
    """Replace every span with a placeholder of its type.

    bare mode writes "<CODE>"; indexed mode writes "<CODE_k>" with k assigned
    in first-occurrence order among distinct originals of that type. `prior`
    lets a caller thread an existing mapping through several texts of one
    request: originals already mapped keep their placeholder, and indexed
    numbering continues after the prior mapping's highest index per type.
    """
    if mode not in ("bare", "indexed"):
        raise ValueError(f"placeholder mode must be 'bare' or 'indexed', got {mode!r}")
    problems = span_violations(sorted(spans, key=lambda s: s.start), c)
    if problems:
        raise ValueError("; ".join(problems))

    prior_by_original: dict[str, MappingEntry] = {}
    next_index: dict[EntityType, int] = {t: 1 for t in EntityType}
    if prior is not None:
        for entry in prior.entries:
            prior_by_original[entry.original.casefold()] = entry
            m = PLACEHOLDER_RE.fullmatch(entry.surrogate)
            if m is not None and m.group(2) is not None:
                k = int(m.group(2))
                next_index[entry.etype] = max(next_index[entry.etype], k + 1)

    order, groups = _group_spans(spans)
    entries: list[MappingEntry] = []
    surrogate_of: dict[str, str] = {}
    for key in order:
        g = groups[key]
        reused = prior_by_original.get(key)
        if reused is not None:
            entry = reused
        elif mode == "bare":
            entry = MappingEntry(g["original"], render_placeholder(g["etype"]), g["etype"])
        else:
            k = next_index[g["etype"]]
            next_index[g["etype"]] = k + 1
            entry = MappingEntry(g["original"], render_placeholder(g["etype"], k), g["etype"])
        entries.append(entry)
        surrogate_of[key] = entry.surrogate

    anonymized = _substitute(c, spans, surrogate_of)
    mapping = EntityMapping(tuple(entries), HideStrategy.label(mode), seed=0)
    return AnonymizedDocument(
        original=c, anonymized=anonymized, mapping=mapping, spans=tuple(sorted(spans, key=lambda s: s.start))
    )


# ---------------------------------------------------------------- generative

_MONTH_NAMES = (
    "January", "February", "March", "April", "May", "June",
    "July", "August", "September", "October", "November", "December",
)
_MONTH_INDEX = {name: i + 1 for i, name in enumerate(_MONTH_NAMES)}

_DATE_MDY = re.compile(rf"^({'|'.join(_MONTH_NAMES)}) (\d{{1,2}}), (\d{{4}})$")
_DATE_DMY = re.compile(rf"^(\d{{1,2}}) ({'|'.join(_MONTH_NAMES)}) (\d{{4}})$")
_DATE_MY = re.compile(rf"^({'|'.join(_MONTH_NAMES)}) (\d{{4}})$")
_DATE_MD = re.compile(rf"^({'|'.join(_MONTH_NAMES)}) (\d{{1,2}})$")
_DATE_ISO = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")
_DATE_SLASH = re.compile(r"^(\d{1,2})/(\d{1,2})/(\d{4})$")
_DATE_YEAR = re.compile(r"^(19|20)\d{2}$")

_TIME_CLOCK = re.compile(r"^(\d{1,2}):(\d{2})(?::(\d{2}))?( ?)(AM|PM|am|pm)?$")
_TIME_HOUR = re.compile(r"^(\d{1,2})( ?)(AM|PM|am|pm)$")

_NUMBER_RE = re.compile(r"\d[\d,]*(?:\.\d+)?")


def _signed_step(h: int, bound: int) -> int:
    """A nonzero offset in [-bound, bound], derived from the hash."""
    step = 1 + (h % bound)
    return step if (h >> 32) & 1 else -step


def _parse_date(text: str):
    m = _DATE_MDY.match(text)
    if m:
        return "mdy", datetime.date(int(m.group(3)), _MONTH_INDEX[m.group(1)], int(m.group(2)))
    m = _DATE_DMY.match(text)
    if m:
        return "dmy", datetime.date(int(m.group(3)), _MONTH_INDEX[m.group(2)], int(m.group(1)))
    m = _DATE_MY.match(text)
    if m:
        return "my", datetime.date(int(m.group(2)), _MONTH_INDEX[m.group(1)], 15)
    m = _DATE_MD.match(text)
    if m:
        # Dummy non-leap year; the year is dropped again at render time.
        return "md", datetime.date(2001, _MONTH_INDEX[m.group(1)], int(m.group(2)))
    m = _DATE_ISO.match(text)
    if m:
        return "iso", datetime.date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    m = _DATE_SLASH.match(text)
    if m:
        month, day, year = int(m.group(1)), int(m.group(2)), int(m.group(3))
        if 1 <= month <= 12 and 1 <= day <= 28:
            return "slash", datetime.date(year, month, day)
    return None


def _render_date(tag: str, d: datetime.date) -> str:
    if tag == "mdy":
        return f"{_MONTH_NAMES[d.month - 1]} {d.day}, {d.year}"
    if tag == "dmy":
        return f"{d.day} {_MONTH_NAMES[d.month - 1]} {d.year}"
    if tag == "my":
        return f"{_MONTH_NAMES[d.month - 1]} {d.year}"
    if tag == "md":
        return f"{_MONTH_NAMES[d.month - 1]} {d.day}"
    if tag == "iso":
        return f"{d.year:04d}-{d.month:02d}-{d.day:02d}"
    return f"{d.month}/{d.day}/{d.year}"


def _shift_date(original: str, h: int, max_days: int) -> str | None:
    if _DATE_YEAR.match(original):
        year = int(original)
        shifted = year + _signed_step(h, 4)
        if not (1900 <= shifted <= 2099):
            shifted = year - _signed_step(h, 4)
        return str(shifted)
    parsed = _parse_date(original)
    if parsed is None:
        return None
    tag, day = parsed
    delta = datetime.timedelta(days=_signed_step(h, max_days))
    try:
        shifted = day + delta
    except OverflowError:
        return None
    if tag == "md" and shifted.year != day.year:
        try:
            shifted = shifted.replace(year=day.year)
        except ValueError:
            # Feb 29 reached from the dummy non-leap year.
            shifted = shifted.replace(year=day.year, day=28)
    return _render_date(tag, shifted)


def _shift_time(original: str, h: int) -> str | None:
    m = _TIME_CLOCK.match(original)
    if m:
        hour_text, minute_text, second_text, space, meridiem = m.groups()
        hour, minute = int(hour_text), int(minute_text)
        if meridiem:
            if not (1 <= hour <= 12):
                return None
            hour24 = (hour % 12) + (12 if meridiem.lower() == "pm" else 0)
        else:
            if hour > 23:
                return None
            hour24 = hour
        total = (hour24 * 60 + minute + _signed_step(h, 720)) % (24 * 60)
        new_hour24, new_minute = divmod(total, 60)
        if meridiem:
            new_meridiem = "pm" if new_hour24 >= 12 else "am"
            if meridiem.isupper():
                new_meridiem = new_meridiem.upper()
            display = new_hour24 % 12 or 12
            hour_out = f"{display:02d}" if len(hour_text) == 2 else str(display)
            out = f"{hour_out}:{new_minute:02d}"
            if second_text is not None:
                out += f":{second_text}"
            return out + space + new_meridiem
        hour_out = f"{new_hour24:02d}" if len(hour_text) == 2 else str(new_hour24)
        out = f"{hour_out}:{new_minute:02d}"
        if second_text is not None:
            out += f":{second_text}"
        return out
    m = _TIME_HOUR.match(original)
    if m:
        hour_text, space, meridiem = m.groups()
        hour = int(hour_text)
        if not (1 <= hour <= 12):
            return None
        hour24 = (hour % 12) + (12 if meridiem.lower() == "pm" else 0)
        hour24 = (hour24 + _signed_step(h, 11)) % 24
        new_meridiem = "pm" if hour24 >= 12 else "am"
        if meridiem.isupper():
            new_meridiem = new_meridiem.upper()
        return f"{hour24 % 12 or 12}{space}{new_meridiem}"
    return None


def _jitter_number(original: str, h: int, jitter: float) -> str | None:
    m = _NUMBER_RE.search(original)
    if m is None:
        return None
    source = m.group(0)
    commas = "," in source
    plain = source.replace(",", "")
    decimals = len(plain.split(".")[1]) if "." in plain else 0
    value = float(plain)
    unit = (h % 10**9) / 10**9
    factor = 1.0 + jitter * (2.0 * unit - 1.0)
    shifted = value * factor
    if decimals:
        rendered = f"{shifted:,.{decimals}f}" if commas else f"{shifted:.{decimals}f}"
    else:
        rendered = f"{round(shifted):,}" if commas else str(round(shifted))
    if rendered == source:
        return None
    return original[: m.start()] + rendered + original[m.end() :]


def _wide_number(original: str, h: int) -> str | None:
    """Fallback numeric surrogate over a wide scaled window.

    Small values under multiplicative jitter have only a handful of distinct
    renderings ("5%" at +-50% is five integers), and the collision rules can
    block all of them in entity-dense documents. This draw keeps the surface
    format but ranges over [0.3v, 3v + 25), which never runs dry in practice.
    """
    m = _NUMBER_RE.search(original)
    if m is None:
        return None
    source = m.group(0)
    commas = "," in source
    plain = source.replace(",", "")
    decimals = len(plain.split(".")[1]) if "." in plain else 0
    value = float(plain)
    lo = max(1, int(value * 0.3))
    span = int(value * 3) + 25 - lo
    whole = lo + (h % span)
    if decimals:
        frac = (h // span) % (10**decimals)
        shifted = whole + frac / 10**decimals
        rendered = f"{shifted:,.{decimals}f}" if commas else f"{shifted:.{decimals}f}"
    else:
        rendered = f"{whole:,}" if commas else str(whole)
    if rendered == source:
        return None
    return original[: m.start()] + rendered + original[m.end() :]


def _acceptable(candidate: str, c: str, originals_folded: set[str], chosen: list[str]) -> bool:
    """Collision rules for a candidate surrogate, asymmetric by direction.

    A candidate nested anywhere inside an original is rejected outright:
    plain longest-first inverse substitution would clobber that original
    after restoring it. The other direction only matters at a token
    boundary ('1%' inside '21%' splits a number and cannot leak or confuse
    replacement, while 'York' inside 'New York City' is genuine nesting).
    """
    folded = candidate.casefold()
    if folded in originals_folded:
        return False
    for o in originals_folded:
        if folded in o:
            return False
        if contains_token_bounded(folded, o):
            return False
    for other in chosen:
        other_folded = other.casefold()
        if (
            folded == other_folded
            or contains_token_bounded(other_folded, folded)
            or contains_token_bounded(folded, other_folded)
        ):
            return False
    if contains_token_bounded(c, candidate):
        return False
    return True


def _pool_surrogate(
    etype: EntityType,
    pool: list[str],
    h: int,
    c: str,
    originals_folded: set[str],
    chosen: list[str],
) -> str:
    if not pool:
        raise SurrogatePoolError(etype)
    start = h % len(pool)
    for i in range(len(pool)):
        candidate = pool[(start + i) % len(pool)]
        if _acceptable(candidate, c, originals_folded, chosen):
            return candidate
    raise SurrogatePoolError(etype)


def _sample_surrogate(
    original: str,
    etype: EntityType,
    policy: SurrogatePolicy,
    c: str,
    originals_folded: set[str],
    chosen: list[str],
    salt: int,
) -> str:
    def digest(attempt: int) -> int:
        return stable_hash64(policy.seed, c, original, etype.code, salt, attempt)

    if etype in NUMERIC_TYPES:
        for attempt in range(48):
            if attempt < 12:
                candidate = _jitter_number(original, digest(attempt), policy.numeric_jitter)
            else:
                candidate = _wide_number(original, digest(attempt))
            if candidate is not None and _acceptable(candidate, c, originals_folded, chosen):
                return candidate
        raise SurrogatePoolError(etype)

    if etype in CALENDAR_TYPES:
        for attempt in range(24):
            if etype is EntityType.DATE:
                candidate = _shift_date(original, digest(attempt), policy.date_shift_days)
            else:
                candidate = _shift_time(original, digest(attempt))
            if candidate is not None and _acceptable(candidate, c, originals_folded, chosen):
                return candidate
        # Unparseable or persistently colliding: fall back to the fixed list.
        gazetteer = policy.gazetteer_for(etype)
        if gazetteer is not None:
            pool = sorted(gazetteer.entries)
            return _pool_surrogate(etype, pool, digest(99), c, originals_folded, chosen)
        raise SurrogatePoolError(etype)

    gazetteer = policy.gazetteer_for(etype)
    if gazetteer is None:
        raise SurrogatePoolError(etype)
    return _pool_surrogate(etype, sorted(gazetteer.entries), digest(0), c, originals_folded, chosen)


def _normalize_forced(forced) -> dict[str, tuple[str, EntityType | None]]:
    """Accept a plain {original: surrogate} dict, an EntityMapping, or an
    iterable of MappingEntry; return {casefolded original: (surrogate, etype)}."""
    if forced is None:
        return {}
    out: dict[str, tuple[str, EntityType | None]] = {}
    if isinstance(forced, EntityMapping):
        items = [(e.original, e.surrogate, e.etype) for e in forced.entries]
    elif isinstance(forced, dict):
        items = [(orig, surr, None) for orig, surr in forced.items()]
    else:
        items = [(e.original, e.surrogate, e.etype) for e in forced]
    for original, surrogate, etype in items:
        out[original.casefold()] = (surrogate, etype)
    return out


def hide_generative(
    c: str,
    spans: list[EntitySpan],
    policy: SurrogatePolicy,
    forced=None,
) -> AnonymizedDocument:
    """Replace every entity occurrence with a same-type surrogate.

    `forced` pins specific original->surrogate choices (honored verbatim);
    forced keys that match no surface in `spans` are ignored, so an
    accumulated mapping can be threaded through several texts. Forced
    surrogates that collide with the document's originals, repeat each other,
    or contradict a span's type are rejected.
    """
    ordered_spans = sorted(spans, key=lambda s: s.start)
    problems = span_violations(ordered_spans, c)
    if problems:
        raise ValueError("; ".join(problems))

    order, groups = _group_spans(ordered_spans)
    originals_folded = {key for key in order}
    forced_map = _normalize_forced(forced)

    applicable = {k: v for k, v in forced_map.items() if k in groups}
    seen_surrogates: set[str] = set()
    for key, (surrogate, ftype) in applicable.items():
        folded = surrogate.casefold()
        if folded in originals_folded:
            raise ValueError(f"forced surrogate collides with an original: {surrogate!r}")
        if folded in seen_surrogates:
            raise ValueError(f"forced surrogates not distinct: {surrogate!r}")
        seen_surrogates.add(folded)
        if ftype is not None and ftype is not groups[key]["etype"]:
            raise ValueError(
                f"forced entry type {ftype.code} contradicts span type "
                f"{groups[key]['etype'].code} for {groups[key]['original']!r}"
            )

    last_error: Exception | None = None
    for salt in range(8):
        # Reserve every forced surrogate, applicable or not: a threaded
        # mapping's surrogates must stay unique across the whole request.
        chosen: list[str] = [surr for surr, _ in forced_map.values()]
        surrogate_of: dict[str, str] = {}
        entries: list[MappingEntry] = []
        try:
            for key in order:
                g = groups[key]
                if key in applicable:
                    surrogate = applicable[key][0]
                else:
                    surrogate = _sample_surrogate(
                        g["original"], g["etype"], policy, c, originals_folded, chosen, salt
                    )
                    chosen.append(surrogate)
                surrogate_of[key] = surrogate
                entries.append(MappingEntry(g["original"], surrogate, g["etype"]))
        except SurrogatePoolError as exc:
            # A different salt reshuffles every draw; only give up once all
            # salts have run dry.
            last_error = exc
            continue

        anonymized = _substitute(c, ordered_spans, surrogate_of)
        doc = AnonymizedDocument(
            original=c,
            anonymized=anonymized,
            mapping=EntityMapping(tuple(entries), HideStrategy.generative(), seed=policy.seed),
            spans=tuple(ordered_spans),
        )
        report = doc.violations()
        if not report:
            return doc
        last_error = ValueError("; ".join(report))
    raise last_error  # type: ignore[misc]


@dataclass(frozen=True)
class LeakageReport:
    ok: bool
    offending: tuple[str, ...] = ()


def assert_leakage_free(doc: AnonymizedDocument) -> LeakageReport:
    """Scan the anonymized text for any original surface surviving as a
    token-bounded substring (including inside another entry's surrogate)."""
    offending = [
        entry.original
        for entry in doc.mapping.entries
        if contains_token_bounded(doc.anonymized, entry.original)
    ]
    return LeakageReport(ok=not offending, offending=tuple(offending))
