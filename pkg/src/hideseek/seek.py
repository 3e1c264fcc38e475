"""De-anonymization: restore original entities in LLM output.

Generative documents are restored by locating each surrogate with three
passes of decreasing strictness (exact, case-insensitive, fuzzy window) and
replacing the matched segments with the recorded originals. Label documents
are restored by placeholder substitution; in bare mode the k-th <CODE>
occurrence is matched to the k-th span of that type in document order, which
is correct whenever the LLM preserves placeholder order.

Restoration never invents text: every output character comes either from the
LLM output or from a mapping original. Entries whose surrogate cannot be
located are reported in `unresolved`, never guessed.
"""

from __future__ import annotations

from dataclasses import dataclass

from .metrics import similarity
from .textutil import is_word_char, is_token_bounded, iter_token_bounded, stable_lower
from .types import (
    ANY_PLACEHOLDER_RE,
    AnonymizedDocument,
    EntityType,
    SeekMatch,
    SeekResult,
)


@dataclass(frozen=True)
class SeekConfig:
    """Knobs for the generative matching passes.

    fuzzy_threshold is the minimum character-similarity ratio a candidate
    window must reach; window_slack widens the candidate windows by up to
    that many characters on either side of the surrogate length.
    """

    fuzzy_threshold: float = 0.80
    case_insensitive_pass: bool = True
    window_slack: int = 2

    def __post_init__(self) -> None:
        if not (0.0 < self.fuzzy_threshold <= 1.0):
            raise ValueError("fuzzy_threshold must be in (0, 1]")
        if self.window_slack < 0:
            raise ValueError("window_slack must be >= 0")


@dataclass(frozen=True)
class _Claim:
    start: int
    end: int
    replacement: str
    surrogate: str
    confidence: float


def _overlaps(start: int, end: int, claims: list[_Claim]) -> bool:
    return any(start < cl.end and cl.start < end for cl in claims)


def _exact_occurrences(text: str, needle: str, claims: list[_Claim]) -> list[int]:
    return [
        pos
        for pos in iter_token_bounded(text, needle)
        if not _overlaps(pos, pos + len(needle), claims)
    ]


def _fuzzy_window(
    text: str, surrogate: str, cfg: SeekConfig, claims: list[_Claim]
) -> tuple[int, int, float] | None:
    """Best-scoring candidate window, or None below threshold.

    Ties resolve to the leftmost, then shortest, window."""
    target = stable_lower(surrogate)
    lowered = stable_lower(text)
    lengths = [
        length
        for length in range(
            max(1, len(surrogate) - cfg.window_slack), len(surrogate) + cfg.window_slack + 1
        )
        if length <= len(text)
    ]
    best: tuple[float, int, int] | None = None
    for pos in range(len(text)):
        if is_word_char(text[pos]) and pos > 0 and is_word_char(text[pos - 1]):
            continue  # mid-word start can never be a token-bounded replacement
        for length in lengths:
            end = pos + length
            if end > len(text) or _overlaps(pos, end, claims):
                continue
            if not is_token_bounded(text, pos, end):
                continue  # replacing here would split a word at an edge
            ratio = similarity(lowered[pos:end], target)
            if ratio >= cfg.fuzzy_threshold:
                key = (-ratio, pos, length)
                if best is None or key < (-best[0], best[1], best[2]):
                    best = (ratio, pos, length)
    if best is None:
        return None
    return best[1], best[1] + best[2], best[0]


def seek(
    doc: AnonymizedDocument, llm_output: str, cfg: SeekConfig = SeekConfig()
) -> SeekResult:
    """Restore originals in llm_output using the document's mapping.

    Label-based documents delegate to seek_label (placeholders either survive
    verbatim or are gone; fuzzy alignment applies to generative surrogates).
    """
    if doc.mapping.strategy.kind == "label_based":
        return seek_label(doc, llm_output)

    claims: list[_Claim] = []
    unresolved: list[str] = []
    restored = 0
    ordered = sorted(
        enumerate(doc.mapping.entries), key=lambda pair: (-len(pair[1].surrogate), pair[0])
    )
    for _, entry in ordered:
        surrogate = entry.surrogate
        found: list[tuple[int, int, float]] = [
            (pos, pos + len(surrogate), 1.0)
            for pos in _exact_occurrences(llm_output, surrogate, claims)
        ]
        if not found and cfg.case_insensitive_pass:
            lowered_text = stable_lower(llm_output)
            lowered_surrogate = stable_lower(surrogate)
            found = [
                (pos, pos + len(surrogate), 1.0)
                for pos in _exact_occurrences(lowered_text, lowered_surrogate, claims)
            ]
        if not found:
            window = _fuzzy_window(llm_output, surrogate, cfg, claims)
            if window is not None:
                found = [window]
        if not found:
            unresolved.append(surrogate)
            continue
        restored += 1
        for start, end, confidence in found:
            claims.append(_Claim(start, end, entry.original, surrogate, confidence))

    return _apply_claims(llm_output, claims, restored, unresolved)


def _apply_claims(
    text: str, claims: list[_Claim], restored: int, unresolved: list[str]
) -> SeekResult:
    ordered = sorted(claims, key=lambda cl: cl.start)
    parts = []
    cursor = 0
    matches = []
    for cl in ordered:
        parts.append(text[cursor : cl.start])
        parts.append(cl.replacement)
        cursor = cl.end
        matches.append(
            SeekMatch(
                surrogate=cl.surrogate,
                matched_segment=text[cl.start : cl.end],
                confidence=cl.confidence,
            )
        )
    parts.append(text[cursor:])
    return SeekResult(
        text="".join(parts),
        restored=restored,
        unresolved=tuple(unresolved),
        matches=tuple(matches),
    )


def seek_label(doc: AnonymizedDocument, llm_output: str) -> SeekResult:
    """Restore placeholder tokens to originals.

    Indexed placeholders are unambiguous. Bare placeholders are assigned by
    order: the k-th <CODE> occurrence gets the k-th span of that type from
    the source document, so repeated entities restore correctly as long as
    the LLM kept placeholder order. Excess or unknown placeholder tokens are
    reported unresolved and left in place.
    """
    strategy = doc.mapping.strategy
    if strategy.kind != "label_based":
        raise ValueError("seek_label requires a label-based document")

    surrogates = {entry.surrogate for entry in doc.mapping.entries}
    original_of = {entry.original.casefold(): entry.original for entry in doc.mapping.entries}

    claims: list[_Claim] = []
    unresolved: list[str] = []
    matched_surrogates: set[str] = set()

    if strategy.placeholder_mode == "indexed":
        for entry in doc.mapping.entries:
            positions = [
                pos
                for pos in _find_all(llm_output, entry.surrogate)
                if not _overlaps(pos, pos + len(entry.surrogate), claims)
            ]
            if not positions:
                unresolved.append(entry.surrogate)
                continue
            matched_surrogates.add(entry.surrogate)
            for pos in positions:
                claims.append(
                    _Claim(pos, pos + len(entry.surrogate), entry.original, entry.surrogate, 1.0)
                )
        restored = len(matched_surrogates)
    else:
        restored = 0
        for etype in EntityType:
            token = f"<{etype.code}>"
            if token not in surrogates:
                continue
            span_originals = [
                original_of[sp.surface.casefold()]
                for sp in doc.spans
                if sp.etype is etype and sp.surface.casefold() in original_of
            ]
            distinct = len({o.casefold() for o in span_originals})
            confidence = 1.0 if distinct <= 1 else 1.0 / distinct
            positions = [
                pos
                for pos in _find_all(llm_output, token)
                if not _overlaps(pos, pos + len(token), claims)
            ]
            assigned_originals: set[str] = set()
            for k, pos in enumerate(positions):
                if k < len(span_originals):
                    claims.append(
                        _Claim(pos, pos + len(token), span_originals[k], token, confidence)
                    )
                    assigned_originals.add(span_originals[k].casefold())
                else:
                    unresolved.append(token)
            for entry in doc.mapping.entries:
                if entry.etype is etype and entry.surrogate == token:
                    if entry.original.casefold() in assigned_originals:
                        restored += 1
                    else:
                        unresolved.append(entry.surrogate)

    # Placeholder-shaped tokens that belong to no entry: excess indexes,
    # unknown codes, wrong mode. Reported once per occurrence, left in place.
    for m in ANY_PLACEHOLDER_RE.finditer(llm_output):
        if m.group(0) not in surrogates and not _overlaps(m.start(), m.end(), claims):
            unresolved.append(m.group(0))

    return _apply_claims(llm_output, claims, restored, unresolved)


def _find_all(text: str, needle: str) -> list[int]:
    out = []
    pos = text.find(needle)
    while pos != -1:
        out.append(pos)
        pos = text.find(needle, pos + len(needle))
    return out
