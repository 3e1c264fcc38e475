"""Small text helpers shared across the pipeline: token-bounded scanning,
offset-stable lowercasing, seed derivation, and the metric tokenizer."""

from __future__ import annotations

import hashlib
import unicodedata


def is_word_char(ch: str) -> bool:
    return ch.isalnum() or ch == "_"


def is_token_bounded(text: str, start: int, end: int) -> bool:
    """True if text[start:end] does not split a word on either side.

    A boundary is violated only when a word character inside the match edge
    touches a word character outside it (same rule as regex ``\\b``, applied
    at both ends).
    """
    if start > 0 and is_word_char(text[start - 1]) and is_word_char(text[start]):
        return False
    if end < len(text) and is_word_char(text[end - 1]) and is_word_char(text[end]):
        return False
    return True


def find_token_bounded(text: str, needle: str, start: int = 0) -> int:
    """Index of the next token-bounded occurrence of needle, or -1."""
    if not needle:
        return -1
    pos = text.find(needle, start)
    while pos != -1:
        if is_token_bounded(text, pos, pos + len(needle)):
            return pos
        pos = text.find(needle, pos + 1)
    return -1


def iter_token_bounded(text: str, needle: str) -> list[int]:
    """Start offsets of all token-bounded occurrences, left to right."""
    out = []
    pos = find_token_bounded(text, needle, 0)
    while pos != -1:
        out.append(pos)
        pos = find_token_bounded(text, needle, pos + len(needle))
    return out


def contains_token_bounded(text: str, needle: str) -> bool:
    return find_token_bounded(text, needle) != -1


def stable_lower(text: str) -> str:
    """Lowercase preserving length, so offsets stay aligned with the input.

    Characters whose lowercase form changes length (e.g. 'İ') are kept as-is.
    """
    out = []
    for ch in text:
        low = ch.lower()
        out.append(low if len(low) == 1 else ch)
    return "".join(out)


def stable_hash64(*parts: str | int) -> int:
    """Deterministic 64-bit hash of the parts, independent of PYTHONHASHSEED."""
    h = hashlib.sha256()
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest()[:8], "big")


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Metric tokenizer: lowercase, split on whitespace, strip edge punctuation."""
    tokens = []
    for raw in text.lower().split():
        start, end = 0, len(raw)
        while start < end and _is_punct(raw[start]):
            start += 1
        while end > start and _is_punct(raw[end - 1]):
            end -= 1
        if start < end:
            tokens.append(raw[start:end])
    return tokens
