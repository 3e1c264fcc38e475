#!/usr/bin/env python
"""Regenerate the frozen similarity fixture file used by the test suite.

Emits tests/data/simpairs.jsonl: 100 string pairs with the ratio produced
by difflib.SequenceMatcher with the junk heuristic disabled. The fixture
pins hideseek.metrics.similarity to the stdlib matcher independently of
the package implementation, so the file must only ever be regenerated by
this script, never edited by hand.
"""

from __future__ import annotations

import argparse
import difflib
import json
import random
from pathlib import Path

ALPHABETS = (
    "ab",
    "abcde",
    "abcdefghijklmnopqrstuvwxyz",
    "abcdefghijklmnopqrstuvwxyz ",
    "aàâbéèêcçdoôuù",
    "котик пёс",
    "日本語の文字",
    "0123456789.,%$ ",
)

HAND_PICKED = [
    ("abcd", "bcde"),
    ("", ""),
    ("abc", ""),
    ("", "abc"),
    ("abc", "abc"),
    ("a", "a"),
    ("a", "b"),
    ("The FBI met in Washington DC.", "The CIA met in New York City."),
    ("August 10, 2023", "September 15, 2025"),
    ("privacy", "Privacy"),
    ("  spaced  out  ", "spaced out"),
    ("café", "cafe"),
    ("сурогат", "surrogate"),
    ("aaaa", "aa"),
    ("xyxyxyxy", "yxyxyxyx"),
]


def oracle(a: str, b: str) -> float:
    return difflib.SequenceMatcher(None, a, b, autojunk=False).ratio()


def random_pair(rng: random.Random) -> tuple[str, str]:
    alphabet = rng.choice(ALPHABETS)
    n_a = rng.randint(0, 60)
    a = "".join(rng.choice(alphabet) for _ in range(n_a))
    style = rng.random()
    if style < 0.25:
        # Unrelated draw, often near-zero overlap.
        n_b = rng.randint(0, 60)
        b = "".join(rng.choice(alphabet) for _ in range(n_b))
    elif style < 0.5:
        # Point mutations of a.
        chars = list(a)
        for _ in range(rng.randint(0, max(1, len(chars) // 3))):
            if not chars:
                break
            chars[rng.randrange(len(chars))] = rng.choice(alphabet)
        b = "".join(chars)
    elif style < 0.75:
        # Deletion window.
        if len(a) >= 2:
            i = rng.randrange(len(a))
            j = rng.randrange(i, len(a))
            b = a[:i] + a[j:]
        else:
            b = a
    else:
        # Insertion of foreign material.
        i = rng.randrange(len(a) + 1)
        filler = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 12)))
        b = a[:i] + filler + a[i:]
    return a, b


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        default=str(Path(__file__).resolve().parent.parent / "tests" / "data" / "simpairs.jsonl"),
        help="output path (default: tests/data/simpairs.jsonl)",
    )
    parser.add_argument("--seed", type=int, default=20240811)
    parser.add_argument("--count", type=int, default=100)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    pairs: list[tuple[str, str]] = list(HAND_PICKED)
    while len(pairs) < args.count:
        pairs.append(random_pair(rng))
    pairs = pairs[: args.count]

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", encoding="utf-8") as fh:
        for a, b in pairs:
            row = {"a": a, "b": b, "ratio": oracle(a, b)}
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    print(f"wrote {len(pairs)} pairs to {out}")


if __name__ == "__main__":
    main()
