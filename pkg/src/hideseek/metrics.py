"""Quantitative instruments for the evaluation harness.

similarity() is a character-level Ratcliff/Obershelp matcher (junk heuristics
disabled) and privacy_score() its complement; prf/bleu/rouge/meteor_exact
cover the classification and translation scoreboards. Everything here is a
pure function.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

Tokens = list[str]


def _longest_match(a: str, b: str, b2j: dict, alo: int, ahi: int, blo: int, bhi: int):
    # Earliest-starting longest block wins, like the reference matcher.
    besti, bestj, bestsize = alo, blo, 0
    j2len: dict[int, int] = {}
    for i in range(alo, ahi):
        newj2len: dict[int, int] = {}
        for j in b2j.get(a[i], ()):
            if j < blo:
                continue
            if j >= bhi:
                break
            k = newj2len[j] = j2len.get(j - 1, 0) + 1
            if k > bestsize:
                besti, bestj, bestsize = i - k + 1, j - k + 1, k
        j2len = newj2len
    return besti, bestj, bestsize


def _matched_chars(a: str, b: str) -> int:
    """Total characters covered by the recursive longest-block decomposition."""
    b2j: dict[str, list[int]] = {}
    for j, ch in enumerate(b):
        b2j.setdefault(ch, []).append(j)
    total = 0
    stack = [(0, len(a), 0, len(b))]
    while stack:
        alo, ahi, blo, bhi = stack.pop()
        i, j, k = _longest_match(a, b, b2j, alo, ahi, blo, bhi)
        if k:
            total += k
            if alo < i and blo < j:
                stack.append((alo, i, blo, j))
            if i + k < ahi and j + k < bhi:
                stack.append((i + k, ahi, j + k, bhi))
    return total


def similarity(a: str, b: str) -> float:
    """Sequence similarity 2M/T over characters, in [0, 1].

    M is the total length of the recursively-found longest matching blocks,
    T the combined length of both strings. Two empty strings score 1.0.
    """
    total = len(a) + len(b)
    if total == 0:
        return 1.0
    return 2.0 * _matched_chars(a, b) / total


def privacy_score(c: str, c_hat: str) -> float:
    """1 - similarity(original, recovered); higher means better protection."""
    return 1.0 - similarity(c, c_hat)


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class PrfReport:
    """Per-class and aggregate precision/recall/F1 for a labeling run."""

    per_class: dict[str, ClassScores]
    macro: ClassScores
    micro: ClassScores
    support: dict[str, int]

    def to_dict(self) -> dict:
        return {
            "per_class": {
                k: {"precision": v.precision, "recall": v.recall, "f1": v.f1}
                for k, v in self.per_class.items()
            },
            "macro": {"P": self.macro.precision, "R": self.macro.recall, "F1": self.macro.f1},
            "micro": {"P": self.micro.precision, "R": self.micro.recall, "F1": self.micro.f1},
            "support": dict(self.support),
        }


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def _f1(p: float, r: float) -> float:
    return _safe_div(2 * p * r, p + r)


def prf(gold: list[str], pred: list[str]) -> PrfReport:
    """One-vs-rest precision/recall/F1 with unweighted macro and pooled micro
    averages. Empty denominators score 0."""
    if len(gold) != len(pred):
        raise ValueError(f"gold and pred lengths differ: {len(gold)} vs {len(pred)}")
    if not gold:
        raise ValueError("cannot score an empty labeling")
    classes = sorted(set(gold) | set(pred))
    tp = Counter()
    fp = Counter()
    fn = Counter()
    for g, p in zip(gold, pred):
        if g == p:
            tp[g] += 1
        else:
            fp[p] += 1
            fn[g] += 1
    per_class = {}
    for cls in classes:
        p = _safe_div(tp[cls], tp[cls] + fp[cls])
        r = _safe_div(tp[cls], tp[cls] + fn[cls])
        per_class[cls] = ClassScores(p, r, _f1(p, r))
    macro = ClassScores(
        sum(s.precision for s in per_class.values()) / len(classes),
        sum(s.recall for s in per_class.values()) / len(classes),
        sum(s.f1 for s in per_class.values()) / len(classes),
    )
    tp_all = sum(tp.values())
    micro_p = _safe_div(tp_all, tp_all + sum(fp.values()))
    micro_r = _safe_div(tp_all, tp_all + sum(fn.values()))
    micro = ClassScores(micro_p, micro_r, _f1(micro_p, micro_r))
    support = {cls: sum(1 for g in gold if g == cls) for cls in classes}
    return PrfReport(per_class=per_class, macro=macro, micro=micro, support=support)


def _ngrams(tokens: Tokens, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: Tokens, reference: Tokens, max_n: int = 4) -> float:
    """Single-reference BLEU: clipped modified n-gram precisions for
    n = 1..max_n, geometric mean, brevity penalty; no smoothing, so any
    zero-precision order zeroes the score."""
    if max_n not in (2, 4):
        raise ValueError(f"max_n must be 2 or 4, got {max_n}")
    if not candidate:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand = _ngrams(candidate, n)
        ref = _ngrams(reference, n)
        clipped = sum(min(count, ref[gram]) for gram, count in cand.items())
        total = sum(cand.values())
        if clipped == 0 or total == 0:
            return 0.0
        log_sum += math.log(clipped / total)
    bp = 1.0 if len(candidate) >= len(reference) else math.exp(1 - len(reference) / len(candidate))
    return bp * math.exp(log_sum / max_n)


def corpus_bleu(candidates: list[Tokens], references: list[Tokens], max_n: int = 4) -> float:
    """Corpus BLEU: numerators and denominators pooled across pairs before the
    geometric mean; brevity penalty from total lengths."""
    if max_n not in (2, 4):
        raise ValueError(f"max_n must be 2 or 4, got {max_n}")
    if len(candidates) != len(references):
        raise ValueError("candidate and reference corpora differ in size")
    clipped = [0] * (max_n + 1)
    totals = [0] * (max_n + 1)
    cand_len = ref_len = 0
    for cand_tokens, ref_tokens in zip(candidates, references):
        cand_len += len(cand_tokens)
        ref_len += len(ref_tokens)
        for n in range(1, max_n + 1):
            cand = _ngrams(cand_tokens, n)
            ref = _ngrams(ref_tokens, n)
            clipped[n] += sum(min(count, ref[gram]) for gram, count in cand.items())
            totals[n] += sum(cand.values())
    if cand_len == 0:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        if clipped[n] == 0 or totals[n] == 0:
            return 0.0
        log_sum += math.log(clipped[n] / totals[n])
    bp = 1.0 if cand_len >= ref_len else math.exp(1 - ref_len / cand_len)
    return bp * math.exp(log_sum / max_n)


def _lcs_len(a: Tokens, b: Tokens) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge(candidate: Tokens, reference: Tokens, variant) -> float:
    """ROUGE F1: n-gram overlap for variants 1 and 2, LCS for variant 'L'."""
    if variant not in (1, 2, "L"):
        raise ValueError(f"rouge variant must be 1, 2 or 'L', got {variant!r}")
    if not candidate and not reference:
        return 1.0
    if not candidate or not reference:
        return 0.0
    if variant == "L":
        lcs = _lcs_len(candidate, reference)
        return _f1(lcs / len(candidate), lcs / len(reference))
    n = variant
    cand = _ngrams(candidate, n)
    ref = _ngrams(reference, n)
    cand_total = sum(cand.values())
    ref_total = sum(ref.values())
    if cand_total == 0 and ref_total == 0:
        return 1.0
    if cand_total == 0 or ref_total == 0:
        return 0.0
    overlap = sum(min(count, ref[gram]) for gram, count in cand.items())
    return _f1(overlap / cand_total, overlap / ref_total)


def _align_exact(candidate: Tokens, reference: Tokens) -> list[tuple[int, int]]:
    """Greedy exact-unigram alignment, preferring to extend the current chunk."""
    used = [False] * len(reference)
    positions: dict[str, list[int]] = {}
    for j, tok in enumerate(reference):
        positions.setdefault(tok, []).append(j)
    pairs = []
    prev_j = -2
    for i, tok in enumerate(candidate):
        slots = positions.get(tok)
        if not slots:
            continue
        choice = None
        nxt = prev_j + 1
        if 0 <= nxt < len(reference) and not used[nxt] and reference[nxt] == tok:
            choice = nxt
        else:
            for j in slots:
                if not used[j]:
                    choice = j
                    break
        if choice is None:
            continue
        used[choice] = True
        pairs.append((i, choice))
        prev_j = choice
    return pairs


def meteor_exact(candidate: Tokens, reference: Tokens) -> float:
    """Exact-match unigram variant: harmonic mean weighted toward recall
    (10PR / (R + 9P)) with a fragmentation penalty 0.5 * (chunks/matches)^3."""
    if not candidate or not reference:
        return 0.0
    pairs = _align_exact(candidate, reference)
    m = len(pairs)
    if m == 0:
        return 0.0
    precision = m / len(candidate)
    recall = m / len(reference)
    f_mean = 10 * precision * recall / (recall + 9 * precision)
    chunks = 0
    prev = (-2, -2)
    for i, j in pairs:
        if not (i == prev[0] + 1 and j == prev[1] + 1):
            chunks += 1
        prev = (i, j)
    penalty = 0.5 * (chunks / m) ** 3
    return f_mean * (1 - penalty)


@dataclass(frozen=True)
class TranslationReport:
    """Corpus-level translation scoreboard; every value lives in [0, 1]."""

    rouge1: float
    rouge2: float
    rougeL: float
    bleu2: float
    bleu4: float
    meteor_exact: float

    def to_dict(self) -> dict:
        return {
            "rouge1": self.rouge1,
            "rouge2": self.rouge2,
            "rougeL": self.rougeL,
            "bleu2": self.bleu2,
            "bleu4": self.bleu4,
            "meteor_exact": self.meteor_exact,
        }


def translation_report(candidates: list[Tokens], references: list[Tokens]) -> TranslationReport:
    """ROUGE/METEOR averaged over pairs, BLEU pooled at corpus level."""
    if len(candidates) != len(references):
        raise ValueError("candidate and reference corpora differ in size")
    if not candidates:
        raise ValueError("cannot score an empty corpus")
    n = len(candidates)
    mean = lambda values: sum(values) / n
    return TranslationReport(
        rouge1=mean([rouge(c, r, 1) for c, r in zip(candidates, references)]),
        rouge2=mean([rouge(c, r, 2) for c, r in zip(candidates, references)]),
        rougeL=mean([rouge(c, r, "L") for c, r in zip(candidates, references)]),
        bleu2=corpus_bleu(candidates, references, 2),
        bleu4=corpus_bleu(candidates, references, 4),
        meteor_exact=mean([meteor_exact(c, r) for c, r in zip(candidates, references)]),
    )
