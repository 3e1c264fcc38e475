"""Re-identification attackers and the protection evaluation harness.

The attacker model: an interceptor sees only anonymized text e and tries to
reconstruct the original c. To train, it submits its own documents to the
hide process, records the (c, spans, e) triples it gets back, and builds a
surrogate -> original frequency table per entity type. Protection is then
scored per document as 1 - similarity(c, recovered): higher is better.

Knowledge levels: the black-box attacker knows only its recorded query pairs;
the white-box attacker additionally holds the hide engine's surrogate word
lists, letting it spot surrogates it never observed in training.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .metrics import privacy_score
from .recognizer import Gazetteer
from .textutil import is_token_bounded
from .types import AnonymizedDocument, EntitySpan, EntityType, span_violations

BLACK_BOX = "black_box"
WHITE_BOX = "white_box"

_WORD_RE = re.compile(r"\w+")


@dataclass(frozen=True)
class TrainingPair:
    """One recorded query: original text, its entity spans, anonymized text."""

    c: str
    spans: tuple[EntitySpan, ...]
    e: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "spans", tuple(self.spans))


def pair_from_doc(doc: AnonymizedDocument) -> TrainingPair:
    return TrainingPair(c=doc.original, spans=doc.spans, e=doc.anonymized)


@dataclass(frozen=True)
class InversionTable:
    """Frequency evidence surrogate -> {original: count}, per entity type.

    `total_pairs` counts incorporated documents; `skipped` holds one reason
    per document whose segments could not be aligned. Treat instances as
    immutable: the dicts are owned by the constructor.
    """

    counts: dict[EntityType, dict[str, dict[str, int]]] = field(default_factory=dict)
    total_pairs: int = 0
    skipped: tuple[str, ...] = ()

    def is_empty(self) -> bool:
        return not any(self.counts.values())

    def surrogates(self) -> set[str]:
        out: set[str] = set()
        for per_type in self.counts.values():
            out.update(per_type)
        return out

    def lookup(self, surrogate: str) -> dict[str, int]:
        """Counts for one surrogate string, merged across entity types."""
        merged: dict[str, int] = {}
        for per_type in self.counts.values():
            for original, n in per_type.get(surrogate, {}).items():
                merged[original] = merged.get(original, 0) + n
        return merged

    def argmax(self, surrogate: str) -> str | None:
        """Most frequent original for a surrogate; ties break to the
        lexicographically smallest original."""
        merged = self.lookup(surrogate)
        if not merged:
            return None
        return min(merged, key=lambda original: (-merged[original], original))

    def probabilities(self, etype: EntityType, surrogate: str) -> dict[str, float]:
        observed = self.counts.get(etype, {}).get(surrogate, {})
        total = sum(observed.values())
        if total == 0:
            return {}
        return {original: n / total for original, n in observed.items()}

    def type_argmax(self, etype: EntityType) -> str | None:
        """Most frequent original of a whole type (ties lexicographic)."""
        totals: dict[str, int] = {}
        for per_surrogate in self.counts.get(etype, {}).values():
            for original, n in per_surrogate.items():
                totals[original] = totals.get(original, 0) + n
        if not totals:
            return None
        return min(totals, key=lambda original: (-totals[original], original))


def _align_pair(pair: TrainingPair) -> list[tuple[EntityType, str, str]] | None:
    """Recover (type, original, replacement) triples by walking the text
    segments around the known spans through e.

    Each inter-entity segment of c is located left to right in e; whatever
    sits between two located segments is the replacement for the span there.
    Returns None when a segment cannot be found in order (inconsistent pair).
    Replacements must be non-empty, so gaps are searched from one character
    past the previous match; a gap string that also occurs inside a
    replacement can therefore mis-split pathological pairs, which then fail
    on a later segment and are skipped.
    """
    spans = sorted(pair.spans, key=lambda sp: sp.start)
    if span_violations(spans, pair.c):
        return None
    c, e = pair.c, pair.e
    triples: list[tuple[EntityType, str, str]] = []
    prefix = c[: spans[0].start]
    if not e.startswith(prefix):
        return None
    cursor = len(prefix)
    for i, sp in enumerate(spans):
        gap = c[sp.end : spans[i + 1].start] if i + 1 < len(spans) else c[sp.end :]
        if i + 1 < len(spans):
            idx = e.find(gap, cursor + 1)
            if idx == -1:
                return None
        else:
            # Final segment is anchored to the end of e.
            if not e.endswith(gap) or len(e) - len(gap) <= cursor:
                return None
            idx = len(e) - len(gap)
        triples.append((sp.etype, sp.surface, e[cursor:idx]))
        cursor = idx + len(gap)
    return triples


def train_inversion(pairs) -> InversionTable:
    """Fold recorded (c, spans, e) queries into an inversion table.

    Pairs without spans contribute nothing but still count as incorporated;
    pairs whose e cannot be aligned with c are skipped and reported.
    """
    counts: dict[EntityType, dict[str, dict[str, int]]] = {}
    skipped: list[str] = []
    total = 0
    for i, pair in enumerate(pairs):
        if not pair.spans:
            total += 1
            continue
        triples = _align_pair(pair)
        if triples is None:
            skipped.append(f"pair {i}: e is not derivable from c under segment alignment")
            continue
        total += 1
        for etype, original, replacement in triples:
            per_type = counts.setdefault(etype, {})
            per_surrogate = per_type.setdefault(replacement, {})
            per_surrogate[original] = per_surrogate.get(original, 0) + 1
    return InversionTable(counts=counts, total_pairs=total, skipped=tuple(skipped))


def _claim_recoveries(text: str, index: dict[str, list[tuple[int, str]]], resolve) -> str:
    """Scan once left to right, replacing the longest known surrogate that
    starts (token-bounded) at each word position. `resolve(surrogate)` maps a
    matched surrogate to its replacement, or None to leave it alone."""
    out: list[str] = []
    cursor = 0
    for m in _WORD_RE.finditer(text):
        if m.start() < cursor:
            continue
        candidates = index.get(m.group(0))
        if not candidates:
            continue
        for offset, surrogate in candidates:
            start = m.start() - offset
            if start < cursor or start < 0:
                continue
            end = start + len(surrogate)
            if not text.startswith(surrogate, start):
                continue
            if not is_token_bounded(text, start, end):
                continue
            replacement = resolve(surrogate)
            if replacement is None:
                continue
            out.append(text[cursor:start])
            out.append(replacement)
            cursor = end
            break
    out.append(text[cursor:])
    return "".join(out)


def _word_index(surrogates) -> dict[str, list[tuple[int, str]]]:
    """first word -> [(offset of that word in the surrogate, surrogate)],
    longest surrogate first so greedy claims prefer full surfaces."""
    index: dict[str, list[tuple[int, str]]] = {}
    for s in surrogates:
        m = _WORD_RE.search(s)
        if m is None:
            continue
        index.setdefault(m.group(0), []).append((m.start(), s))
    for bucket in index.values():
        bucket.sort(key=lambda item: (-len(item[1]), item[1]))
    return index


def attack_inversion(table: InversionTable, e: str) -> str:
    """Replace every known surrogate occurrence (token-bounded) with its
    argmax original; everything else passes through unchanged."""
    if table.is_empty():
        return e
    index = _word_index(table.surrogates())
    return _claim_recoveries(e, index, table.argmax)


@dataclass(frozen=True)
class IdentityAttacker:
    """Reads e and guesses e: the no-knowledge baseline every attacker must
    beat, and the upper bound of the privacy score."""

    name: str = "identity"
    knowledge: str = BLACK_BOX

    def recover(self, e: str) -> str:
        return e


@dataclass(frozen=True)
class InversionAttacker:
    """Black-box attacker: knows only the (c, e) pairs it queried."""

    table: InversionTable
    name: str = "inversion"
    knowledge: str = BLACK_BOX

    def recover(self, e: str) -> str:
        return attack_inversion(self.table, e)


@dataclass(frozen=True)
class InformedAttacker:
    """White-box attacker: holds the hide engine's surrogate word lists on
    top of its query table, so it can spot never-observed surrogates and
    replace them with the most frequent original of their type."""

    table: InversionTable
    gazetteers: tuple[Gazetteer, ...] = ()
    name: str = "informed"
    knowledge: str = WHITE_BOX

    def recover(self, e: str) -> str:
        pool_type: dict[str, EntityType] = {}
        for gaz in self.gazetteers:
            for entry in gaz.entries:
                pool_type.setdefault(entry, gaz.etype)
        known = self.table.surrogates()
        index = _word_index(known | set(pool_type))

        def resolve(surrogate: str) -> str | None:
            guess = self.table.argmax(surrogate)
            if guess is not None:
                return guess
            etype = pool_type.get(surrogate)
            if etype is None:
                return None
            return self.table.type_argmax(etype)

        return _claim_recoveries(e, index, resolve)


@dataclass(frozen=True)
class OracleAttacker:
    """Diagnostic upper bound on attack power: holds the true mappings."""

    recoveries: dict[str, str]
    name: str = "oracle"
    knowledge: str = WHITE_BOX

    def recover(self, e: str) -> str:
        return self.recoveries.get(e, e)


HISTOGRAM_BUCKETS = tuple(f"[{i / 10:.1f},{(i + 1) / 10:.1f})" for i in range(9)) + ("[0.9,1.0]",)


@dataclass(frozen=True)
class ProtectionReport:
    """Mean and distribution of per-document privacy scores for one
    (strategy, attacker) cell."""

    strategy: str
    attacker: str
    n_docs: int
    mean_privacy_score: float
    histogram: tuple[int, ...]
    per_doc: tuple[float, ...] = ()
    skipped: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "attacker": self.attacker,
            "n_docs": self.n_docs,
            "mean_privacy_score": self.mean_privacy_score,
            "histogram": dict(zip(HISTOGRAM_BUCKETS, self.histogram)),
            "skipped": list(self.skipped),
        }


def _strategy_name(engine) -> str:
    strat = engine.strategy
    if strat.kind == "label_based":
        return f"label_based/{strat.placeholder_mode}"
    return "generative"


def evaluate_pairs(
    pairs: list[TrainingPair],
    attacker,
    strategy: str,
    *,
    skipped: tuple[str, ...] = (),
    keep_per_doc: bool = True,
) -> ProtectionReport:
    """Score an attacker on already-hidden (c, e) pairs: privacy per document
    is 1 - similarity(original, recovered). Lets a caller hide a corpus once
    and evaluate several attackers against the same anonymized texts."""
    scores = [privacy_score(pair.c, attacker.recover(pair.e)) for pair in pairs]
    histogram = [0] * 10
    for score in scores:
        histogram[min(int(score * 10), 9)] += 1
    mean = sum(scores) / len(scores) if scores else 0.0
    return ProtectionReport(
        strategy=strategy,
        attacker=attacker.name,
        n_docs=len(scores),
        mean_privacy_score=mean,
        histogram=tuple(histogram),
        per_doc=tuple(scores) if keep_per_doc else (),
        skipped=tuple(skipped),
    )


def evaluate_protection(corpus, engine, attacker, *, keep_per_doc: bool = True) -> ProtectionReport:
    """Hide every document, let the attacker recover it, and score
    1 - similarity(original, recovered). Documents the hide engine rejects
    are excluded from the mean and reported in `skipped`."""
    pairs, failures = record_queries(corpus, engine)
    return evaluate_pairs(
        pairs,
        attacker,
        _strategy_name(engine),
        skipped=tuple(failures),
        keep_per_doc=keep_per_doc,
    )


def record_queries(corpus, engine) -> tuple[list[TrainingPair], list[str]]:
    """Play the attacker's training phase: submit every document to the hide
    engine and record the (c, spans, e) triples; failures are reported."""
    pairs: list[TrainingPair] = []
    failures: list[str] = []
    for i, c in enumerate(corpus):
        try:
            doc = engine.hide(c)
        except Exception as exc:  # noqa: BLE001 - per-doc fault isolation
            failures.append(f"doc {i}: {exc}")
            continue
        pairs.append(pair_from_doc(doc))
    return pairs, failures


def train_black_box(corpus, engine) -> InversionAttacker:
    """Convenience: record queries against the engine, train, wrap."""
    pairs, _ = record_queries(corpus, engine)
    return InversionAttacker(table=train_inversion(pairs))


def train_white_box(corpus, engine) -> InformedAttacker:
    """Like train_black_box, plus the engine's surrogate word lists."""
    pairs, _ = record_queries(corpus, engine)
    return InformedAttacker(
        table=train_inversion(pairs),
        gazetteers=tuple(gaz for _, gaz in engine.policy.surrogate_gazetteers),
    )
