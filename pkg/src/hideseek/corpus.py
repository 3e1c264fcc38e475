"""Synthetic news-like corpus generation for desk-scale evaluation.

Documents are single-line, roughly 1 KB, entity-dense and topic-labeled.
Entity surfaces are drawn from the shipped gazetteers with a Zipf-skewed
rank distribution (so repeated originals give an attacker statistics to
learn), and the numeric/calendar surfaces are generated to match the
recognizer's rule grammar exactly. Generation is a pure function of
(n_docs, seed, target_chars): document i depends only on the seed and i.
"""

from __future__ import annotations

import bisect
import functools
import random
import re
from dataclasses import dataclass

from .recognizer import Gazetteer, builtin_gazetteer_path
from .textutil import stable_hash64
from .types import EntityType

TOPICS = ("business", "culture", "politics", "science", "sports")

_SLOT_RE = re.compile(r"\{([A-Z_]+)\}")

# Per-topic sentence templates. Slot grammar: {TYPE} draws a fresh surface of
# that entity type. Every pair of slots is separated by at least one real
# word, so replacement boundaries never touch; entity-bearing keyword tokens
# (million, act, tons, ...) carry part of the topic signal on purpose.
_TEMPLATES: dict[str, tuple[str, ...]] = {
    "business": (
        "{PERSON} of {ORG} announced on {DATE} that revenue grew {PERCENT} to {MONEY}.",
        "{ORG} shares rose {PERCENT} in {GPE} after investors reviewed profit of {MONEY}.",
        "the company confirmed a deal with {ORG} worth {MONEY} at a meeting in {GPE}.",
        "investors met {PERSON} near {FAC} at {TIME} to review the budget.",
        "{ORG} will ship cargo to {GPE} before {DATE} under a revenue deal of {MONEY}.",
        "market officials in {GPE} said spending reached {MONEY} yesterday.",
        "profit at {ORG} fell {PERCENT} during the quarter ending {DATE}.",
        "shares of {ORG} reached a market record in {GPE} at {TIME}.",
    ),
    "culture": (
        "{PERSON} translated {WORK_OF_ART} into {LANGUAGE} for a festival in {GPE}.",
        "the exhibition at {FAC} opened on {DATE} and tickets cost {MONEY}.",
        "critics in {GPE} praised {WORK_OF_ART} at the premiere at {TIME}.",
        "the {NORP} author spoke about {WORK_OF_ART} on {DATE} in {GPE}.",
        "an orchestra from {GPE} performed {WORK_OF_ART} at {FAC} yesterday.",
        "the gallery near {FAC} reported an audience of students from {GPE}.",
        "a concert at {FAC} started at {TIME} with a novel program in {LANGUAGE}.",
        "the festival jury met {PERSON} near {LOC} on {DATE}.",
    ),
    "politics": (
        "{PERSON} spoke at {FAC} in {GPE} on {DATE} about the {LAW}.",
        "parliament officials from {GPE} met the {NORP} minister at {TIME}.",
        "voters in {GPE} backed the {LAW} by {PERCENT} on {DATE}.",
        "the government of {GPE} opened election talks with {ORG} near {LOC}.",
        "{PERSON} said the campaign fund reached {MONEY} in {GPE}.",
        "the minister defended the {LAW} before parliament on {DATE}.",
        "election monitors from {ORG} visited {GPE} at {TIME}.",
        "government spending on the {LAW} rose {PERCENT} this quarter.",
    ),
    "science": (
        "{PERSON} of {ORG} published a study on {DATE} measuring {QUANTITY} of ice.",
        "researchers found that {LOC} lost {PERCENT} of snow cover since {DATE}.",
        "the laboratory near {LOC} recorded {QUANTITY} of rainfall at {TIME}.",
        "{ORG} launched a satellite from {FAC} in {GPE} at {TIME}.",
        "a research study in {LANGUAGE} reported the experiment cost {MONEY}.",
        "scientists at {ORG} mapped {QUANTITY} of terrain near {LOC}.",
        "the experiment at {FAC} ran until {DATE} and logged {QUANTITY} of samples.",
        "{PERSON} presented research data from {LOC} on {DATE}.",
    ),
    "sports": (
        "{PERSON} led the team to victory at {FAC} in {GPE} on {DATE}.",
        "the match at {FAC} started at {TIME} before a season record crowd.",
        "the {NORP} coach confirmed {PERSON} will play the season opener in {GPE}.",
        "the tournament in {GPE} reported ticket sales of {MONEY} on {DATE}.",
        "officials moved the match from {FAC} after {PERCENT} of workers went on strike.",
        "{PERSON} beat the player from {GPE} in the tournament final at {TIME}.",
        "the team traveled from {GPE} across {LOC} for the season opener.",
        "coach {PERSON} praised the team after a {PERCENT} victory margin on {DATE}.",
    ),
}

# Keyword evidence for the classification mock. Some tokens (million, act,
# tons, stadium, ...) only ever appear inside entity surfaces, so hiding
# entities measurably blunts the classifier: that is the utility budget.
_KEYWORDS: dict[str, tuple[str, ...]] = {
    "business": ("revenue", "profit", "shares", "investors", "budget", "market",
                 "spending", "deal", "million", "billion"),
    "culture": ("festival", "exhibition", "premiere", "orchestra", "gallery",
                "concert", "novel", "author", "audience", "tickets"),
    "politics": ("parliament", "election", "voters", "minister", "government",
                 "campaign", "monitors", "act", "amendment", "treaty"),
    "science": ("study", "research", "researchers", "laboratory", "experiment",
                "scientists", "satellite", "tons", "kilometers", "megawatts"),
    "sports": ("team", "match", "season", "player", "coach", "tournament",
               "victory", "crowd", "strike", "stadium"),
}

_MONTHS = ("January", "February", "March", "April", "May", "June", "July",
           "August", "September", "October", "November", "December")
_UNITS = ("tons", "kilometers", "megawatts", "hectares", "barrels", "liters",
          "acres", "miles")
_AMOUNTS = (12, 5, 25, 8, 40, 3, 75, 18, 150, 7, 60, 275, 9, 480, 33)


@dataclass(frozen=True)
class SynthDoc:
    """One generated document and its topic label."""

    text: str
    label: str

    def to_dict(self) -> dict:
        return {"text": self.text, "label": self.label}

    @classmethod
    def from_dict(cls, d: dict) -> "SynthDoc":
        return cls(text=d["text"], label=d.get("label", ""))


@functools.lru_cache(maxsize=32)
def _zipf_cumulative(n: int, s: float) -> tuple[float, ...]:
    total = 0.0
    out = []
    for rank in range(1, n + 1):
        total += 1.0 / rank**s
        out.append(total)
    return tuple(out)


def zipf_pick(rng: random.Random, items, s: float = 1.2):
    """Rank-skewed choice: items[0] is most likely, tail decays as 1/rank^s."""
    if not items:
        raise ValueError("cannot pick from an empty pool")
    cum = _zipf_cumulative(len(items), s)
    return items[bisect.bisect_left(cum, rng.random() * cum[-1])]


@functools.lru_cache(maxsize=16)
def _pool(etype: EntityType) -> tuple[str, ...]:
    gaz = Gazetteer.load(etype, builtin_gazetteer_path(etype))
    return tuple(sorted(gaz.entries))


def _make_date(rng: random.Random) -> str:
    month = zipf_pick(rng, _MONTHS)
    day = zipf_pick(rng, tuple(range(1, 29)))
    year = zipf_pick(rng, tuple(range(2015, 2031)))
    form = zipf_pick(rng, ("mdy", "dmy", "my", "year", "iso", "slash"), s=0.7)
    if form == "mdy":
        return f"{month} {day}, {year}"
    if form == "dmy":
        return f"{day} {month} {year}"
    if form == "my":
        return f"{month} {year}"
    if form == "year":
        return str(year)
    if form == "iso":
        return f"{year}-{_MONTHS.index(month) + 1:02d}-{day:02d}"
    return f"{_MONTHS.index(month) + 1}/{day}/{year}"


def _make_time(rng: random.Random) -> str:
    form = zipf_pick(rng, ("clock12", "clock24", "hour"), s=0.7)
    if form == "clock12":
        return f"{zipf_pick(rng, tuple(range(1, 13)))}:{rng.randrange(60):02d} {rng.choice(('AM', 'PM'))}"
    if form == "clock24":
        return f"{rng.randrange(24):02d}:{rng.randrange(60):02d}"
    return f"{zipf_pick(rng, tuple(range(1, 13)))} {rng.choice(('AM', 'PM'))}"


def _make_money(rng: random.Random) -> str:
    amount = zipf_pick(rng, _AMOUNTS)
    form = zipf_pick(rng, ("musd", "dec", "eur", "plain", "words"), s=0.7)
    if form == "musd":
        return f"${amount} million"
    if form == "dec":
        return f"${amount}.{rng.randrange(1, 10)} million"
    if form == "eur":
        return f"€{amount} billion"
    if form == "plain":
        return f"${amount},{rng.randrange(100, 1000)}"
    return f"{amount} million dollars"


def _make_percent(rng: random.Random) -> str:
    amount = zipf_pick(rng, _AMOUNTS)
    form = zipf_pick(rng, ("pct", "dec", "word"), s=0.7)
    if form == "pct":
        return f"{amount}%"
    if form == "dec":
        return f"{amount}.{rng.randrange(1, 10)}%"
    return f"{amount} percent"


def _make_quantity(rng: random.Random) -> str:
    return f"{zipf_pick(rng, _AMOUNTS)} {zipf_pick(rng, _UNITS, s=0.9)}"


def _fill_slot(name: str, rng: random.Random) -> str:
    if name == "DATE":
        return _make_date(rng)
    if name == "TIME":
        return _make_time(rng)
    if name == "MONEY":
        return _make_money(rng)
    if name == "PERCENT":
        return _make_percent(rng)
    if name == "QUANTITY":
        return _make_quantity(rng)
    return zipf_pick(rng, _pool(EntityType.parse(name)))


def _render(template: str, rng: random.Random) -> str:
    return _SLOT_RE.sub(lambda m: _fill_slot(m.group(1), rng), template)


def synth_doc(seed: int, index: int, target_chars: int = 1000) -> SynthDoc:
    """Generate document `index` of the corpus for `seed`; prefix-stable in
    the corpus size (growing the corpus never changes earlier documents)."""
    rng = random.Random(stable_hash64("synth-doc", seed, index))
    topic = TOPICS[index % len(TOPICS)]
    templates = _TEMPLATES[topic]
    parts: list[str] = [f"{topic} report."]
    length = len(parts[0])
    while length < target_chars:
        sentence = _render(rng.choice(templates), rng)
        parts.append(sentence)
        length += len(sentence) + 1
    return SynthDoc(text=" ".join(parts), label=topic)


def synth_corpus(n_docs: int, seed: int = 0, target_chars: int = 1000) -> list[SynthDoc]:
    if n_docs < 0:
        raise ValueError("n_docs must be non-negative")
    return [synth_doc(seed, i, target_chars) for i in range(n_docs)]


def default_keyword_table() -> dict[str, tuple[str, ...]]:
    """Topic -> evidence keywords, matched against the metric tokenizer's
    output by the classification mock."""
    return {topic: tuple(words) for topic, words in _KEYWORDS.items()}
