"""Training-corpus synthesis and file plumbing.

Two record shapes feed downstream fine-tuning: substitution triples
(c, P(c), s) teaching a model to hide, and alignment quads (e, l, c, r)
teaching a model to seek. Both are emitted as JSONL and, separately, as
rendered prompt/completion text so another implementation can train without
re-deriving the formats. All synthesis is per-document fault-isolated:
a backend failure skips that document and is reported, never raised.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .backends import (
    Backend,
    LlmRequest,
    Message,
    build_prompt_l,
    build_prompt_r,
    build_prompt_s,
    complete,
    prompt_l_instruction,
)
from .corpus import SynthDoc
from .recognizer import RecognizerConfig, dedup_surfaces, recognize
from .textutil import stable_hash64
from .types import TaskType

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class HideTrainRecord:
    """Substitution example: original text, its entity surfaces, and the
    substituted text a hide model should produce."""

    c: str
    p: tuple[str, ...]
    s: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", tuple(self.p))

    def violations(self) -> list[str]:
        report = []
        if not self.p:
            report.append("p is empty: a substitution example needs at least one entity")
        if self.p and self.s == self.c:
            report.append("s equals c although entities were to be substituted")
        return report

    def to_dict(self) -> dict:
        return {"c": self.c, "p": list(self.p), "s": self.s}

    @classmethod
    def from_dict(cls, d: dict) -> "HideTrainRecord":
        return cls(c=d["c"], p=tuple(d["p"]), s=d["s"])


@dataclass(frozen=True)
class SeekTrainRecord:
    """Recovery example: anonymized text, its task output, the original
    text, and the task output with originals restored."""

    e: str
    l: str
    c: str
    r: str
    task: TaskType = TaskType.TRANSLATE

    def violations(self) -> list[str]:
        report = []
        for name in ("e", "l", "c", "r"):
            if not getattr(self, name):
                report.append(f"{name} is empty")
        return report

    def to_dict(self) -> dict:
        return {"e": self.e, "l": self.l, "c": self.c, "r": self.r, "task": self.task.render()}

    @classmethod
    def from_dict(cls, d: dict) -> "SeekTrainRecord":
        return cls(
            e=d["e"], l=d["l"], c=d["c"], r=d["r"],
            task=TaskType.parse(d.get("task", "Translate")),
        )


@dataclass(frozen=True)
class SynthOutcome:
    """Records produced by a synthesis pass plus one reason per skipped doc."""

    records: tuple
    skipped: tuple[str, ...] = ()


def synth_hide_corpus(corpus, backend: Backend, cfg: RecognizerConfig) -> SynthOutcome:
    """One substitution record per document: s comes from the backend's
    answer to the substitution prompt. Documents without recognized entities
    are skipped (nothing to teach), as are documents whose backend call fails.
    """
    records: list[HideTrainRecord] = []
    skipped: list[str] = []
    for i, c in enumerate(corpus):
        surfaces = dedup_surfaces(recognize(c, cfg))
        if not surfaces:
            skipped.append(f"doc {i}: no entities recognized")
            log.warning("hide-corpus synthesis skipped doc %d: no entities", i)
            continue
        try:
            s = complete(backend, LlmRequest.user(build_prompt_s(c, surfaces)))
        except Exception as exc:  # noqa: BLE001 - per-doc fault isolation
            skipped.append(f"doc {i}: backend failure: {exc}")
            log.warning("hide-corpus synthesis skipped doc %d: %s", i, exc)
            continue
        records.append(HideTrainRecord(c=c, p=tuple(surfaces), s=s))
    return SynthOutcome(records=tuple(records), skipped=tuple(skipped))


def synth_seek_corpus(
    pairs,
    backend: Backend,
    task: TaskType = TaskType.TRANSLATE,
    *,
    target_language: str | None = None,
) -> SynthOutcome:
    """One recovery record per (c, e) pair.

    l is the backend's answer for the anonymized text under the task
    instruction; r is its answer to the recovery prompt built from
    (e, l, c). Failures skip the pair.
    """
    if task is TaskType.TRANSLATE and target_language is None:
        target_language = "French"
    instruction = prompt_l_instruction(task, target_language)
    records: list[SeekTrainRecord] = []
    skipped: list[str] = []
    for i, (c, e) in enumerate(pairs):
        try:
            l = complete(
                backend,
                LlmRequest(messages=(Message("system", instruction), Message("user", e))),
            )
            r = complete(backend, LlmRequest.user(build_prompt_r(e, l, c, task)))
        except Exception as exc:  # noqa: BLE001 - per-doc fault isolation
            skipped.append(f"pair {i}: backend failure: {exc}")
            log.warning("seek-corpus synthesis skipped pair %d: %s", i, exc)
            continue
        records.append(SeekTrainRecord(e=e, l=l, c=c, r=r, task=task))
    return SynthOutcome(records=tuple(records), skipped=tuple(skipped))


def render_hide_template(record: HideTrainRecord) -> str:
    """Substitution prompt with the target completion appended after it."""
    return build_prompt_s(record.c, list(record.p)) + " " + record.s


def render_seek_template(record: SeekTrainRecord) -> str:
    """Recovery prompt with the target completion appended after it."""
    return build_prompt_r(record.e, record.l, record.c, record.task) + " " + record.r


def write_templates(path, rendered) -> None:
    """One rendered example per paragraph, separated by a blank line."""
    Path(path).write_text("\n\n".join(rendered) + "\n", encoding="utf-8")


def write_jsonl(path, records) -> None:
    """One JSON object per line; records may be dicts or carry to_dict()."""
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            obj = record.to_dict() if hasattr(record, "to_dict") else record
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def read_jsonl(path) -> list[dict]:
    """Parse one JSON object per line; malformed lines name their number."""
    out: list[dict] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: line {lineno}: invalid JSON: {exc}") from None
            if not isinstance(obj, dict):
                raise ValueError(f"{path}: line {lineno}: expected a JSON object")
            out.append(obj)
    return out


TRAIN_FRACTION = 0.8


def split_bucket(c: str) -> str:
    """Deterministic 80/20 membership, a pure function of the text."""
    return "test" if stable_hash64("corpus-split", c) % 5 == 4 else "train"


def split_records(records, key=lambda record: record.c):
    """Partition records into (train, test) by the stable hash of their text."""
    train, test = [], []
    for record in records:
        (train if split_bucket(key(record)) == "train" else test).append(record)
    return train, test


def write_corpus(path, docs) -> None:
    """Corpus file: JSONL of {"text", "label"} rows."""
    write_jsonl(path, [d.to_dict() for d in docs])


def read_corpus(path) -> list[SynthDoc]:
    """Load an evaluation corpus.

    Two layouts are accepted. `*.jsonl`: one object per line with a required
    "text" field and an optional "label" (classification topics; summary
    corpora typically have none). Anything else: plain UTF-8 text, one
    document per line, blank lines ignored, labels empty.
    """
    p = Path(path)
    if p.suffix == ".jsonl":
        docs = []
        for i, obj in enumerate(read_jsonl(p)):
            if "text" not in obj or not isinstance(obj["text"], str):
                raise ValueError(f"{path}: record {i}: missing string field 'text'")
            docs.append(SynthDoc.from_dict(obj))
        return docs
    lines = p.read_text(encoding="utf-8").splitlines()
    return [SynthDoc(text=line, label="") for line in lines if line.strip()]
