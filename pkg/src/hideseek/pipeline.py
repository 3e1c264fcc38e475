"""End-to-end wiring: recognize -> hide -> prompt -> backend -> seek.

HideEngine bundles a recognizer configuration with one hiding strategy so the
evaluation harness, the dataset synthesizer, the gateway and the CLI all
anonymize text identically. run_pipeline drives a single document through the
whole loop and returns every intermediate stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .backends import (
    Backend,
    LlmRequest,
    Message,
    complete,
    prompt_l_instruction,
)
from .errors import BackendError
from .hide import SurrogatePolicy, hide_generative, hide_label
from .recognizer import RecognizerConfig, merge_spans, recognize
from .seek import SeekConfig, seek
from .types import (
    AnonymizedDocument,
    EntityMapping,
    EntitySpan,
    HideStrategy,
    MappingEntry,
    PipelineRecord,
    SeekResult,
    TaskType,
)


@dataclass(frozen=True)
class HideEngine:
    """One configured way of turning plain text into anonymized text."""

    recognizer: RecognizerConfig = field(default_factory=RecognizerConfig.default)
    strategy: HideStrategy = field(default_factory=HideStrategy.label)
    policy: SurrogatePolicy = field(default_factory=SurrogatePolicy.default)

    @classmethod
    def build(
        cls,
        strategy: str = "label",
        *,
        label_mode: str = "bare",
        seed: int = 0,
        recognizer: RecognizerConfig | None = None,
        policy: SurrogatePolicy | None = None,
    ) -> "HideEngine":
        """Construct from the CLI-level vocabulary ('label'/'generative')."""
        if strategy == "label":
            strat = HideStrategy.label(label_mode)
        elif strategy == "generative":
            strat = HideStrategy.generative()
        else:
            raise ValueError(f"unknown strategy: {strategy!r} (expected 'label' or 'generative')")
        return cls(
            recognizer=recognizer if recognizer is not None else RecognizerConfig.default(),
            strategy=strat,
            policy=policy if policy is not None else SurrogatePolicy.default(seed=seed),
        )

    def recognize(self, text: str) -> list[EntitySpan]:
        return recognize(text, self.recognizer)

    def hide(
        self,
        text: str,
        spans: list[EntitySpan] | None = None,
        *,
        manual: list[EntitySpan] = (),
        prior: EntityMapping | None = None,
        forced=None,
    ) -> AnonymizedDocument:
        """Anonymize one text; spans default to a fresh recognize() pass.

        `prior` (label) and `forced` (generative) thread an accumulated
        mapping through several texts of one request, keeping repeated
        entities consistent across them.
        """
        base = self.recognize(text) if spans is None else list(spans)
        merged = merge_spans(base, list(manual)) if manual else base
        if self.strategy.kind == "label_based":
            return hide_label(text, merged, self.strategy.placeholder_mode, prior=prior)
        return hide_generative(text, merged, self.policy, forced=forced)


@dataclass(frozen=True)
class PipelineRun:
    """Everything produced by one inference pass over a document."""

    record: PipelineRecord
    doc: AnonymizedDocument
    seek_result: SeekResult


def run_pipeline(
    c: str,
    engine: HideEngine,
    backend: Backend,
    task: TaskType = TaskType.TRANSLATE,
    *,
    target_language: str | None = None,
    manual: list[EntitySpan] = (),
    span_filter=None,
    seek_cfg: SeekConfig = SeekConfig(),
) -> PipelineRun:
    """recognize -> hide -> instruct the backend on the anonymized text ->
    seek the reply. `span_filter(c, spans) -> spans` is the interactive-review
    hook; it sees the merged span list before hiding.
    """
    spans = engine.recognize(c)
    if manual:
        spans = merge_spans(spans, list(manual))
    if span_filter is not None:
        spans = span_filter(c, spans)
    doc = engine.hide(c, spans=spans)
    if task is TaskType.TRANSLATE and target_language is None:
        target_language = "French"
    instruction = prompt_l_instruction(task, target_language)
    req = LlmRequest(
        messages=(Message("system", instruction), Message("user", doc.anonymized))
    )
    l = complete(backend, req)
    result = seek(doc, l, seek_cfg)
    record = PipelineRecord(
        c=c,
        p=tuple(doc.spans),
        task=task,
        e=doc.anonymized,
        l=l,
        d=result.text,
    )
    return PipelineRun(record=record, doc=doc, seek_result=result)


@dataclass(frozen=True)
class MockSubstitute:
    """Offline stand-in for a substitution model.

    It parses the substitution prompt ("Text: ... Given words: ..."), pulls
    the original text back out and re-anonymizes it locally with its engine,
    so corpus synthesis runs without any network and the emitted substituted
    texts are leakage-free by construction.
    """

    engine: HideEngine
    name: str = "substitute"

    def complete(self, req: LlmRequest) -> str:
        prompt = req.last_user_content()
        start = prompt.find("Text: ")
        stop = prompt.rfind("\nGiven words: ")
        if start == -1 or stop == -1 or stop <= start:
            raise BackendError("substitution prompt lacks Text/Given words sections")
        c = prompt[start + len("Text: ") : stop]
        return self.engine.hide(c).anonymized
