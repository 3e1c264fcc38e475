"""Shared fixtures: canonical sample texts, a capturing backend, corpora."""

from __future__ import annotations

from dataclasses import dataclass, field

import pytest

from hideseek.backends import LlmRequest, MockEcho
from hideseek.corpus import synth_corpus
from hideseek.pipeline import HideEngine
from hideseek.recognizer import RecognizerConfig
from hideseek.types import EntitySpan, EntityType

# One running example used throughout the suite: a short incident report
# dense in entity types (ORG, DATE, GPE) plus a parenthetical long form
# that only a manual span can cover.
INCIDENT = (
    "The FBI (Federal Bureau of Investigation) is currently investigating "
    "a cyber attack on a major corporation that occurred on August 10, 2023. "
    "The breach took place in the company's headquarters located in "
    "Washington DC. The FBI suspects that the attack was carried out by a "
    "foreign government."
)

# Same report with the punctuated city spelling, which the recognizer
# splits into two tokens; used by the label-strategy tests.
INCIDENT_COMMAS = INCIDENT.replace("Washington DC.", "Washington, D.C.")

LONG_FORM = "Federal Bureau of Investigation"


def manual_org_span(text: str) -> EntitySpan:
    """Manual ORG annotation for the parenthetical long form in INCIDENT."""
    i = text.index(LONG_FORM)
    return EntitySpan(i, i + len(LONG_FORM), LONG_FORM, EntityType.ORG, source="manual")


@dataclass
class CapturingBackend:
    """Echo backend that records every request it serves.

    Stands in for an untrusted upstream: leakage tests scan
    ``captured`` for original entity surfaces.
    """

    name: str = "capture"
    captured: list[LlmRequest] = field(default_factory=list)
    inner: MockEcho = field(default_factory=MockEcho)

    def complete(self, req: LlmRequest) -> str:
        self.captured.append(req)
        return self.inner.complete(req)

    def outbound_text(self) -> str:
        """Every byte this backend ever saw, concatenated."""
        parts = []
        for req in self.captured:
            for msg in req.messages:
                parts.append(msg.content)
        return "\n".join(parts)


@pytest.fixture
def incident_text() -> str:
    return INCIDENT


@pytest.fixture
def incident_text_commas() -> str:
    return INCIDENT_COMMAS


@pytest.fixture
def recognizer_cfg() -> RecognizerConfig:
    return RecognizerConfig.default()


@pytest.fixture
def capturing_backend() -> CapturingBackend:
    return CapturingBackend()


@pytest.fixture
def label_engine() -> HideEngine:
    return HideEngine.build("label", label_mode="indexed", seed=0)


@pytest.fixture
def bare_label_engine() -> HideEngine:
    return HideEngine.build("label", label_mode="bare", seed=0)


@pytest.fixture
def generative_engine() -> HideEngine:
    return HideEngine.build("generative", seed=0)


@pytest.fixture(scope="session")
def small_corpus() -> list[str]:
    return [doc.text for doc in synth_corpus(25, seed=11)]
