"""Local privacy gateway: hide named entities before a prompt leaves the
machine, seek them back into the model's reply afterwards.

The pipeline stages are small, composable functions:

- :mod:`hideseek.recognizer` finds entity spans (gazetteers + numeric rules),
- :mod:`hideseek.hide` replaces them with typed placeholders or surrogates,
- :mod:`hideseek.backends` builds prompts and talks to a model,
- :mod:`hideseek.seek` restores the original surfaces in the reply,
- :mod:`hideseek.metrics` and :mod:`hideseek.adversary` measure utility
  and protection,
- :mod:`hideseek.gateway` wraps the whole loop in an HTTP proxy.
"""

from hideseek.types import (
    AnonymizedDocument,
    EntityMapping,
    EntitySpan,
    EntityType,
    HideStrategy,
    MappingEntry,
    PipelineRecord,
    SeekMatch,
    SeekResult,
    TaskType,
)

__version__ = "0.1.0"

__all__ = [
    "AnonymizedDocument",
    "EntityMapping",
    "EntitySpan",
    "EntityType",
    "HideStrategy",
    "MappingEntry",
    "PipelineRecord",
    "SeekMatch",
    "SeekResult",
    "TaskType",
    "__version__",
]
