"""Exception types shared across modules."""


class ConfigError(Exception):
    """Invalid configuration, detected at load time (never mid-operation)."""


class SurrogatePoolError(Exception):
    """No remaining surrogate candidates for an entity type."""

    def __init__(self, etype, detail: str = ""):
        self.etype = etype
        msg = f"surrogate pool exhausted for type {etype.code}"
        super().__init__(msg + (f": {detail}" if detail else ""))


class BackendError(Exception):
    """Base for LLM backend failures."""


class TransportError(BackendError):
    """The request never completed (connection refused, timeout, DNS)."""


class HttpStatusError(BackendError):
    """The remote answered with a non-2xx status."""

    def __init__(self, status: int, body: str = ""):
        self.status = status
        super().__init__(f"upstream returned HTTP {status}: {body[:200]}")


class MalformedResponseError(BackendError):
    """The remote answered 2xx but the body was not a usable completion."""


class OverlappingSpansError(ValueError):
    """Two manual spans overlap; both offenders are carried for reporting."""

    def __init__(self, first, second):
        self.first = first
        self.second = second
        super().__init__(
            f"manual spans overlap: [{first.start},{first.end}) {first.surface!r} "
            f"and [{second.start},{second.end}) {second.surface!r}"
        )
