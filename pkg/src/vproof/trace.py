"""Trace events recorded along one explored path.

Every event is a small frozen dataclass with a ``kind`` tag. Events
serialize to flat dicts (``{"kind": ..., <fields>}``) and back, and render
to a single stable text line used in counterexample listings.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from typing import ClassVar, Iterable, Union


@dataclass(frozen=True, slots=True)
class Choice:
    kind: ClassVar[str] = "choice"
    id: str
    value: int

    def details(self) -> str:
        return f"{self.id}={self.value}"


@dataclass(frozen=True, slots=True)
class MockCall:
    kind: ClassVar[str] = "mock_call"
    handle: str
    args: str

    def details(self) -> str:
        return f"{self.handle}({self.args})"


@dataclass(frozen=True, slots=True)
class Assume:
    kind: ClassVar[str] = "assume"
    result: bool

    def details(self) -> str:
        return "true" if self.result else "false"


@dataclass(frozen=True, slots=True)
class AssertFail:
    kind: ClassVar[str] = "assert_fail"
    message: str
    site: str

    def details(self) -> str:
        return f'"{self.message}" @{self.site}'


@dataclass(frozen=True, slots=True)
class MemViolation:
    kind: ClassVar[str] = "mem_violation"
    error: str  # out-of-bounds | use-after-free | double-free | uninitialized-read
    buffer: str
    offset: int
    length: int
    size: int

    def details(self) -> str:
        return (
            f"{self.error} {self.buffer} offset={self.offset} "
            f"len={self.length} size={self.size}"
        )


@dataclass(frozen=True, slots=True)
class OrderViolation:
    kind: ClassVar[str] = "order_violation"
    handle: str
    missing: str

    def details(self) -> str:
        return f"{self.handle} missing={self.missing}"


@dataclass(frozen=True, slots=True)
class CardinalityViolation:
    kind: ClassVar[str] = "cardinality_violation"
    handle: str
    predicate: str
    actual: int

    def details(self) -> str:
        return f"{self.handle} expected={self.predicate} actual={self.actual}"


@dataclass(frozen=True, slots=True)
class DepthExhausted:
    kind: ClassVar[str] = "depth_exhausted"
    max_depth: int

    def details(self) -> str:
        return f"max_depth={self.max_depth}"


TraceEvent = Union[
    Choice,
    MockCall,
    Assume,
    AssertFail,
    MemViolation,
    OrderViolation,
    CardinalityViolation,
    DepthExhausted,
]

EVENT_TYPES: dict[str, type] = {
    cls.kind: cls
    for cls in (
        Choice,
        MockCall,
        Assume,
        AssertFail,
        MemViolation,
        OrderViolation,
        CardinalityViolation,
        DepthExhausted,
    )
}

VIOLATION_KINDS = frozenset(
    {
        AssertFail.kind,
        MemViolation.kind,
        OrderViolation.kind,
        CardinalityViolation.kind,
        DepthExhausted.kind,
    }
)


def is_violation(event: TraceEvent) -> bool:
    return event.kind in VIOLATION_KINDS


def event_to_dict(event: TraceEvent) -> dict:
    return {"kind": event.kind, **asdict(event)}


def event_from_dict(data: dict) -> TraceEvent:
    data = dict(data)
    kind = data.pop("kind")
    try:
        cls = EVENT_TYPES[kind]
    except KeyError:
        raise ValueError(f"unknown trace event kind {kind!r}") from None
    names = {f.name for f in fields(cls)}
    if set(data) != names:
        raise ValueError(f"bad fields for {kind}: {sorted(data)}")
    return cls(**data)


def render_event(ordinal: int, event: TraceEvent) -> str:
    return f"#{ordinal} {event.kind} {event.details()}"


def render_events(events: Iterable[TraceEvent]) -> str:
    return "\n".join(render_event(i, e) for i, e in enumerate(events, 1))


def summarize_arg(value: object) -> str:
    if value is None:
        return "NULL"
    if isinstance(value, bool):
        return "true" if value else "false"
    return str(value)
