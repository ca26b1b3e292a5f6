"""Bounded nondeterministic exploration of unit proofs.

A unit proof is a plain callable taking an :class:`ExecutionContext`. Every
call to :func:`nd_value` inside it is a choice point. :func:`explore` runs
the proof once per resolution of those choice points, depth-first, visiting
domain values in declaration order. Paths are isolated by re-execution: each
path starts from a fresh context and replays a forced prefix of choices, so
nothing a path mutates can leak into a sibling.
"""

from __future__ import annotations

import functools
import random
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Hashable, Optional, Sequence

from .report import PathCounts, ProofReport, Verdict, Violation
from .trace import (
    AssertFail,
    Assume,
    Choice,
    DepthExhausted,
    MockCall,
    TraceEvent,
    is_violation,
)

# Largest domain a single choice point may enumerate.
MAX_DOMAIN_SIZE = 1 << 16

ACTIVE = "active"
PRUNED = "pruned"
FAILED = "failed"
COMPLETE = "complete"
DEPTH_EXHAUSTED = "depth_exhausted"


class DomainError(ValueError):
    """Raised for empty, duplicated or unbounded choice domains."""


class ReplayError(RuntimeError):
    """Raised when a forced trail does not match the proof's choice points."""


class PathEnd(BaseException):
    # BaseException so that `except Exception` inside a proof cannot swallow it.
    pass


@dataclass(frozen=True)
class ByteProfile:
    kind: str = "small"  # small | full | sample
    k: int = 0
    seed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("small", "full", "sample"):
            raise DomainError(f"unknown byte profile {self.kind!r}")
        if self.kind == "sample" and not 1 <= self.k <= 256:
            raise DomainError(f"sample size must be in 1..256, got {self.k}")

    @classmethod
    def parse(cls, text: str) -> "ByteProfile":
        """Parse ``small``, ``full`` or ``sample:K``."""
        if text in ("small", "full"):
            return cls(text)
        if text.startswith("sample:"):
            try:
                k = int(text.split(":", 1)[1])
            except ValueError:
                raise DomainError(f"bad byte profile {text!r}") from None
            return cls("sample", k)
        raise DomainError(f"bad byte profile {text!r}")

    def values(self, default_seed: int = 0) -> tuple[int, ...]:
        return _profile_values(self.kind, self.k, default_seed if self.seed is None else self.seed)

    def __str__(self) -> str:
        return f"sample:{self.k}" if self.kind == "sample" else self.kind


@functools.lru_cache(maxsize=64)
def _profile_values(kind: str, k: int, seed: int) -> tuple[int, ...]:
    if kind == "small":
        return (0, 1, 255)
    if kind == "full":
        return tuple(range(256))
    return tuple(sorted(random.Random(seed).sample(range(256), k)))


@dataclass(frozen=True)
class ChoiceDomain:
    """A finite set of values one choice point ranges over.

    Build with :meth:`explicit`, :meth:`integer_range` or :meth:`byte`. A
    byte domain without a profile takes the profile from the exploring
    configuration.
    """

    kind: str
    values: Sequence[int] = ()
    profile: Optional[ByteProfile] = None

    @classmethod
    def explicit(cls, values) -> "ChoiceDomain":
        values = tuple(values)
        if not values:
            raise DomainError("explicit domain must be non-empty")
        if not all(isinstance(v, int) for v in values):
            raise DomainError(f"domain values must be integers: {values}")
        if len(set(values)) != len(values):
            raise DomainError(f"explicit domain has duplicates: {values}")
        if len(values) > MAX_DOMAIN_SIZE:
            raise DomainError(f"domain of {len(values)} values is too large")
        return cls("explicit", values)

    @classmethod
    def integer_range(cls, lo: int, hi: int) -> "ChoiceDomain":
        if not (isinstance(lo, int) and isinstance(hi, int)):
            raise DomainError(f"range bounds must be integers, got {lo!r}..{hi!r}")
        if lo > hi:
            raise DomainError(f"empty range {lo}..{hi}")
        if hi - lo + 1 > MAX_DOMAIN_SIZE:
            raise DomainError(
                f"range {lo}..{hi} is effectively unbounded; "
                f"at most {MAX_DOMAIN_SIZE} values may be enumerated"
            )
        return cls("range", range(lo, hi + 1))

    @classmethod
    def byte(cls, profile: Optional[ByteProfile] = None) -> "ChoiceDomain":
        return cls("byte", (), profile)

    def resolve(self, cfg: "ExploreConfig") -> Sequence[int]:
        if self.kind == "byte":
            return (self.profile or cfg.byte_profile).values(cfg.seed)
        return self.values


def domain(values) -> ChoiceDomain:
    """Coerce a domain, range or iterable of ints into a :class:`ChoiceDomain`."""
    if isinstance(values, ChoiceDomain):
        return values
    if isinstance(values, range) and values.step == 1:
        return ChoiceDomain.integer_range(values.start, values.stop - 1)
    return ChoiceDomain.explicit(values)


@dataclass(frozen=True)
class ExploreConfig:
    max_depth: int = 64
    max_paths: int = 100_000
    byte_profile: ByteProfile = field(default_factory=ByteProfile)
    seed: int = 0
    fail_fast: bool = False
    strict_depth: bool = False
    strict_uninit: bool = True

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError(f"max_depth must be >= 1, got {self.max_depth}")
        if self.max_paths < 1:
            raise ValueError(f"max_paths must be >= 1, got {self.max_paths}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["byte_profile"] = str(self.byte_profile)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExploreConfig":
        data = dict(data)
        if isinstance(data.get("byte_profile"), str):
            data["byte_profile"] = ByteProfile.parse(data["byte_profile"])
        return cls(**data)


class ExecutionContext:
    """State of one path: choices made, events, mock counters, cells, memory."""

    def __init__(
        self,
        cfg: ExploreConfig,
        proof_name: str = "proof",
        forced_indices: Sequence[int] = (),
        forced_trail: Optional[Sequence[tuple[str, int]]] = None,
    ):
        self.cfg = cfg
        self.proof_name = proof_name
        self.status = ACTIVE
        self.choice_trail: list[tuple[str, int]] = []
        self.event_trace: list[TraceEvent] = []
        self.mock_counters: dict[Hashable, int] = {}
        self.env_cells: dict[Hashable, Any] = {}
        self.memory: dict = {}
        self.havoc_values: dict[tuple[int, int], int] = {}
        self._forced_indices = forced_indices
        self._forced_trail = forced_trail
        self._choice_meta: list[tuple[int, int]] = []
        self._on_complete: list[Callable[["ExecutionContext"], None]] = []
        self._ids = 0

    def next_id(self) -> int:
        self._ids += 1
        return self._ids

    @property
    def violations(self) -> list[TraceEvent]:
        return [e for e in self.event_trace if is_violation(e)]

    def _require_active(self, op: str):
        if self.status != ACTIVE:
            raise RuntimeError(f"{op} on a {self.status} path")

    def choose(self, dom: ChoiceDomain, label: Optional[str] = None) -> int:
        if self.status != ACTIVE:
            raise RuntimeError(f"nd_value on a {self.status} path")
        trail = self.choice_trail
        depth = len(trail)
        if label is None:
            label = f"nd{depth}"
        cfg = self.cfg
        if depth >= cfg.max_depth:
            self.status = DEPTH_EXHAUSTED
            self.event_trace.append(DepthExhausted(cfg.max_depth))
            raise PathEnd
        values = dom.values if dom.kind != "byte" else dom.resolve(cfg)
        if self._forced_trail is not None:
            index = self._replay_index(depth, label, values)
        elif depth < len(self._forced_indices):
            index = self._forced_indices[depth]
            if index >= len(values):
                raise ReplayError(f"proof is not deterministic at choice {label!r}")
        else:
            index = 0
        value = values[index]
        self._choice_meta.append((index, len(values)))
        trail.append((label, value))
        self.event_trace.append(Choice(label, value))
        return value

    def _replay_index(self, depth: int, label: str, values: Sequence[int]) -> int:
        if depth >= len(self._forced_trail):
            raise ReplayError(f"trail exhausted at choice {label!r}")
        want_label, want_value = self._forced_trail[depth]
        if want_label != label:
            raise ReplayError(f"expected choice {want_label!r}, proof reached {label!r}")
        try:
            return values.index(want_value)
        except ValueError:
            raise ReplayError(f"{want_value} not in domain of {label!r}") from None

    def assume(self, cond: bool):
        self._require_active("assume")
        self.event_trace.append(Assume(bool(cond)))
        if not cond:
            self.status = PRUNED
            raise PathEnd

    def sassert(self, cond: bool, message: str = "assertion", site: Optional[str] = None):
        self._require_active("sassert")
        if cond:
            return
        if site is None:
            site = _caller_site(1)
        self.fail(AssertFail(message, site))

    def fail(self, event: TraceEvent):
        """Record a violation event and end the path as failed."""
        self.event_trace.append(event)
        self.status = FAILED
        raise PathEnd

    def record_call(self, key: Hashable, name: str, args: str):
        self.event_trace.append(MockCall(name, args))
        self.mock_counters[key] = self.mock_counters.get(key, 0) + 1

    def on_complete(self, hook: Callable[["ExecutionContext"], None]):
        """Run ``hook`` if the proof body returns normally on this path."""
        self._on_complete.append(hook)

    def finish(self, proof: Callable[["ExecutionContext"], Any]) -> str:
        try:
            proof(self)
            if self.status == ACTIVE:
                for hook in self._on_complete:
                    hook(self)
                if self.status == ACTIVE:
                    self.status = COMPLETE
        except PathEnd:
            pass
        return self.status


def nd_value(ctx: ExecutionContext, dom, label: Optional[str] = None) -> int:
    """Return a nondeterministic value from ``dom`` for the current path."""
    if dom.__class__ is not ChoiceDomain:
        dom = domain(dom)
    return ctx.choose(dom, label)


def assume(ctx: ExecutionContext, cond: bool):
    ctx.assume(cond)


def sassert(ctx: ExecutionContext, cond: bool, message: str = "assertion", site: Optional[str] = None):
    if not cond and site is None:
        site = _caller_site(1)
    ctx.sassert(cond, message, site)


def _caller_site(depth: int) -> str:
    frame = sys._getframe(depth + 1)
    return f"{frame.f_code.co_name}:{frame.f_lineno}"


def _next_prefix(meta: list[tuple[int, int]]) -> Optional[list[int]]:
    for i in range(len(meta) - 1, -1, -1):
        index, size = meta[i]
        if index + 1 < size:
            return [m[0] for m in meta[:i]] + [index + 1]
    return None


def _violation(ctx: ExecutionContext) -> Violation:
    first = next(e for e in ctx.event_trace if is_violation(e))
    return Violation(kind=first.kind, message=first.details(), trace=tuple(ctx.event_trace))


def explore(
    proof: Callable[[ExecutionContext], Any],
    cfg: ExploreConfig = ExploreConfig(),
    *,
    name: str = "proof",
    observer: Optional[Callable[[ExecutionContext], None]] = None,
) -> ProofReport:
    """Enumerate every bounded path of ``proof`` and summarize the outcome."""
    start = time.perf_counter()
    counts = dict.fromkeys((COMPLETE, PRUNED, FAILED, DEPTH_EXHAUSTED), 0)
    violations: list[Violation] = []
    prefix: Optional[list[int]] = []
    explored = 0
    budget_exceeded = False
    while prefix is not None:
        if explored >= cfg.max_paths:
            budget_exceeded = True
            break
        ctx = ExecutionContext(cfg, name, forced_indices=prefix)
        status = ctx.finish(proof)
        explored += 1
        if status == DEPTH_EXHAUSTED and cfg.strict_depth:
            status = ctx.status = FAILED
        counts[status] += 1
        if status == FAILED:
            violations.append(_violation(ctx))
        if observer is not None:
            observer(ctx)
        if status == FAILED and cfg.fail_fast:
            break
        prefix = _next_prefix(ctx._choice_meta)

    if counts[FAILED]:
        verdict = Verdict.FAIL
    elif budget_exceeded or counts[COMPLETE] == 0:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.PASS
    return ProofReport(
        name=name,
        verdict=verdict,
        paths=PathCounts(
            complete=counts[COMPLETE],
            pruned=counts[PRUNED],
            failed=counts[FAILED],
            depth_exhausted=counts[DEPTH_EXHAUSTED],
        ),
        violations=violations,
        duration_ms=round((time.perf_counter() - start) * 1000, 3),
        config=cfg.to_dict(),
    )


def replay(
    proof: Callable[[ExecutionContext], Any],
    trail: Sequence[tuple[str, int]],
    cfg: ExploreConfig = ExploreConfig(),
    *,
    name: str = "proof",
) -> ExecutionContext:
    """Re-run ``proof`` forcing the recorded ``trail``; return the finished context."""
    ctx = ExecutionContext(cfg, name, forced_trail=list(trail))
    status = ctx.finish(proof)
    if status == DEPTH_EXHAUSTED and cfg.strict_depth:
        ctx.status = FAILED
    return ctx


def trail_of(trace: Sequence[TraceEvent]) -> list[tuple[str, int]]:
    return [(e.id, e.value) for e in trace if isinstance(e, Choice)]
