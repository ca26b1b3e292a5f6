"""Proof reports and their JSON form."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field, fields

from .trace import EVENT_TYPES, TraceEvent, event_from_dict, event_to_dict, render_events

TOOL_VERSION = "0.1.0"


class Verdict(str, enum.Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class PathCounts:
    complete: int = 0
    pruned: int = 0
    failed: int = 0
    depth_exhausted: int = 0

    @property
    def total(self) -> int:
        return self.complete + self.pruned + self.failed + self.depth_exhausted


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    trace: tuple[TraceEvent, ...]

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "message": self.message,
            "trace": [event_to_dict(e) for e in self.trace],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Violation":
        return cls(
            kind=data["kind"],
            message=data["message"],
            trace=tuple(event_from_dict(e) for e in data["trace"]),
        )


@dataclass
class ProofReport:
    name: str
    verdict: Verdict
    paths: PathCounts
    violations: list[Violation] = field(default_factory=list)
    duration_ms: float = 0.0
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "verdict": self.verdict.value,
            "paths": {
                "complete": self.paths.complete,
                "pruned": self.paths.pruned,
                "failed": self.paths.failed,
                "depth_exhausted": self.paths.depth_exhausted,
            },
            "violations": [v.to_dict() for v in self.violations],
            "duration_ms": self.duration_ms,
            "config": dict(self.config),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProofReport":
        return cls(
            name=data["name"],
            verdict=Verdict(data["verdict"]),
            paths=PathCounts(**data["paths"]),
            violations=[Violation.from_dict(v) for v in data["violations"]],
            duration_ms=data["duration_ms"],
            config=dict(data["config"]),
        )

    def without_timing(self) -> dict:
        d = self.to_dict()
        d["duration_ms"] = 0
        return d


def render_trace(violation: Violation) -> str:
    """One line per trace event: ``#<ordinal> <kind> <details>``."""
    return render_events(violation.trace)


def render_text(reports: list[ProofReport], *, max_traces: int = 3) -> str:
    lines = []
    for r in reports:
        p = r.paths
        lines.append(
            f"{r.verdict.value.upper():<12} {r.name}  complete={p.complete} "
            f"pruned={p.pruned} failed={p.failed} "
            f"depth_exhausted={p.depth_exhausted}  ({r.duration_ms:.0f} ms)"
        )
        for v in r.violations[:max_traces]:
            lines.append(f"  violation: {v.kind} {v.message}")
            lines.extend("    " + line for line in render_trace(v).splitlines())
        if len(r.violations) > max_traces:
            lines.append(f"  ... {len(r.violations) - max_traces} more violation(s)")
    counts = {v: sum(r.verdict is v for r in reports) for v in Verdict}
    lines.append(
        f"{len(reports)} proof(s): {counts[Verdict.PASS]} pass, "
        f"{counts[Verdict.FAIL]} fail, {counts[Verdict.INCONCLUSIVE]} inconclusive"
    )
    return "\n".join(lines)


def render_json(reports: list[ProofReport], config: dict) -> str:
    doc = {
        "tool_version": TOOL_VERSION,
        "config": config,
        "proofs": [r.to_dict() for r in reports],
    }
    return json.dumps(doc, indent=2)


def parse_json(text: str) -> tuple[dict, list[ProofReport]]:
    doc = json.loads(text)
    return doc["config"], [ProofReport.from_dict(p) for p in doc["proofs"]]


# JSON schema for the machine-readable run output.
_JSON_TYPES = {"str": "string", "int": "integer", "bool": "boolean"}

_EVENT_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", *(f.name for f in fields(cls))],
            "properties": {
                "kind": {"const": kind},
                **{f.name: {"type": _JSON_TYPES[f.type]} for f in fields(cls)},
            },
        }
        for kind, cls in EVENT_TYPES.items()
    ]
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["tool_version", "config", "proofs"],
    "additionalProperties": False,
    "properties": {
        "tool_version": {"type": "string"},
        "config": {"type": "object"},
        "proofs": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name", "verdict", "paths", "violations", "duration_ms", "config"],
                "properties": {
                    "name": {"type": "string"},
                    "verdict": {"enum": ["pass", "fail", "inconclusive"]},
                    "paths": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["complete", "pruned", "failed", "depth_exhausted"],
                        "properties": {
                            k: {"type": "integer", "minimum": 0}
                            for k in ("complete", "pruned", "failed", "depth_exhausted")
                        },
                    },
                    "violations": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "additionalProperties": False,
                            "required": ["kind", "message", "trace"],
                            "properties": {
                                "kind": {"type": "string"},
                                "message": {"type": "string"},
                                "trace": {"type": "array", "items": _EVENT_SCHEMA},
                            },
                        },
                    },
                    "duration_ms": {"type": "number", "minimum": 0},
                    "config": {"type": "object"},
                },
            },
        },
    },
}
