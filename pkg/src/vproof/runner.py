"""Proof registry and batch execution."""

from __future__ import annotations

import dataclasses
import fnmatch
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Optional

from .engine import ExecutionContext, ExploreConfig, explore
from .report import ProofReport, Verdict

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_USAGE = 3


class RegistryError(ValueError):
    pass


@dataclass(frozen=True)
class ProofEntry:
    name: str
    description: str
    body: Callable[[ExecutionContext], Any]
    config: dict = field(default_factory=dict)  # ExploreConfig field overrides
    expected: Optional[Verdict] = None


class Registry:
    def __init__(self, entries=()):
        self._entries: dict[str, ProofEntry] = {}
        for e in entries:
            self.register(e)

    def register(self, entry: ProofEntry):
        if entry.name in self._entries:
            raise RegistryError(f"proof {entry.name!r} already registered")
        bad = set(entry.config) - {f.name for f in dataclasses.fields(ExploreConfig)}
        if bad:
            raise RegistryError(f"{entry.name}: unknown config overrides {sorted(bad)}")
        self._entries[entry.name] = entry

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[ProofEntry]:
        return iter(sorted(self._entries.values(), key=lambda e: e.name))

    def __getitem__(self, name: str) -> ProofEntry:
        return self._entries[name]

    def names(self) -> list[str]:
        return sorted(self._entries)

    def select(self, pattern: Optional[str] = None) -> list[ProofEntry]:
        return [e for e in self if pattern is None or fnmatch.fnmatchcase(e.name, pattern)]


def effective_config(entry: ProofEntry, base: ExploreConfig, overrides: Optional[dict] = None) -> ExploreConfig:
    """Entry overrides apply over ``base``; explicit ``overrides`` win over both."""
    return dataclasses.replace(base, **{**entry.config, **(overrides or {})})


def run_entry(entry: ProofEntry, base: ExploreConfig = ExploreConfig(), overrides: Optional[dict] = None) -> ProofReport:
    return explore(entry.body, effective_config(entry, base, overrides), name=entry.name)


def exit_status(reports: list[ProofReport]) -> int:
    verdicts = {r.verdict for r in reports}
    if Verdict.FAIL in verdicts:
        return EXIT_FAIL
    if Verdict.INCONCLUSIVE in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def run(
    registry: Registry,
    pattern: Optional[str] = None,
    base: ExploreConfig = ExploreConfig(),
    overrides: Optional[dict] = None,
    workers: int = 1,
) -> tuple[int, list[ProofReport]]:
    """Run every proof matching ``pattern``; return (exit status, reports by name)."""
    entries = registry.select(pattern)
    if not entries:
        raise RegistryError(f"no proof matches {pattern!r}")
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda e: run_entry(e, base, overrides), entries))
    else:
        reports = [run_entry(e, base, overrides) for e in entries]
    reports.sort(key=lambda r: r.name)
    return exit_status(reports), reports
