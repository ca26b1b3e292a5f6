"""Expectation DSL and mock assembly.

Expectations are built fluently and frozen::

    get_msg_expect = (
        ExpectationBuilder()
        .times(Eq(1))
        .return_fn(nd(ERR_CODES, "get_msg.ret"))
        .capture_arg_and_invoke(1, set_len)
        .build()
    )

and attached to a mock declared in a :class:`MockScope`. A mock handle is
called like the function it replaces, with the path context first::

    rc = get_msg(ctx, chan, len_ref)

All wiring is resolved when the handle is constructed; a call never looks a
mock up by name. Actions receive the context as their first argument: a
return action is ``f(ctx)``, a capture action ``f(ctx, arg)`` and an invoke
action ``f(ctx, *args)``.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional

from .engine import ChoiceDomain, ExecutionContext, domain, nd_value
from .trace import CardinalityViolation, OrderViolation, summarize_arg


class ExpectationError(ValueError):
    """Invalid expectation or mock declaration."""


@dataclass(frozen=True)
class Cardinality:
    kind: str = "Any"  # Any | Eq | Lt | Gt | Leq | Geq
    n: int = 0

    def __post_init__(self):
        if self.kind not in _PREDICATES:
            raise ExpectationError(f"unknown cardinality {self.kind!r}")
        if self.n < 0:
            raise ExpectationError(f"cardinality bound must be >= 0, got {self.n}")

    def accepts(self, count: int) -> bool:
        return _PREDICATES[self.kind](count, self.n)

    def __str__(self) -> str:
        return "Any" if self.kind == "Any" else f"{self.kind}({self.n})"


_PREDICATES = {
    "Any": lambda c, n: True,
    "Eq": lambda c, n: c == n,
    "Lt": lambda c, n: c < n,
    "Gt": lambda c, n: c > n,
    "Leq": lambda c, n: c <= n,
    "Geq": lambda c, n: c >= n,
}


def AnyNumber() -> Cardinality:
    return Cardinality("Any")


def Eq(n: int) -> Cardinality:
    return Cardinality("Eq", n)


def Lt(n: int) -> Cardinality:
    return Cardinality("Lt", n)


def Gt(n: int) -> Cardinality:
    return Cardinality("Gt", n)


def Leq(n: int) -> Cardinality:
    return Cardinality("Leq", n)


def Geq(n: int) -> Cardinality:
    return Cardinality("Geq", n)


@dataclass(frozen=True)
class CaptureEntry:
    index: int
    action: Callable[[ExecutionContext, Any], Any]


@dataclass(frozen=True)
class ExpectationRecord:
    cardinality: Cardinality = field(default_factory=Cardinality)
    return_action: Optional[Callable[[ExecutionContext], Any]] = None
    capture_map: tuple[CaptureEntry, ...] = ()
    invoke_action: Optional[Callable[..., Any]] = None
    predecessors: frozenset = frozenset()


@dataclass(frozen=True)
class ExpectationBuilder:
    """Immutable builder; every setter returns a new builder."""

    _record: ExpectationRecord = field(default_factory=ExpectationRecord)
    _set: frozenset = frozenset()

    def _with(self, key: str, **changes) -> "ExpectationBuilder":
        if key in self._set:
            raise ExpectationError(f"{key} set twice in one expectation")
        return ExpectationBuilder(
            dataclasses.replace(self._record, **changes), self._set | {key}
        )

    def times(self, predicate: Cardinality) -> "ExpectationBuilder":
        if not isinstance(predicate, Cardinality):
            raise ExpectationError(f"times() needs a Cardinality, got {predicate!r}")
        return self._with("times", cardinality=predicate)

    def return_fn(self, action: Callable[[ExecutionContext], Any]) -> "ExpectationBuilder":
        return self._with("return_fn", return_action=action)

    def capture_arg_and_invoke(self, index: int, action) -> "ExpectationBuilder":
        if index < 0:
            raise ExpectationError(f"capture index must be >= 0, got {index}")
        if any(c.index == index for c in self._record.capture_map):
            raise ExpectationError(f"argument {index} captured twice")
        return ExpectationBuilder(
            dataclasses.replace(
                self._record,
                capture_map=self._record.capture_map + (CaptureEntry(index, action),),
            ),
            self._set,
        )

    def invoke_fn(self, action: Callable[..., Any]) -> "ExpectationBuilder":
        return self._with("invoke_fn", invoke_action=action)

    def after(self, *predecessors: "MockHandle") -> "ExpectationBuilder":
        if len(predecessors) == 1 and not isinstance(predecessors[0], MockHandle):
            predecessors = tuple(predecessors[0])
        for p in predecessors:
            if not isinstance(p, MockHandle):
                raise ExpectationError(f"after() needs mock handles, got {p!r}")
        return self._with("after", predecessors=frozenset(predecessors))

    def build(self) -> ExpectationRecord:
        r = self._record
        if r.return_action is not None and r.invoke_action is not None:
            raise ExpectationError("returnFn and invokeFn both set; the return value is ambiguous")
        return r

    # camelCase spellings of the DSL
    returnFn = return_fn
    captureArgAndInvoke = capture_arg_and_invoke
    invokeFn = invoke_fn


def nd(values, label: Optional[str] = None) -> Callable[[ExecutionContext], int]:
    """A return action producing a nondeterministic value from ``values``."""
    dom = domain(values)
    return lambda ctx: nd_value(ctx, dom, label)


@dataclass(frozen=True)
class Signature:
    returns: Optional[str]  # None for void
    params: tuple[str, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.params)


DEFAULT_RETURN_DOMAINS = {
    "int": ChoiceDomain.explicit((-1, 0)),
    "bool": ChoiceDomain.explicit((0, 1)),
    "size_t": ChoiceDomain.explicit((0, 1)),
    "byte": ChoiceDomain.byte(),
}


@dataclass(eq=False, frozen=True)
class EnvCell:
    """Proof-scoped mutable scalar; its value lives in the path context."""

    id: str
    initial: Any = 0

    def get(self, ctx: ExecutionContext) -> Any:
        return ctx.env_cells.get(self, self.initial)

    def set(self, ctx: ExecutionContext, value: Any):
        ctx.env_cells[self] = value


class MockHandle:
    """A mock function with its behaviour wired in at construction."""

    __slots__ = (
        "name", "signature", "expectation", "lazy", "return_domain",
        "_arity", "_captures", "_invoke", "_return", "_preds", "_ret_label", "_void",
    )

    def __init__(self, name, signature, expectation, lazy, return_domain):
        self.name = name
        self.signature = signature
        self.expectation = expectation
        self.lazy = lazy
        self.return_domain = return_domain
        self._arity = signature.arity
        self._captures = tuple((c.index, c.action) for c in expectation.capture_map)
        self._invoke = expectation.invoke_action
        self._return = expectation.return_action
        self._preds = tuple(sorted(expectation.predecessors, key=lambda h: h.name))
        self._ret_label = f"{name}.ret"
        self._void = signature.returns is None

    def __repr__(self) -> str:
        return f"<mock {self.name}>"

    def __call__(self, ctx: ExecutionContext, *args):
        if len(args) != self._arity:
            raise TypeError(f"{self.name} takes {self._arity} arguments, got {len(args)}")
        ctx.record_call(self, self.name, ", ".join(map(summarize_arg, args)))
        for p in self._preds:
            if ctx.mock_counters.get(p, 0) - (p is self) < 1:
                ctx.fail(OrderViolation(self.name, p.name))
        if self.lazy:
            return None if self._void else ctx.choose(self.return_domain, self._ret_label)
        for index, action in self._captures:
            action(ctx, args[index])
        result = None
        if self._invoke is not None:
            result = self._invoke(ctx, *args)
        if self._void:
            return None
        if self._return is not None:
            return self._return(ctx)
        if self._invoke is not None:
            return result
        return ctx.choose(self.return_domain, self._ret_label)


def skeletal_call(ctx: ExecutionContext, handle: MockHandle, args) -> Any:
    return handle(ctx, *args)


class MockScope:
    """The environment of one unit proof: its mocks, cells and post-checks."""

    def __init__(self, name: str):
        self.name = name
        self._mocks: dict[str, MockHandle] = {}
        self._cells: dict[str, EnvCell] = {}
        self._post_checks: list[MockHandle] = []

    @property
    def mocks(self) -> list[MockHandle]:
        return list(self._mocks.values())

    def cell(self, name: str, initial: Any = 0) -> EnvCell:
        if name in self._cells:
            raise ExpectationError(f"cell {name!r} declared twice in {self.name}")
        c = self._cells[name] = EnvCell(f"{self.name}.{name}", initial)
        return c

    def wrap_cell(self, cell: EnvCell) -> Callable[[ExecutionContext], Any]:
        """Return action that reads ``cell`` at call time."""
        if not any(c is cell for c in self._cells.values()):
            raise ExpectationError(f"cell {cell.id} is not registered with {self.name}")
        return cell.get

    def _register(self, handle: MockHandle) -> MockHandle:
        if handle.name in self._mocks:
            raise ExpectationError(f"mock {handle.name!r} declared twice in {self.name}")
        sig = handle.signature
        for c in handle.expectation.capture_map:
            if c.index >= sig.arity:
                raise ExpectationError(
                    f"{handle.name}: capture index {c.index} out of range for {sig.arity} argument(s)"
                )
        for p in handle.expectation.predecessors:
            if self._mocks.get(p.name) is not p:
                raise ExpectationError(f"{handle.name}: predecessor {p.name} is not in {self.name}")
        if handle.return_domain is None and sig.returns is not None:
            e = handle.expectation
            if e.return_action is None and e.invoke_action is None:
                raise ExpectationError(f"{handle.name}: no return domain for type {sig.returns!r}")
        self._mocks[handle.name] = handle
        return handle

    def make_mock(
        self,
        name: str,
        signature: Signature,
        expectation: Optional[ExpectationRecord] = None,
        return_domain=None,
    ) -> MockHandle:
        expectation = expectation or ExpectationRecord()
        if return_domain is not None:
            return_domain = domain(return_domain)
        elif signature.returns is not None:
            return_domain = DEFAULT_RETURN_DOMAINS.get(signature.returns)
        return self._register(MockHandle(name, signature, expectation, False, return_domain))

    def make_ordered_mock(
        self,
        name: str,
        signature: Signature,
        expectation: Optional[ExpectationRecord],
        predecessors: Iterable[MockHandle],
        return_domain=None,
    ) -> MockHandle:
        expectation = expectation or ExpectationRecord()
        preds = frozenset(predecessors) | expectation.predecessors
        expectation = dataclasses.replace(expectation, predecessors=preds)
        return self.make_mock(name, signature, expectation, return_domain)

    def lazy_mock(self, name: str, signature: Signature, return_domain=None) -> MockHandle:
        if return_domain is not None:
            return_domain = domain(return_domain)
        elif signature.returns is not None:
            return_domain = DEFAULT_RETURN_DOMAINS.get(signature.returns)
        return self._register(MockHandle(name, signature, ExpectationRecord(), True, return_domain))

    def setup_post_checks(self, handles: Iterable[MockHandle]):
        for h in handles:
            if self._mocks.get(getattr(h, "name", None)) is not h:
                raise ExpectationError(f"{h!r} is not a mock of {self.name}")
            self._post_checks.append(h)

    def post_check(self, ctx: ExecutionContext):
        """Evaluate cardinality expectations against this path's call counts."""
        breaches = []
        for h in self._post_checks:
            count = ctx.mock_counters.get(h, 0)
            card = h.expectation.cardinality
            if not card.accepts(count):
                breaches.append(CardinalityViolation(h.name, str(card), count))
        if breaches:
            ctx.event_trace.extend(breaches[:-1])
            ctx.fail(breaches[-1])

    def unit_proof(self, body: Callable[[ExecutionContext], Any]) -> Callable[[ExecutionContext], Any]:
        """Wrap ``body`` so post-checks run at the end of every complete path."""

        def proof(ctx: ExecutionContext):
            ctx.on_complete(self.post_check)
            return body(ctx)

        proof.__name__ = getattr(body, "__name__", "proof")
        proof.__doc__ = body.__doc__
        return proof
