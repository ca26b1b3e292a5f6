"""Brute-force reference models, written without reusing vproof internals.

Each ``check_*`` function runs the real implementation across an exhaustive
(or seeded random) case set, compares it against a direct model, and returns
``(cases, mismatches)``. A mismatch list holds enough context to reproduce the
failing case by hand.
"""

from __future__ import annotations

import itertools
import random

from vproof import (
    Eq,
    ExecutionContext,
    ExpectationBuilder,
    ExploreConfig,
    Gt,
    Leq,
    Geq,
    Lt,
    AnyNumber,
    MockScope,
    Signature,
    alloc,
    assume,
    explore,
    free,
    is_deref,
    is_modified,
    mem_copy,
    mem_read,
    mem_write,
    memhavoc,
    nd_value,
    reset_modified,
    sassert,
)
from vproof.engine import PathEnd

VOID0 = Signature(None, ())
VOID1 = Signature(None, ("int",))


# --- engine ---------------------------------------------------------------

def random_proof_shape(rng: random.Random, max_combinations: int = 10_000):
    """A proof shape: choices over small domains mixed with assume/assert filters."""
    while True:
        steps = []
        total = 1
        for i in range(rng.randint(1, 5)):
            size = rng.randint(1, 6)
            steps.append(("choice", f"c{i}", tuple(rng.sample(range(-4, 12), size))))
            total *= size
            for _ in range(rng.choice((0, 0, 1, 1, 2))):
                steps.append((rng.choice(("assume", "assume", "assert")), _random_predicate(rng, i + 1)))
        steps.append(("assert", _random_predicate(rng, sum(s[0] == "choice" for s in steps))))
        if total <= max_combinations:
            return steps


def _random_predicate(rng, arity):
    coeffs = tuple(rng.randint(-3, 3) for _ in range(arity))
    modulus = rng.randint(2, 5)
    return coeffs, rng.randint(0, 1), modulus, rng.randrange(modulus)


def _holds(pred, values) -> bool:
    coeffs, bias, modulus, residue = pred
    return (sum(c * v for c, v in zip(coeffs, values)) + bias) % modulus != residue


def proof_from_shape(steps):
    def proof(ctx):
        values = []
        for step in steps:
            if step[0] == "choice":
                values.append(nd_value(ctx, step[2], step[1]))
            elif step[0] == "assume":
                assume(ctx, _holds(step[1], values))
            else:
                sassert(ctx, _holds(step[1], values), "p", site="random")

    return proof


def oracle_paths(steps) -> set[tuple[str, tuple]]:
    """Cartesian product of every domain, each walked until its first filter stops it."""
    domains = [s[2] for s in steps if s[0] == "choice"]
    paths = set()
    for combo in itertools.product(*domains):
        values = []
        outcome = "complete"
        feed = iter(combo)
        for step in steps:
            if step[0] == "choice":
                values.append(next(feed))
            elif not _holds(step[1], values):
                outcome = "pruned" if step[0] == "assume" else "failed"
                break
        paths.add((outcome, tuple(values)))
    return paths


def explored_paths(steps, cfg=ExploreConfig()):
    seen = []

    def observe(ctx):
        seen.append((ctx.status, tuple(v for _, v in ctx.choice_trail)))

    report = explore(proof_from_shape(steps), cfg, observer=observe)
    return report, seen


def check_engine_oracle(n_proofs: int = 200, seed: int = 2024):
    mismatches = []
    rng = random.Random(seed)
    for case in range(n_proofs):
        steps = random_proof_shape(rng)
        report, seen = explored_paths(steps)
        expected = oracle_paths(steps)
        got = set(seen)
        counts = {k: sum(o == k for o, _ in expected) for k in ("complete", "pruned", "failed")}
        if (
            got != expected
            or len(seen) != len(got)
            or counts != {"complete": report.paths.complete, "pruned": report.paths.pruned,
                          "failed": report.paths.failed}
        ):
            mismatches.append((case, steps))
    return n_proofs, mismatches


# --- memory ---------------------------------------------------------------

def fresh_ctx(**cfg) -> ExecutionContext:
    return ExecutionContext(ExploreConfig(**cfg))


def attempt(ctx, op, *args, **kwargs):
    """Run ``op``; return (result, ended) where ended means the path stopped."""
    try:
        return op(ctx, *args, **kwargs), False
    except PathEnd:
        return None, True


TAINT_OPS = ("write", "reset", "read", "copy_in", "copy_out")


def check_taint_law(max_len: int = 6):
    """is_modified iff a write landed after the latest reset, over every op sequence."""
    cases, mismatches = 0, []
    for length in range(max_len + 1):
        for ops in itertools.product(TAINT_OPS, repeat=length):
            ctx = fresh_ctx()
            buf = alloc(ctx, 4, "b")
            other = alloc(ctx, 4, "o")
            mem_write(ctx, buf, 0, [1, 2, 3, 4])
            mem_write(ctx, other, 0, [5, 6, 7, 8])
            armed = dirty = False
            for i, op in enumerate(ops):
                if op == "write":
                    mem_write(ctx, buf, i % 4, [i])
                    dirty = dirty or armed
                elif op == "copy_in":
                    mem_copy(ctx, buf, other, 2)
                    dirty = dirty or armed
                elif op == "reset":
                    reset_modified(ctx, buf)
                    armed, dirty = True, False
                elif op == "read":
                    mem_read(ctx, buf, 0, 4)
                else:
                    mem_copy(ctx, other, buf, 2)
                cases += 1
                if is_modified(ctx, buf) != dirty:
                    mismatches.append(ops[: i + 1])
    return cases, mismatches


def check_bounds_law(max_size: int = 6):
    """is_deref(buf, n) iff n <= size and not freed; out-of-range access fails untouched."""
    cases, mismatches = 0, []
    for size in range(max_size + 1):
        for n in range(max_size + 3):
            for freed in (False, True):
                ctx = fresh_ctx()
                buf = alloc(ctx, size)
                if freed:
                    free(ctx, buf)
                cases += 1
                if is_deref(ctx, buf, n) != (n <= size and not freed):
                    mismatches.append(("is_deref", size, n, freed))
        for offset in range(max_size + 2):
            for length in range(max_size + 2):
                inside = offset + length <= size
                for op in ("read", "write", "copy_dst", "copy_src"):
                    cases += 1
                    ctx = fresh_ctx(strict_uninit=False)
                    buf = alloc(ctx, size, "t")
                    peer = alloc(ctx, max_size * 2 + 4, "peer")
                    mem_write(ctx, buf, 0, [7] * size)
                    mem_write(ctx, peer, 0, [9] * (max_size * 2 + 4))
                    before = list(ctx.memory[buf].cells)
                    if op == "read":
                        _, ended = attempt(ctx, mem_read, buf, offset, length)
                    elif op == "write":
                        _, ended = attempt(ctx, mem_write, buf, offset, [1] * length)
                    elif op == "copy_dst":
                        _, ended = attempt(ctx, mem_copy, buf, peer, length, dst_offset=offset)
                    else:
                        _, ended = attempt(ctx, mem_copy, peer, buf, length, src_offset=offset)
                    events = [e for e in ctx.event_trace if e.kind == "mem_violation"]
                    after = ctx.memory[buf].cells
                    ok = (
                        ended == (not inside)
                        and len(events) == (0 if inside else 1)
                        and len(after) == size
                        and (inside or after == before)
                    )
                    if not ok:
                        mismatches.append((op, size, offset, length))
    return cases, mismatches


def check_lifetime_law():
    """free-free is a double free; any access after free is use-after-free."""
    accesses = {
        "read": lambda ctx, b: mem_read(ctx, b, 0, 1),
        "write": lambda ctx, b: mem_write(ctx, b, 0, [1]),
        "havoc": lambda ctx, b: memhavoc(ctx, b),
        "free": lambda ctx, b: free(ctx, b),
    }
    cases, mismatches = 0, []
    for name, access in accesses.items():
        ctx = fresh_ctx()
        buf = alloc(ctx, 4)
        mem_write(ctx, buf, 0, [0, 0, 0, 0])
        free(ctx, buf)
        _, ended = attempt(ctx, access, buf)
        want = "double-free" if name == "free" else "use-after-free"
        cases += 1
        last = ctx.event_trace[-1] if ctx.event_trace else None
        if not (ended and last is not None and last.kind == "mem_violation" and last.error == want):
            mismatches.append(name)
    return cases, mismatches


def check_havoc_law():
    """A havoc byte reads the same twice on a path; siblings cover the profile."""
    cases, mismatches = 0, []
    for profile, expected in (("small", {0, 1, 255}), ("full", set(range(256)))):
        reads = []

        def proof(ctx):
            buf = alloc(ctx, 4)
            memhavoc(ctx, buf)
            first = mem_read(ctx, buf, 0, 1)
            copy = alloc(ctx, 4)
            mem_copy(ctx, copy, buf, 4)
            again = mem_read(ctx, buf, 0, 1)
            via_copy = mem_read(ctx, copy, 0, 1)
            reads.append((first, again, via_copy))

        from vproof.engine import ByteProfile

        report = explore(proof, ExploreConfig(byte_profile=ByteProfile.parse(profile)))
        cases += len(reads)
        if report.paths.complete != len(expected):
            mismatches.append((profile, "paths", report.paths.complete))
        if any(len(set(r)) != 1 for r in reads):
            mismatches.append((profile, "reread"))
        if {r[0][0] for r in reads} != expected:
            mismatches.append((profile, "coverage"))
    return cases, mismatches


# --- mocks ----------------------------------------------------------------

CARDINALITIES = {
    "Any": (AnyNumber, lambda c, n: True),
    "Eq": (Eq, lambda c, n: c == n),
    "Lt": (Lt, lambda c, n: c < n),
    "Gt": (Gt, lambda c, n: c > n),
    "Leq": (Leq, lambda c, n: c <= n),
    "Geq": (Geq, lambda c, n: c >= n),
}


def run_calls(word, build):
    """Explore a proof that calls the mocks named by ``word`` in order."""
    scope = MockScope("oracle")
    handles = build(scope)

    def body(ctx):
        for letter in word:
            handles[letter](ctx)

    return explore(scope.unit_proof(body), ExploreConfig())


def check_cardinality_law(max_len: int = 6):
    """Post-check verdict over every call count 0..max_len and bound 0..3."""
    cases, mismatches = 0, []
    for kind, (ctor, model) in CARDINALITIES.items():
        for n in range(4):
            pred = ctor() if kind == "Any" else ctor(n)
            for count in range(max_len + 1):

                def build(scope, pred=pred):
                    m = scope.make_mock("m", VOID0, ExpectationBuilder().times(pred).build())
                    scope.setup_post_checks([m])
                    return {"m": m}

                report = run_calls("m" * count, build)
                want = model(count, n)
                cases += 1
                got = report.verdict.value == "pass"
                kinds = {v.kind for v in report.violations}
                if got != want or (not want and kinds != {"cardinality_violation"}):
                    mismatches.append((str(pred), count))
    return cases, mismatches


def ordering_ok(word: str, ordered: str = "r", before: str = "g") -> bool:
    """Scanner: every ``ordered`` call has an earlier ``before`` call."""
    seen = False
    for letter in word:
        if letter == before:
            seen = True
        elif letter == ordered and not seen:
            return False
    return True


def vmock_shape(scope):
    g = scope.make_mock("get_msg", VOID0, ExpectationBuilder().times(Eq(1)).build())
    r = scope.make_ordered_mock("read_msg", VOID0, ExpectationBuilder().times(Lt(2)).build(), [g])
    p = scope.lazy_mock("put_msg", VOID0)
    scope.setup_post_checks([g, r, p])
    return {"g": g, "r": r, "p": p}


def check_ordering_and_cardinality(max_len: int = 6):
    """Every word over {get, read, put} up to ``max_len`` calls, against the scanner."""
    cases, mismatches = 0, []
    for length in range(max_len + 1):
        for word in map("".join, itertools.product("grp", repeat=length)):
            report = run_calls(word, vmock_shape)
            cases += 1
            if not ordering_ok(word):
                want_kind = "order_violation"
            elif word.count("g") != 1 or word.count("r") >= 2:
                want_kind = "cardinality_violation"
            else:
                want_kind = None
            got_kind = report.violations[0].kind if report.violations else None
            if got_kind != want_kind:
                mismatches.append(word)
    return cases, mismatches


def check_capture_and_wrap(max_len: int = 6):
    """Words over {set0, set1, get}: captures store the argument in a cell and a
    wrap_cell return reads the latest stored value (or the initial one)."""
    cases, mismatches = 0, []
    for length in range(max_len + 1):
        for word in itertools.product("01g", repeat=length):
            scope = MockScope("capture")
            cell = scope.cell("last", -1)
            log = []

            def remember(ctx, arg, cell=cell, log=log):
                log.append(("cap", arg))
                cell.set(ctx, arg)

            def invoked(ctx, *args, log=log):
                log.append(("inv", args))

            setter = scope.make_mock(
                "setter", VOID1,
                ExpectationBuilder().capture_arg_and_invoke(0, remember).invoke_fn(invoked).build(),
            )
            getter = scope.make_mock(
                "getter", Signature("int", ()), ExpectationBuilder().return_fn(scope.wrap_cell(cell)).build()
            )
            returns = []

            def body(ctx, word=word, setter=setter, getter=getter, returns=returns):
                for letter in word:
                    if letter == "g":
                        returns.append(getter(ctx))
                    else:
                        setter(ctx, int(letter))

            report = explore(scope.unit_proof(body), ExploreConfig())
            want_returns, want_log, last = [], [], -1
            for letter in word:
                if letter == "g":
                    want_returns.append(last)
                else:
                    last = int(letter)
                    want_log += [("cap", last), ("inv", (last,))]
            cases += 1
            if report.paths.complete != 1 or returns != want_returns or log != want_log:
                mismatches.append("".join(word))
    return cases, mismatches
