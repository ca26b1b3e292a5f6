"""Tracked byte buffers for unit proofs.

Memory is modelled per allocation: a :class:`BufferRef` plus an offset, never
raw addresses. Each byte cell is one of

* ``None``: uninitialized,
* an ``int`` in 0..255: concrete,
* a ``(generation, offset)`` tuple: havocked but not yet read.

A havoc cell becomes concrete the first time it is read, through a choice
over the configured byte profile. Copies move the unread havoc token, so
every copy of a havocked byte reads as the same value. Every access is
bounds-checked before anything is mutated. A failed check records a
``mem_violation`` event and ends the path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .engine import ChoiceDomain, ExecutionContext
from .trace import MemViolation

OUT_OF_BOUNDS = "out-of-bounds"
USE_AFTER_FREE = "use-after-free"
DOUBLE_FREE = "double-free"
UNINITIALIZED_READ = "uninitialized-read"

WORD_SIZE = 8

_BYTE = ChoiceDomain.byte()


@dataclass(frozen=True)
class BufferRef:
    id: int
    label: str = ""

    def __str__(self) -> str:
        return f"buf#{self.id}({self.label})" if self.label else f"buf#{self.id}"


@dataclass(eq=False)
class TrackedBuffer:
    ref: BufferRef
    size: int
    cells: list = field(repr=False)
    taint_armed: bool = False
    taint_dirty: bool = False
    freed: bool = False

    @property
    def init_mask(self) -> list[bool]:
        return [c is not None for c in self.cells]


def alloc(ctx: ExecutionContext, size: int, label: str = "") -> BufferRef:
    if size < 0:
        raise ValueError(f"negative allocation size {size}")
    ref = BufferRef(ctx.next_id(), label)
    ctx.memory[ref] = TrackedBuffer(ref, size, [None] * size)
    return ref


def buffer(ctx: ExecutionContext, ref: BufferRef) -> TrackedBuffer:
    try:
        return ctx.memory[ref]
    except KeyError:
        raise KeyError(f"{ref} was not allocated on this path") from None


def _violate(ctx, error, ref, offset, length, size):
    ctx.fail(MemViolation(error, str(ref), offset, length, size))


def _checked(ctx: ExecutionContext, ref: Optional[BufferRef], offset: int, length: int) -> TrackedBuffer:
    if ref is None:
        _violate(ctx, OUT_OF_BOUNDS, "NULL", offset, length, 0)
    buf = buffer(ctx, ref)
    if buf.freed:
        _violate(ctx, USE_AFTER_FREE, ref, offset, length, buf.size)
    if offset < 0 or length < 0 or offset + length > buf.size:
        _violate(ctx, OUT_OF_BOUNDS, ref, offset, length, buf.size)
    return buf


def free(ctx: ExecutionContext, ref: Optional[BufferRef]):
    if ref is None:
        return
    buf = buffer(ctx, ref)
    if buf.freed:
        _violate(ctx, DOUBLE_FREE, ref, 0, 0, buf.size)
    buf.freed = True


def is_deref(ctx: ExecutionContext, ref: Optional[BufferRef], n: int) -> bool:
    """True iff ``n`` bytes from offset 0 of ``ref`` may be accessed."""
    return is_deref_range(ctx, ref, 0, n)


def is_deref_range(ctx: ExecutionContext, ref: Optional[BufferRef], offset: int, n: int) -> bool:
    if ref is None:
        return False
    buf = buffer(ctx, ref)
    return not buf.freed and offset >= 0 and n >= 0 and offset + n <= buf.size


def memhavoc(ctx: ExecutionContext, ref: BufferRef):
    buf = _checked(ctx, ref, 0, 0)
    gen = ctx.next_id()
    buf.cells[:] = [(gen, i) for i in range(buf.size)]


def reset_modified(ctx: ExecutionContext, ref: BufferRef):
    buf = _checked(ctx, ref, 0, 0)
    buf.taint_armed = True
    buf.taint_dirty = False


def is_modified(ctx: ExecutionContext, ref: BufferRef) -> bool:
    return _checked(ctx, ref, 0, 0).taint_dirty


def _store(buf: TrackedBuffer, offset: int, cells: list):
    buf.cells[offset:offset + len(cells)] = cells
    if buf.taint_armed and cells:
        buf.taint_dirty = True


def _materialize(ctx: ExecutionContext, cell) -> int:
    value = ctx.havoc_values.get(cell)
    if value is None:
        gen, off = cell
        value = ctx.choose(_BYTE, f"havoc#{gen}[{off}]")
        ctx.havoc_values[cell] = value
    return value


def _check_init(ctx, buf: TrackedBuffer, offset: int, length: int):
    if ctx.cfg.strict_uninit and None in buf.cells[offset:offset + length]:
        _violate(ctx, UNINITIALIZED_READ, buf.ref, offset, length, buf.size)


def mem_read(ctx: ExecutionContext, ref: BufferRef, offset: int, length: int) -> bytes:
    buf = _checked(ctx, ref, offset, length)
    _check_init(ctx, buf, offset, length)
    out = bytearray()
    for i in range(offset, offset + length):
        cell = buf.cells[i]
        if cell is None:
            # lenient mode: an uninitialized byte reads as a fresh havoc byte
            cell = buf.cells[i] = (ctx.next_id(), i)
        if isinstance(cell, tuple):
            cell = buf.cells[i] = _materialize(ctx, cell)
        out.append(cell)
    return bytes(out)


def mem_probe(ctx: ExecutionContext, ref: BufferRef, offset: int, length: int):
    """Check a read of ``length`` bytes without materializing havoc contents."""
    buf = _checked(ctx, ref, offset, length)
    _check_init(ctx, buf, offset, length)


def mem_write(ctx: ExecutionContext, ref: BufferRef, offset: int, data: Iterable[int]):
    data = list(data)
    buf = _checked(ctx, ref, offset, len(data))
    if any(not 0 <= b <= 255 for b in data):
        raise ValueError("bytes must be in 0..255")
    _store(buf, offset, data)


def mem_copy(
    ctx: ExecutionContext,
    dst: BufferRef,
    src: BufferRef,
    length: int,
    *,
    dst_offset: int = 0,
    src_offset: int = 0,
):
    sbuf = _checked(ctx, src, src_offset, length)
    dbuf = _checked(ctx, dst, dst_offset, length)
    _check_init(ctx, sbuf, src_offset, length)
    _store(dbuf, dst_offset, sbuf.cells[src_offset:src_offset + length])


def initialized_prefix(ctx: ExecutionContext, ref: BufferRef) -> int:
    """Number of leading initialized bytes of ``ref``."""
    buf = _checked(ctx, ref, 0, 0)
    for i, cell in enumerate(buf.cells):
        if cell is None:
            return i
    return buf.size


def store_word(ctx: ExecutionContext, ref: BufferRef, value: int, offset: int = 0):
    """Store an unsigned machine word (a ``size_t`` out-parameter, say)."""
    mem_write(ctx, ref, offset, (value % (1 << 64)).to_bytes(WORD_SIZE, "little"))


def load_word(ctx: ExecutionContext, ref: BufferRef, offset: int = 0) -> int:
    return int.from_bytes(mem_read(ctx, ref, offset, WORD_SIZE), "little")


def leaked(ctx: ExecutionContext, label: Optional[str] = None) -> list[BufferRef]:
    """Buffers still allocated on this path, optionally filtered by label."""
    return [
        ref
        for ref, buf in ctx.memory.items()
        if not buf.freed and (label is None or ref.label == label)
    ]
