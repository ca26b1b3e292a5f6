"""Unit proofs with verification mocks, checked by bounded exploration."""

from .engine import (
    ByteProfile,
    ChoiceDomain,
    DomainError,
    ExecutionContext,
    ExploreConfig,
    ReplayError,
    assume,
    domain,
    explore,
    nd_value,
    replay,
    sassert,
    trail_of,
)
from .memory import (
    BufferRef,
    alloc,
    free,
    is_deref,
    is_modified,
    mem_copy,
    mem_probe,
    mem_read,
    mem_write,
    memhavoc,
    reset_modified,
)
from .mock import (
    AnyNumber,
    Cardinality,
    EnvCell,
    Eq,
    ExpectationBuilder,
    ExpectationError,
    ExpectationRecord,
    Geq,
    Gt,
    Leq,
    Lt,
    MockHandle,
    MockScope,
    Signature,
    nd,
    skeletal_call,
)
from .report import ProofReport, Verdict, render_trace
from .runner import ProofEntry, Registry, run

__version__ = "0.1.0"
