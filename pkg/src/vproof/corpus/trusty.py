"""IPC message handling: one SUT, four environment styles.

``do_handle_msg`` reads a pending message from a channel into a fresh
buffer and hands it to an application handler. The unit proof checks
memory safety and that the SUT does not modify the message before the
handler sees it.

The same SUT and harness run against

* a fake: an operational channel table,
* function summaries: stateless, nondeterministic outputs,
* a mock: summaries plus the one piece of state the SUT relies on,
* the mock again, written with the expectation DSL (and once more by hand
  with the same semantics, for comparison).

The summaries are too weak: ``read_msg`` may deliver more bytes than
``get_msg`` announced, and the handler's length-consistency check catches it.

Unbounded nondeterministic values are scaled to small explicit sets:
message lengths ``{0, 1, MAX_SIZE}``, error codes ``{-1, 0}``, channel ids
``{1, 2}``.
"""

from __future__ import annotations

from types import SimpleNamespace

from ..engine import ChoiceDomain, assume, nd_value, sassert
from ..memory import (
    WORD_SIZE,
    alloc,
    free,
    initialized_prefix,
    is_modified,
    load_word,
    mem_copy,
    mem_probe,
    mem_write,
    memhavoc,
    reset_modified,
    store_word,
)
from ..trace import summarize_arg
from ..mock import EnvCell, Eq, ExpectationBuilder, Lt, MockScope, Signature, nd

MAX_SIZE = 4096
MAX_CHANNELS = 10
ERROR = -1

MSG_LENGTHS = ChoiceDomain.explicit((0, 1, MAX_SIZE))
ERR_CODES = ChoiceDomain.explicit((-1, 0))
CHANNEL_IDS = ChoiceDomain.explicit((1, 2))
BOOL = ChoiceDomain.explicit((0, 1))

MSG_LABEL = "msg"

# Faults injected into the SUT by the mutation tests.
MUTATE_MSG = "mutate_msg"
READ_BEFORE_GET = "read_before_get"
DROP_PUT = "drop_put"


def _handle(ctx, env, msg_handler, chan, fault=None):
    msg = alloc(ctx, MAX_SIZE, MSG_LABEL)
    msg_len = alloc(ctx, WORD_SIZE, "msg_len")

    def free_and_ret(rc):
        free(ctx, msg)
        return rc

    if fault == READ_BEFORE_GET:
        rc = env.read_msg(ctx, chan, msg)
        rc = env.get_msg(ctx, chan, msg_len)
    else:
        rc = env.get_msg(ctx, chan, msg_len)
        if rc < 0:
            return free_and_ret(ERROR)
        rc = env.read_msg(ctx, chan, msg)
    if fault != DROP_PUT:
        env.put_msg(ctx, chan)
    if rc < 0:
        return free_and_ret(ERROR)
    # (size_t) rc: rc >= 0 here, so the unsigned cast keeps its value
    if rc % (1 << 64) < load_word(ctx, msg_len):
        return free_and_ret(ERROR)
    if fault == MUTATE_MSG:
        mem_write(ctx, msg, 0, [0x41])
    rc = msg_handler(ctx, msg, load_word(ctx, msg_len))
    return free_and_ret(rc)


def do_handle_msg(ctx, env, msg_handler, chan):
    return _handle(ctx, env, msg_handler, chan)


def make_msg_handler(consistency_check=True):
    def test_msg_handler(ctx, msg, msg_size):
        sassert(ctx, not is_modified(ctx, msg), "msg not modified", site="test_msg_handler:is_modified")
        # the application consumes the whole message
        mem_probe(ctx, msg, 0, msg_size)
        if consistency_check:
            sassert(
                ctx,
                initialized_prefix(ctx, msg) == msg_size,
                "delivered bytes match announced length",
                site="test_msg_handler:length",
            )
        return nd_value(ctx, ERR_CODES, "handler.ret")

    return test_msg_handler


def make_harness(env, handler=None, channels=2, fault=None):
    handler = handler or make_msg_handler()

    def main(ctx):
        for _ in range(channels):
            env.create_channel(ctx)
        chan = env.wait_for_msg(ctx)
        _handle(ctx, env, handler, chan, fault)

    return main


def _call(ctx, name, *args):
    ctx.record_call(name, name, ", ".join(map(summarize_arg, args)))


class FakeEnv:
    """Channel table with one pending, havocked message per channel."""

    def __init__(self, msg_lengths=MSG_LENGTHS):
        self.msg_lengths = msg_lengths
        self.next_channel = EnvCell("fake.g_next_available_channel", 0)
        self.processed = EnvCell("fake.g_already_processed_channel", 0)
        self.msgs = EnvCell("fake.msgs", ((None, 0),) * MAX_CHANNELS)

    def create_channel(self, ctx):
        _call(ctx, "create_channel")
        chan = self.next_channel.get(ctx)
        sassert(ctx, chan < MAX_CHANNELS, "channel table full")
        length = nd_value(ctx, self.msg_lengths, "create_channel.len")
        buf = alloc(ctx, length, "chan_msg")
        memhavoc(ctx, buf)
        self.next_channel.set(ctx, chan + 1)
        msgs = list(self.msgs.get(ctx))
        msgs[chan] = (buf, length)
        self.msgs.set(ctx, tuple(msgs))
        return chan

    def wait_for_msg(self, ctx):
        _call(ctx, "wait_for_msg")
        chan = nd_value(ctx, ChoiceDomain.integer_range(0, MAX_CHANNELS - 1), "wait_for_msg.chan")
        assume(ctx, self.processed.get(ctx) < chan < self.next_channel.get(ctx))
        return chan

    def get_msg(self, ctx, chan, len_ref):
        _call(ctx, "get_msg", chan, len_ref)
        err = nd_value(ctx, ERR_CODES, "get_msg.err")
        if err < 0:
            return err
        sassert(ctx, 0 < chan < MAX_CHANNELS and len_ref is not None, "get_msg pre")
        store_word(ctx, len_ref, self.msgs.get(ctx)[chan][1])
        return 0

    def read_msg(self, ctx, chan, msg):
        _call(ctx, "read_msg", chan, msg)
        sassert(ctx, 0 < chan < self.next_channel.get(ctx) and msg is not None, "read_msg pre")
        buf, length = self.msgs.get(ctx)[chan]
        mem_copy(ctx, msg, buf, length)
        reset_modified(ctx, msg)
        return length

    def put_msg(self, ctx, chan):
        _call(ctx, "put_msg", chan)
        sassert(ctx, 0 < chan < self.next_channel.get(ctx), "put_msg pre")
        err = nd_value(ctx, ERR_CODES, "put_msg.err")
        if err < 0:
            return err
        free(ctx, self.msgs.get(ctx)[chan][0])
        self.processed.set(ctx, self.processed.get(ctx) + 1)
        return 0


class SummaryEnv:
    """Stateless summaries: each call returns fresh nondeterministic values."""

    def create_channel(self, ctx):
        _call(ctx, "create_channel")
        return nd_value(ctx, CHANNEL_IDS, "create_channel.ret")

    def wait_for_msg(self, ctx):
        _call(ctx, "wait_for_msg")
        return nd_value(ctx, CHANNEL_IDS, "wait_for_msg.ret")

    def get_msg(self, ctx, chan, len_ref):
        _call(ctx, "get_msg", chan, len_ref)
        sassert(ctx, chan > 0 and len_ref is not None, "get_msg pre")
        store_word(ctx, len_ref, nd_value(ctx, MSG_LENGTHS, "get_msg.len"))
        return nd_value(ctx, ERR_CODES, "get_msg.ret")

    def read_msg(self, ctx, chan, msg):
        _call(ctx, "read_msg", chan, msg)
        sassert(ctx, chan > 0 and msg is not None, "read_msg pre")
        buf = alloc(ctx, MAX_SIZE, "read_msg.buf")
        memhavoc(ctx, buf)
        length = nd_value(ctx, MSG_LENGTHS, "read_msg.len")
        assume(ctx, length < MAX_SIZE)
        mem_copy(ctx, msg, buf, length)
        reset_modified(ctx, msg)
        free(ctx, buf)  # stack array goes out of scope
        return -1 if nd_value(ctx, BOOL, "read_msg.fail") else length

    def put_msg(self, ctx, chan):
        _call(ctx, "put_msg", chan)
        sassert(ctx, chan > 0, "put_msg pre")
        return nd_value(ctx, ERR_CODES, "put_msg.ret")


class MockEnv(SummaryEnv):
    """Summaries plus the message size recorded by ``get_msg``."""

    def __init__(self):
        self.msg_size = EnvCell("mock.g_msg_size", 0)

    def get_msg(self, ctx, chan, len_ref):
        _call(ctx, "get_msg", chan, len_ref)
        sassert(ctx, chan > 0 and len_ref is not None, "get_msg pre")
        size = nd_value(ctx, MSG_LENGTHS, "get_msg.len")
        self.msg_size.set(ctx, size)
        store_word(ctx, len_ref, size)
        return nd_value(ctx, ERR_CODES, "get_msg.ret")

    def read_msg(self, ctx, chan, msg):
        _call(ctx, "read_msg", chan, msg)
        sassert(ctx, chan > 0 and msg is not None, "read_msg pre")
        buf = alloc(ctx, MAX_SIZE, "read_msg.buf")
        memhavoc(ctx, buf)
        length = nd_value(ctx, MSG_LENGTHS, "read_msg.len")
        assume(ctx, length <= self.msg_size.get(ctx))
        mem_copy(ctx, msg, buf, length)
        reset_modified(ctx, msg)
        free(ctx, buf)
        return length


class ManualVMockEnv:
    """The DSL mock's behaviour written out by hand, checks included."""

    def __init__(self):
        self.msg_size = EnvCell("manual.g_msg_size", 0)
        self.get_calls = EnvCell("manual.get_msg_calls", 0)
        self.read_calls = EnvCell("manual.read_msg_calls", 0)

    def create_channel(self, ctx):
        _call(ctx, "create_channel")
        return nd_value(ctx, CHANNEL_IDS, "create_channel.ret")

    def wait_for_msg(self, ctx):
        _call(ctx, "wait_for_msg")
        return nd_value(ctx, CHANNEL_IDS, "wait_for_msg.ret")

    def get_msg(self, ctx, chan, len_ref):
        _call(ctx, "get_msg", chan, len_ref)
        self.get_calls.set(ctx, self.get_calls.get(ctx) + 1)
        size = nd_value(ctx, MSG_LENGTHS, "get_msg.len")
        store_word(ctx, len_ref, size)
        self.msg_size.set(ctx, size)
        return nd_value(ctx, ERR_CODES, "get_msg.ret")

    def read_msg(self, ctx, chan, msg):
        _call(ctx, "read_msg", chan, msg)
        self.read_calls.set(ctx, self.read_calls.get(ctx) + 1)
        sassert(ctx, self.get_calls.get(ctx) >= 1, "read_msg after get_msg")
        size = self.msg_size.get(ctx)
        blob = alloc(ctx, size, "blob")
        memhavoc(ctx, blob)
        sassert(ctx, msg is not None, "read_msg msg")
        mem_copy(ctx, msg, blob, size)
        reset_modified(ctx, msg)
        return size

    def put_msg(self, ctx, chan):
        _call(ctx, "put_msg", chan)
        return nd_value(ctx, ERR_CODES, "put_msg.ret")

    def post_checks(self, ctx):
        sassert(ctx, self.get_calls.get(ctx) == 1, "get_msg called once")
        sassert(ctx, self.read_calls.get(ctx) < 2, "read_msg called at most once")


def make_vmock_env(name="do_handle_msg.vmock"):
    """Build the DSL environment; returns (scope, env namespace)."""
    scope = MockScope(name)
    g_msg_size = scope.cell("g_msg_size", 0)

    def set_ptr_fn_get_msg(ctx, len_ref):
        size = nd_value(ctx, MSG_LENGTHS, "get_msg.len")
        store_word(ctx, len_ref, size)
        g_msg_size.set(ctx, size)

    def set_ptr_fn_read_msg(ctx, msg):
        size = g_msg_size.get(ctx)
        blob = alloc(ctx, size, "blob")
        memhavoc(ctx, blob)
        sassert(ctx, msg is not None, "read_msg msg")
        mem_copy(ctx, msg, blob, size)
        reset_modified(ctx, msg)

    get_msg_expectations = (
        ExpectationBuilder()
        .times(Eq(1))
        .returnFn(nd(ERR_CODES, "get_msg.ret"))
        .captureArgAndInvoke(1, set_ptr_fn_get_msg)
        .build()
    )
    read_msg_expectations = (
        ExpectationBuilder()
        .times(Lt(2))
        .returnFn(scope.wrap_cell(g_msg_size))
        .captureArgAndInvoke(1, set_ptr_fn_read_msg)
        .build()
    )
    get_msg = scope.make_mock("get_msg", Signature("int", ("int", "size_t*")), get_msg_expectations)
    read_msg = scope.make_ordered_mock(
        "read_msg", Signature("int", ("int", "char*")), read_msg_expectations, {get_msg}
    )
    put_msg = scope.lazy_mock("put_msg", Signature("int", ("int",)), ERR_CODES)
    create_channel = scope.lazy_mock("create_channel", Signature("int"), CHANNEL_IDS)
    wait_for_msg = scope.lazy_mock("wait_for_msg", Signature("int"), CHANNEL_IDS)
    scope.setup_post_checks([get_msg, read_msg, put_msg])
    env = SimpleNamespace(
        create_channel=create_channel,
        wait_for_msg=wait_for_msg,
        get_msg=get_msg,
        read_msg=read_msg,
        put_msg=put_msg,
    )
    return scope, env


def make_fake_proof(channels=2, fault=None, msg_lengths=MSG_LENGTHS):
    return make_harness(FakeEnv(msg_lengths), channels=channels, fault=fault)


def make_summary_proof(consistency_check=True, fault=None):
    return make_harness(SummaryEnv(), make_msg_handler(consistency_check), fault=fault)


def make_mock_proof(fault=None):
    return make_harness(MockEnv(), fault=fault)


def make_manual_vmock_proof(fault=None):
    env = ManualVMockEnv()
    main = make_harness(env, fault=fault)

    def proof(ctx):
        ctx.on_complete(env.post_checks)
        main(ctx)

    return proof


def make_vmock_proof(fault=None):
    scope, env = make_vmock_env()
    return scope.unit_proof(make_harness(env, fault=fault))
