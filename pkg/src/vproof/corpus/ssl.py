"""Receive-callback mock for a TLS record reader.

The mock for ``ssl_recv_fn`` checks that the buffer it is handed can hold
``len`` bytes and returns either an error (``<= 0``) or at least the number
of bytes the harness asked for through ``set_min_recv_bytes``. A toy
``ssl_fetch_input`` loops on the callback until enough input is buffered.
"""

from __future__ import annotations

from ..engine import ChoiceDomain, assume, nd_value, sassert
from ..memory import alloc, is_deref
from ..mock import ExpectationBuilder, Lt, MockScope, Signature

ERR_CONN_EOF = -0x7280
RECV_RETURNS = (-1, 0, 1, 3, 4, 16)
BUF_LEN = 16
MIN_BYTES = 4


def ssl_fetch_input(ctx, recv, buf, nb_want):
    """Fill ``buf`` with at least ``nb_want`` bytes; return the count or an error."""
    have = 0
    while have < nb_want:
        ret = recv(ctx, None, buf, nb_want - have)
        if ret == 0:
            return ERR_CONN_EOF
        if ret < 0:
            return ret
        have += ret
    return have


def make_ssl_fetch_input_proof(
    buf_len=BUF_LEN, min_bytes=MIN_BYTES, recv_returns=RECV_RETURNS, name="ssl_fetch_input"
):
    scope = MockScope(name)
    nb_bytes = scope.cell("nb_bytes", 0)
    ret_domain = ChoiceDomain.explicit(recv_returns)

    def invoke_fn_ssl_recv(ctx, _ssl_ctx, buf, length):
        if buf is not None:
            sassert(ctx, is_deref(ctx, buf, length), "is_deref(buf, len)", site="ssl_recv_fn")
        ret = nd_value(ctx, ret_domain, "ssl_recv_fn.ret")
        assume(ctx, ret <= 0 or ret >= nb_bytes.get(ctx))
        return ret

    expectations = ExpectationBuilder().times(Lt(2)).invokeFn(invoke_fn_ssl_recv).build()
    recv = scope.make_mock(
        "ssl_recv_fn", Signature("int", ("void*", "unsigned char*", "size_t")), expectations
    )
    scope.setup_post_checks([recv])

    def set_min_recv_bytes(ctx, n):
        nb_bytes.set(ctx, n)

    def proof(ctx):
        buf = alloc(ctx, buf_len, "in_buf")
        set_min_recv_bytes(ctx, min_bytes)
        ret = ssl_fetch_input(ctx, recv, buf, min_bytes)
        sassert(ctx, ret < 0 or ret >= min_bytes, "fetched enough input", site="ssl_fetch_input:post")

    return scope.unit_proof(proof)
