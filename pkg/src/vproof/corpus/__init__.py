"""Worked unit proofs, registered for the ``vproof`` CLI."""

from __future__ import annotations

from ..report import Verdict
from ..runner import ProofEntry, Registry
from . import ssl, trusty, water


def corpus_entries() -> list[ProofEntry]:
    return [
        ProofEntry(
            "water",
            "pour until qty reached; p >= qty on every terminating path",
            water.make_water_proof(),
            config=water.CONFIG,
            expected=Verdict.PASS,
        ),
        ProofEntry(
            "do_handle_msg.fake",
            "do_handle_msg against an operational fake channel table",
            trusty.make_fake_proof(),
            expected=Verdict.PASS,
        ),
        ProofEntry(
            "do_handle_msg.summary",
            "do_handle_msg against stateless summaries (too weak: fails)",
            trusty.make_summary_proof(),
            expected=Verdict.FAIL,
        ),
        ProofEntry(
            "do_handle_msg.mock",
            "do_handle_msg against summaries plus recorded message size",
            trusty.make_mock_proof(),
            expected=Verdict.PASS,
        ),
        ProofEntry(
            "do_handle_msg.vmock_manual",
            "the DSL mock environment written out by hand",
            trusty.make_manual_vmock_proof(),
            expected=Verdict.PASS,
        ),
        ProofEntry(
            "do_handle_msg.vmock",
            "do_handle_msg against the expectation-DSL mock environment",
            trusty.make_vmock_proof(),
            expected=Verdict.PASS,
        ),
        ProofEntry(
            "ssl_fetch_input",
            "record fetch loop over a bounds-checking ssl_recv_fn mock",
            ssl.make_ssl_fetch_input_proof(),
            expected=Verdict.PASS,
        ),
        ProofEntry(
            "ssl_fetch_input.recv_error",
            "record fetch loop when ssl_recv_fn only ever fails",
            ssl.make_ssl_fetch_input_proof(recv_returns=(-1,), name="ssl_fetch_input.recv_error"),
            expected=Verdict.PASS,
        ),
    ]


def corpus_registry() -> Registry:
    return Registry(corpus_entries())
