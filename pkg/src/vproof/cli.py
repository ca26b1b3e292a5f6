"""Command line entry point: ``vproof list`` and ``vproof run``."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .engine import ByteProfile, DomainError, ExploreConfig
from .report import render_json, render_text
from .runner import EXIT_USAGE, Registry, RegistryError, run


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _profile(text: str) -> ByteProfile:
    try:
        return ByteProfile.parse(text)
    except DomainError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="vproof", description="Explore and check registered unit proofs.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("list", help="list registered proofs")
    r = sub.add_parser("run", help="run proofs")
    r.add_argument("--filter", metavar="GLOB", help="only run proofs whose name matches GLOB")
    r.add_argument("--max-depth", type=_positive, help="choice points per path")
    r.add_argument("--max-paths", type=_positive, help="paths per proof before giving up")
    r.add_argument("--byte-profile", type=_profile, metavar="small|full|sample:K")
    r.add_argument("--seed", type=int)
    r.add_argument("--strict-depth", action="store_true", default=None,
                   help="count depth-exhausted paths as failures")
    r.add_argument("--fail-fast", action="store_true", default=None)
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.add_argument("--jobs", type=_positive, default=1, help="proofs explored concurrently")
    return parser


def _overrides(args) -> dict:
    keys = ("max_depth", "max_paths", "byte_profile", "seed", "strict_depth", "fail_fast")
    return {k: getattr(args, k) for k in keys if getattr(args, k) is not None}


def main(argv=None, registry: Registry = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    if registry is None:
        from .corpus import corpus_registry

        registry = corpus_registry()

    if args.command == "list":
        for entry in registry:
            print(f"{entry.name:<36} {entry.description}", file=out)
        return 0

    overrides = _overrides(args)
    base = ExploreConfig()
    try:
        status, reports = run(registry, args.filter, base, overrides, workers=args.jobs)
    except RegistryError as exc:
        print(f"vproof: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.format == "json":
        print(render_json(reports, dataclasses.replace(base, **overrides).to_dict()), file=out)
    else:
        print(render_text(reports), file=out)
    return status


if __name__ == "__main__":
    sys.exit(main())
