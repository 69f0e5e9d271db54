"""Command-line entry point: ``demo ping|calc|fanin|stream``."""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import demos

INT32_MIN = -(2**31)
INT32_MAX = 2**31 - 1


def _int32(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not INT32_MIN <= value <= INT32_MAX:
        raise argparse.ArgumentTypeError(f"{value} does not fit in 32 bits")
    return value


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="demo", description="Session-typed channel demos.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ping", help="a child sends a ping, the parent prints pong")
    p.add_argument("--cancel", action="store_true", help="the child cancels instead of pinging")

    p = sub.add_parser("calc", help="ask a forked calculator server to square or negate")
    p.add_argument("op", choices=["sqr", "neg"])
    p.add_argument("x", type=_int32)

    p = sub.add_parser("fanin", help="select over n senders and print what arrives")
    p.add_argument("n", type=_positive)

    p = sub.add_parser("stream", help="receive 0..n-1 over a recursive protocol")
    p.add_argument("n", type=_positive)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "ping":
        outcome = demos.ping(cancel_child=args.cancel)
    elif args.command == "calc":
        outcome = demos.calc(args.op, args.x)
    elif args.command == "fanin":
        outcome = demos.fanin(args.n)
    else:
        outcome = demos.stream(args.n)
    sys.stdout.write(outcome.stdout)
    sys.stdout.flush()
    if outcome.exit_code:
        print(f"demo {args.command}: session cancelled", file=sys.stderr)
    return outcome.exit_code


if __name__ == "__main__":
    sys.exit(main())
