"""Small end-to-end programs: ping, a calculator, fan-in and a stream.

Each returns a :class:`DemoOutcome`: exit code 0 when the protocol ran to
completion, 1 when a session was cancelled along the way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import (
    Choice,
    End,
    Recv,
    Send,
    cancel,
    choose_label,
    close,
    fork,
    offer_labels,
    rec,
    recv,
    select_mut,
    send,
    unwrap,
)
from .errors import Cancelled

OK = 0
CANCELLED = 1
USAGE = 2


@dataclass
class DemoOutcome:
    exit_code: int
    lines: list[str] = field(default_factory=list)

    @property
    def stdout(self) -> str:
        return "".join(f"{line}\n" for line in self.lines)


SqrSrv = Recv(int, Send(int, End))
NegSrv = Recv(int, Send(int, End))


class CalcOp(Choice):
    Sqr = SqrSrv
    Neg = NegSrv


CalcSrv = Recv(CalcOp, End)
CalcCli = CalcSrv.dual()

IntStream = rec(lambda s: Send(int, s))


def ping(cancel_child: bool = False) -> DemoOutcome:
    def child(s):
        if cancel_child:
            cancel(s)
            return True
        return close(send(None, s))

    s = fork(Send(None, End), child)
    received = recv(s)
    if received is None:
        return DemoOutcome(CANCELLED)
    _, s = received
    if close(s) is None:
        return DemoOutcome(CANCELLED)
    return DemoOutcome(OK, ["pong"])


def _answer(compute):
    def handler(s) -> Optional[bool]:
        x, s = unwrap(recv(s))
        return close(send(compute(x), s))

    return handler


def calc_server(s) -> Optional[bool]:
    return offer_labels(
        s,
        Sqr=_answer(lambda x: x * x),
        Neg=_answer(lambda x: -x),
    )


def calc_client(s, op: str, x: int) -> Optional[int]:
    s = choose_label(CalcOp.labels[op.capitalize()], s)
    s = send(x, s)
    try:
        z, s = unwrap(recv(s))
        unwrap(close(s))
    except Cancelled:
        return None
    return z


def calc(op: str, x: int) -> DemoOutcome:
    z = calc_client(fork(CalcSrv, calc_server), op, x)
    if z is None:
        return DemoOutcome(CANCELLED)
    return DemoOutcome(OK, [str(z)])


def fanin(n: int) -> DemoOutcome:
    def sender(i: int):
        def run(s):
            return close(send(i, s))

        return run

    pool = [fork(Send(int, End), sender(i)) for i in range(n)]
    lines = []
    while pool:
        received = select_mut(pool)
        if received is None:
            return DemoOutcome(CANCELLED, lines)
        i, s = received
        lines.append(str(i))
        close(s)
    return DemoOutcome(OK, lines)


def stream(n: int) -> DemoOutcome:
    def producer(s):
        for i in range(n):
            s = send(i, s)
        cancel(s)
        return True

    s = fork(IntStream, producer)
    lines = []
    for _ in range(n):
        received = recv(s)
        if received is None:
            return DemoOutcome(CANCELLED, lines)
        i, s = received
        lines.append(str(i))
    cancel(s)
    return DemoOutcome(OK, lines)
