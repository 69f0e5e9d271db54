"""Binary and labelled choice.

Both are derived from the core operations: choosing creates a session for
the selected branch, sends the offerer's endpoint of it wrapped in a tag,
and cancels the leftover ``End`` continuation instead of closing it.
Offering receives the tag, cancels its own continuation likewise, and
dispatches on the tag. Because each side cancels rather than closes, the
pairing behaves like an asynchronous close; pairing a chooser with a
hand-written offer that *closes* its continuation makes that close fail.

Labelled choice works on any :class:`Choice` subclass whose variants are
all session types::

    class CalcOp(Choice):
        Sqr = Recv(int, Send(int, End))
        Neg = Recv(int, Send(int, End))

    CalcSrv = Recv(CalcOp, End)
"""

from __future__ import annotations

import types
from typing import Any, Callable, ClassVar, Mapping, Optional, TypeVar

from .core import Endpoint, SendEndpoint, RecvEndpoint, Wrapped, _new_session, cancel, recv, send
from .errors import Cancelled, ProtocolError
from .protocol import End, Either, Protocol, Send

__all__ = [
    "Choice",
    "Label",
    "Left",
    "Right",
    "choose_label",
    "choose_left",
    "choose_right",
    "offer_either",
    "offer_labels",
]

R = TypeVar("R")


class Left(Wrapped):
    """The left branch of an :class:`~affine_sessions.protocol.Either`."""

    __slots__ = ()

    def _fits(self, ptype: Any) -> bool:
        return isinstance(ptype, Either) and self.endpoint.protocol == ptype.left

    def __repr__(self) -> str:
        return f"Left({self.endpoint!r})"


class Right(Wrapped):
    """The right branch of an :class:`~affine_sessions.protocol.Either`."""

    __slots__ = ()

    def _fits(self, ptype: Any) -> bool:
        return isinstance(ptype, Either) and self.endpoint.protocol == ptype.right

    def __repr__(self) -> str:
        return f"Right({self.endpoint!r})"


def _choice_payload(endpoint: Any, op: str) -> Any:
    if not isinstance(endpoint, SendEndpoint):
        raise ProtocolError(f"{op}() needs a SendEndpoint, got {endpoint!r}")
    protocol = endpoint.protocol
    assert isinstance(protocol, Send)
    if protocol.cont is not End:
        raise ProtocolError(f"{op}() needs a choice protocol ending in End, got {protocol!r}")
    return protocol.payload


def choose_left(endpoint: SendEndpoint) -> Endpoint:
    """Select the left branch of a ``Choose(left, right)`` session."""
    either = _choice_payload(endpoint, "choose_left")
    if not isinstance(either, Either):
        raise ProtocolError(f"choose_left() needs a Choose protocol, got {endpoint.protocol!r}")
    here, there = _new_session(either.left.dual())
    rest = send(Left(there), endpoint)
    cancel(rest)
    return here


def choose_right(endpoint: SendEndpoint) -> Endpoint:
    """Select the right branch of a ``Choose(left, right)`` session."""
    either = _choice_payload(endpoint, "choose_right")
    if not isinstance(either, Either):
        raise ProtocolError(f"choose_right() needs a Choose protocol, got {endpoint.protocol!r}")
    here, there = _new_session(either.right.dual())
    rest = send(Right(there), endpoint)
    cancel(rest)
    return here


def _run_branch(process: Callable[[Endpoint], Optional[R]], endpoint: Endpoint) -> Optional[R]:
    try:
        return process(endpoint)
    except Cancelled:
        return None


def offer_either(
    endpoint: RecvEndpoint,
    left: Callable[[Endpoint], Optional[R]],
    right: Callable[[Endpoint], Optional[R]],
) -> Optional[R]:
    """Wait for the peer's choice and run ``left`` or ``right`` on the
    selected branch. Returns the branch's result, or ``None`` if the peer
    cancelled before choosing."""
    if not isinstance(endpoint, RecvEndpoint) or not isinstance(endpoint.protocol.payload, Either):
        raise ProtocolError(f"offer_either() needs an Offer protocol, got {endpoint!r}")
    received = recv(endpoint)
    if received is None:
        return None
    choice, rest = received
    cancel(rest)
    if isinstance(choice, Left):
        return _run_branch(left, choice.endpoint)
    return _run_branch(right, choice.endpoint)


class Label:
    """A variant of a :class:`Choice`; calling it wraps an endpoint."""

    __slots__ = ("owner", "name", "protocol")

    def __init__(self, owner: type[Choice], name: str, protocol: Protocol) -> None:
        self.owner = owner
        self.name = name
        self.protocol = protocol

    def __call__(self, endpoint: Endpoint) -> Choice:
        if not isinstance(endpoint, Endpoint) or endpoint.protocol != self.protocol:
            raise ProtocolError(f"{self!r} wraps an endpoint of {self.protocol!r}, got {endpoint!r}")
        value = object.__new__(self.owner)
        value.label = self
        value.endpoint = endpoint
        return value

    def __repr__(self) -> str:
        return f"{self.owner.__qualname__}.{self.name}"


_NOT_VARIANTS = (
    types.FunctionType,
    classmethod,
    staticmethod,
    property,
)


class Choice(Wrapped):
    """Base class for labelled sums whose every variant wraps one session.

    Each public class attribute declares a variant and must be a protocol;
    anything else is rejected when the class is defined. Variants hold the
    offering side's protocol, so the chooser continues on its dual.
    """

    __slots__ = ("label",)
    labels: ClassVar[dict[str, Label]] = {}

    def __init_subclass__(cls, **kwargs: Any) -> None:
        super().__init_subclass__(**kwargs)
        if any(base.labels for base in cls.__mro__[1:] if issubclass(base, Choice)):
            raise ProtocolError(f"{cls.__qualname__}: choice types cannot be extended")
        labels: dict[str, Label] = {}
        for name, value in list(vars(cls).items()):
            if name.startswith("_") or isinstance(value, _NOT_VARIANTS):
                continue
            if not isinstance(value, Protocol):
                raise ProtocolError(
                    f"{cls.__qualname__}.{name} must wrap exactly one session type, "
                    f"got {value!r}"
                )
            labels[name] = Label(cls, name, value)
            setattr(cls, name, labels[name])
        if not labels:
            raise ProtocolError(f"{cls.__qualname__} declares no variants")
        cls.labels = labels

    def __init__(self, *args: Any, **kwargs: Any) -> None:
        raise TypeError(
            f"construct {type(self).__qualname__} values through a label, "
            f"e.g. {type(self).__qualname__}.<variant>(endpoint)"
        )

    def _fits(self, ptype: Any) -> bool:
        return type(self) is ptype and self.endpoint.protocol == self.label.protocol

    def __repr__(self) -> str:
        return f"{self.label!r}({self.endpoint!r})"


def choose_label(label: Label, endpoint: SendEndpoint) -> Endpoint:
    """Select the branch ``label`` on a ``Send(SomeChoice, End)`` session and
    return the chooser's endpoint for it (the dual of the variant's protocol)."""
    if not isinstance(label, Label):
        raise ProtocolError(f"choose_label() needs a Choice label, got {label!r}")
    payload = _choice_payload(endpoint, "choose_label")
    if payload is not label.owner:
        raise ProtocolError(f"{label!r} is not a variant of {payload!r}")
    offered, kept = _new_session(label.protocol)
    rest = send(label(offered), endpoint)
    cancel(rest)
    return kept


def offer_labels(
    endpoint: RecvEndpoint,
    handlers: Mapping[Any, Callable[[Endpoint], Optional[R]]] | None = None,
    /,
    **named: Callable[[Endpoint], Optional[R]],
) -> Optional[R]:
    """Wait for the peer's choice and run the handler bound to its label.

    Handlers are given by label name as keyword arguments or as a mapping
    keyed by :class:`Label` or name. They must cover every variant exactly
    once; this is checked before anything is received. The order in which
    they are written is irrelevant, only the labels bind.
    """
    if not isinstance(endpoint, RecvEndpoint):
        raise ProtocolError(f"offer_labels() needs a RecvEndpoint, got {endpoint!r}")
    sum_type = endpoint.protocol.payload
    if not (isinstance(sum_type, type) and issubclass(sum_type, Choice)) or sum_type is Choice:
        raise ProtocolError(f"offer_labels() needs a Choice protocol, got {endpoint.protocol!r}")
    table = _dispatch_table(sum_type, {**(handlers or {}), **named})
    received = recv(endpoint)
    if received is None:
        return None
    choice, rest = received
    cancel(rest)
    return _run_branch(table[choice.label.name], choice.endpoint)


def _dispatch_table(sum_type: type[Choice], given: Mapping[Any, Callable]) -> dict[str, Callable]:
    table: dict[str, Callable] = {}
    for key, handler in given.items():
        if isinstance(key, Label):
            if key.owner is not sum_type:
                raise ProtocolError(f"{key!r} is not a variant of {sum_type.__qualname__}")
            name = key.name
        elif key in sum_type.labels:
            name = key
        else:
            raise ProtocolError(f"{sum_type.__qualname__} has no variant {key!r}")
        if name in table:
            raise ProtocolError(f"two handlers for {sum_type.__qualname__}.{name}")
        table[name] = handler
    missing = [name for name in sum_type.labels if name not in table]
    if missing:
        raise ProtocolError(
            f"offer on {sum_type.__qualname__} is missing handlers for: {', '.join(missing)}"
        )
    return table
