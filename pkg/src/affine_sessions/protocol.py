"""Protocol (session) types.

A protocol is built from three constructors::

    Send(int, Recv(int, End))     # send an int, receive an int, then close
    rec(lambda s: Send(int, s))   # an endless stream of ints

Protocols are plain runtime values. Each one knows its dual, and taking the
dual twice gives back the very same object. Recursive protocols are
represented as cyclic graphs, so equality is decided by bisimulation rather
than by unfolding.

Payload types are ordinary Python types (``None`` stands for the unit
type), other protocols (to send session endpoints), :class:`Either` for
binary choice, or a :class:`~affine_sessions.choice.Choice` subclass for
labelled choice. Payloads are never dualised.
"""

from __future__ import annotations

from typing import Any, Callable

from .errors import ProtocolError

__all__ = [
    "Choose",
    "Either",
    "End",
    "Offer",
    "Protocol",
    "Recv",
    "Send",
    "dual",
    "rec",
]

_HASH_DEPTH = 8


class Protocol:
    """Base class of all protocol types."""

    __slots__ = ("_dual",)

    def dual(self) -> Protocol:
        raise NotImplementedError

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Protocol):
            return NotImplemented
        return _bisimilar(self, other, set())

    def __ne__(self, other: object) -> bool:
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self) -> int:
        return _shape_hash(self, _HASH_DEPTH)

    def __repr__(self) -> str:
        return _show(self, {})


class _Message(Protocol):
    __slots__ = ("payload", "cont")

    def __init__(self, payload: Any, cont: Protocol) -> None:
        if isinstance(cont, _Hole):
            pass
        elif not isinstance(cont, Protocol):
            raise ProtocolError(
                f"the continuation of a session must itself be a session, got {cont!r}"
            )
        self.payload = type(None) if payload is None else payload
        self.cont = cont
        self._dual: Protocol | None = None

    def dual(self) -> Protocol:
        if self._dual is None:
            other = _FLIP[type(self)].__new__(_FLIP[type(self)])
            other.payload = self.payload
            other._dual = self
            self._dual = other
            # Cached before recursing, so cycles terminate.
            other.cont = self.cont.dual()
        return self._dual


class Send(_Message):
    """Send a value of type ``payload``, continue as ``cont``."""

    __slots__ = ()


class Recv(_Message):
    """Receive a value of type ``payload``, continue as ``cont``."""

    __slots__ = ()


_FLIP = {Send: Recv, Recv: Send}


class _EndType(Protocol):
    __slots__ = ()

    def dual(self) -> Protocol:
        return self

    def __reduce__(self) -> str:
        return "End"


End = _EndType()
"""The completed session; closed with :func:`~affine_sessions.close`."""


class Either:
    """Payload type of binary choice: a ``Left`` endpoint of ``left`` or a
    ``Right`` endpoint of ``right``."""

    __slots__ = ("left", "right")

    def __init__(self, left: Protocol, right: Protocol) -> None:
        for side in (left, right):
            if not isinstance(side, (Protocol, _Hole)):
                raise ProtocolError(f"each branch of Either must be a session, got {side!r}")
        self.left = left
        self.right = right

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Either):
            return NotImplemented
        return _bisimilar(self.left, other.left, set()) and _bisimilar(
            self.right, other.right, set()
        )

    def __hash__(self) -> int:
        return hash(("Either", _shape_hash(self.left, 3), _shape_hash(self.right, 3)))

    def __repr__(self) -> str:
        return f"Either({self.left!r}, {self.right!r})"


def Choose(left: Protocol, right: Protocol) -> Send:
    """Make a binary choice, continuing as ``left`` or ``right``.

    The payload carries the offerer's views of both branches, so that
    ``dual(Choose(a, b)) == Offer(dual(a), dual(b))``.
    """
    return Send(Either(left.dual(), right.dual()), End)


def Offer(left: Protocol, right: Protocol) -> Recv:
    """Offer a binary choice between continuing as ``left`` or ``right``."""
    return Recv(Either(left, right), End)


def dual(protocol: Protocol) -> Protocol:
    """Return the protocol followed by the other endpoint."""
    return protocol.dual()


class _Hole:
    __slots__ = ()

    def dual(self) -> Protocol:
        raise ProtocolError("rec() body must not take the dual of its own variable")

    def __repr__(self) -> str:
        return "<rec variable>"


def rec(body: Callable[[Protocol], Protocol]) -> Protocol:
    """Build a recursive protocol.

    ``body`` receives a placeholder standing for the protocol being defined
    and must return a :class:`Send` or :class:`Recv` (recursion has to be
    guarded by a message)::

        IntStream = rec(lambda s: Send(int, s))
    """
    hole = _Hole()
    result = body(hole)  # type: ignore[arg-type]
    if not isinstance(result, _Message):
        raise ProtocolError("a recursive protocol must start with Send or Recv")
    _tie(result, hole, result, set())
    return result


def _tie(node: Any, hole: _Hole, target: Protocol, seen: set[int]) -> None:
    if id(node) in seen:
        return
    seen.add(id(node))
    if isinstance(node, _Message):
        if node._dual is not None:
            raise ProtocolError("rec() body must not take duals of partially built protocols")
        if node.cont is hole:
            node.cont = target
        else:
            _tie(node.cont, hole, target, seen)
        if node.payload is hole:
            node.payload = target
        else:
            _tie(node.payload, hole, target, seen)
    elif isinstance(node, Either):
        for attr in ("left", "right"):
            child = getattr(node, attr)
            if child is hole:
                setattr(node, attr, target)
            else:
                _tie(child, hole, target, seen)


def _bisimilar(a: Protocol, b: Protocol, assumed: set[tuple[int, int]]) -> bool:
    while True:
        if a is b:
            return True
        key = (id(a), id(b))
        if key in assumed:
            return True
        if type(a) is not type(b):
            return False
        if not isinstance(a, _Message):
            return True
        assumed.add(key)
        assert isinstance(b, _Message)
        if not _payload_equal(a.payload, b.payload, assumed):
            return False
        a, b = a.cont, b.cont


def _payload_equal(x: Any, y: Any, assumed: set[tuple[int, int]]) -> bool:
    if x is y:
        return True
    if isinstance(x, Protocol) and isinstance(y, Protocol):
        return _bisimilar(x, y, assumed)
    if isinstance(x, Either) and isinstance(y, Either):
        return _bisimilar(x.left, y.left, assumed) and _bisimilar(x.right, y.right, assumed)
    if isinstance(x, (Protocol, Either)) or isinstance(y, (Protocol, Either)):
        return False
    return bool(x == y)


def _shape_hash(p: Any, depth: int) -> int:
    if depth == 0:
        return 0
    if isinstance(p, _Message):
        return hash(
            (type(p).__name__, _payload_hash(p.payload, depth - 1), _shape_hash(p.cont, depth - 1))
        )
    if isinstance(p, _EndType):
        return hash("End")
    return hash(p)


def _payload_hash(x: Any, depth: int) -> int:
    if isinstance(x, Protocol):
        return _shape_hash(x, min(depth, 3))
    if isinstance(x, Either):
        return hash(("Either", _shape_hash(x.left, min(depth, 3)), _shape_hash(x.right, min(depth, 3))))
    try:
        return hash(x)
    except TypeError:
        return 0


def _show(p: Any, names: dict[int, str]) -> str:
    if isinstance(p, _EndType):
        return "End"
    if isinstance(p, _Message):
        if id(p) in names:
            return names[id(p)]
        names[id(p)] = f"<{type(p).__name__}@{len(names)}>"
        return f"{type(p).__name__}({_show_payload(p.payload, names)}, {_show(p.cont, names)})"
    return repr(p)


def _show_payload(x: Any, names: dict[int, str]) -> str:
    if isinstance(x, Protocol):
        return _show(x, names)
    if isinstance(x, Either):
        return f"Either({_show(x.left, names)}, {_show(x.right, names)})"
    if x is type(None):
        return "None"
    return getattr(x, "__qualname__", repr(x))
