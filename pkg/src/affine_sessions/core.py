"""Session endpoints and the primitive operations on them.

Every operation consumes the endpoint it is given and, where the protocol
continues, returns a fresh endpoint for the continuation. Using an endpoint
twice raises :class:`DoubleUseError`. Dropping one, explicitly with
:func:`cancel` or implicitly by letting it be garbage collected, cancels
the session: the peer's next ``recv`` or ``close`` returns ``None``.

Sessions are chains of one-shot channels. ``send`` creates the session for
the continuation and transmits the value together with the peer's endpoint
of that new session; ``recv`` gets both back.
"""

from __future__ import annotations

import itertools
import logging
import threading
import traceback
import warnings
from typing import Any, Callable, Iterator, Optional, TypeVar

from . import _channel as ch
from .errors import Cancelled, DoubleUseError, ProtocolError, UnusedEndpointWarning
from .protocol import Either, End, Protocol, Recv, Send

__all__ = [
    "EndEndpoint",
    "Endpoint",
    "RecvEndpoint",
    "SendEndpoint",
    "cancel",
    "close",
    "fork",
    "recv",
    "send",
    "unwrap",
]

log = logging.getLogger(__name__)

T = TypeVar("T")

_fork_ids = itertools.count(1)


class Endpoint:
    """One side of a session. Consumed by exactly one operation."""

    __slots__ = ("_protocol", "_halves", "__weakref__")

    def __init__(self, protocol: Protocol, *halves: ch._Half) -> None:
        self._protocol = protocol
        self._halves: tuple[ch._Half, ...] | None = halves

    @property
    def protocol(self) -> Protocol:
        return self._protocol

    @property
    def consumed(self) -> bool:
        return self._halves is None

    def _take(self) -> tuple[ch._Half, ...]:
        halves = self._halves
        if halves is None:
            raise DoubleUseError(f"{self!r} was already used")
        self._halves = None
        return halves

    def _moved(self) -> Endpoint:
        # Ownership transfer: the old handle becomes unusable.
        return type(self)(self._protocol, *self._take())

    def _discard(self) -> None:
        halves, self._halves = self._halves, None
        if halves:
            for half in halves:
                half._discard()

    def __del__(self) -> None:
        if self._halves is None:
            return
        try:
            warnings.warn(
                f"{type(self).__name__} for {self._protocol!r} dropped without being "
                "used; the session is cancelled",
                UnusedEndpointWarning,
                source=self,
            )
        except Exception:
            pass
        try:
            self._discard()
        except Exception:  # interpreter shutdown
            pass

    def __repr__(self) -> str:
        state = " consumed" if self._halves is None else ""
        return f"<{type(self).__name__} {self._protocol!r}{state}>"


class SendEndpoint(Endpoint):
    __slots__ = ()


class RecvEndpoint(Endpoint):
    __slots__ = ()


class EndEndpoint(Endpoint):
    __slots__ = ()


class Wrapped:
    """Base for library-owned values that carry exactly one endpoint."""

    __slots__ = ("endpoint",)

    def __init__(self, endpoint: Endpoint) -> None:
        self.endpoint = endpoint

    def _fits(self, ptype: Any) -> bool:
        raise NotImplementedError

    def _moved(self) -> Wrapped:
        clone = object.__new__(type(self))
        for cls in type(self).__mro__:
            for name in getattr(cls, "__slots__", ()):
                if name != "endpoint" and hasattr(self, name):
                    setattr(clone, name, getattr(self, name))
        clone.endpoint = self.endpoint._moved()
        return clone

    def _discard(self) -> None:
        self.endpoint._discard()


class _Packet:
    __slots__ = ("value", "cont")

    def __init__(self, value: Any, cont: Endpoint) -> None:
        self.value = value
        self.cont = cont

    def _discard(self) -> None:
        _drop(self.value)
        self.cont._discard()


def _new_session(protocol: Protocol) -> tuple[Endpoint, Endpoint]:
    """Create a connected pair of endpoints for ``protocol`` and its dual.

    Not part of the public API: sessions created this way and handed to
    raw threads can deadlock, which :func:`fork` rules out.
    """
    if isinstance(protocol, Send):
        tx, rx = ch.oneshot_new()
        return SendEndpoint(protocol, tx), RecvEndpoint(protocol.dual(), rx)
    if isinstance(protocol, Recv):
        tx, rx = ch.oneshot_new()
        return RecvEndpoint(protocol, rx), SendEndpoint(protocol.dual(), tx)
    if protocol is End:
        tx1, rx1 = ch.oneshot_new()
        tx2, rx2 = ch.oneshot_new()
        return EndEndpoint(End, tx1, rx2), EndEndpoint(End, tx2, rx1)
    raise ProtocolError(f"not a session type: {protocol!r}")


def _expect(endpoint: Any, kind: type[Endpoint], op: str) -> None:
    if not isinstance(endpoint, kind):
        raise ProtocolError(f"{op}() needs a {kind.__name__}, got {endpoint!r}")


def _check_payload(ptype: Any, value: Any) -> None:
    if isinstance(ptype, Protocol):
        if not isinstance(value, Endpoint) or value.protocol != ptype:
            raise ProtocolError(f"expected an endpoint of {ptype!r}, got {value!r}")
    elif isinstance(ptype, Either) or (isinstance(ptype, type) and issubclass(ptype, Wrapped)):
        if not isinstance(value, Wrapped) or not value._fits(ptype):
            raise ProtocolError(f"expected a value of {ptype!r}, got {value!r}")
    elif isinstance(ptype, type) and ptype is not object:
        if not isinstance(value, ptype):
            raise ProtocolError(f"expected {ptype.__qualname__}, got {value!r}")


def _move(value: Any) -> Any:
    if isinstance(value, (Endpoint, Wrapped)):
        return value._moved()
    return value


def send(value: Any, endpoint: SendEndpoint) -> Endpoint:
    """Send ``value`` and return the endpoint for the rest of the session.

    Never blocks and never fails. If the peer has cancelled, ``value`` is
    cancelled instead of delivered. Endpoints passed as ``value`` are moved:
    the caller's handle becomes unusable.
    """
    _expect(endpoint, SendEndpoint, "send")
    protocol = endpoint.protocol
    assert isinstance(protocol, Send)
    _check_payload(protocol.payload, value)
    inner = value.endpoint if isinstance(value, Wrapped) else value
    if endpoint.consumed or (isinstance(inner, Endpoint) and inner.consumed):
        raise DoubleUseError(f"send() on an already used endpoint: {endpoint!r}, {value!r}")
    (tx,) = endpoint._take()
    value = _move(value)
    here, there = _new_session(protocol.cont)
    ch.oneshot_send(tx, _Packet(value, there))
    return here


def recv(endpoint: RecvEndpoint) -> Optional[tuple[Any, Endpoint]]:
    """Wait for a value. Returns ``(value, continuation)``, or ``None`` if the
    session was cancelled."""
    _expect(endpoint, RecvEndpoint, "recv")
    (rx,) = endpoint._take()
    try:
        packet = ch.oneshot_recv(rx)
    except ch.Disconnected:
        return None
    return packet.value, packet.cont


def close(endpoint: EndEndpoint) -> Optional[bool]:
    """Close a completed session.

    Blocks until the peer closes too and returns ``True``; returns ``None``
    if the peer cancelled instead.
    """
    _expect(endpoint, EndEndpoint, "close")
    tx, rx = endpoint._take()
    ch.oneshot_send(tx, True)
    try:
        ch.oneshot_recv(rx)
    except ch.Disconnected:
        return None
    return True


def cancel(value: Any) -> None:
    """Drop ``value``, cancelling every session endpoint inside it.

    Looks through endpoints, choice values and the builtin containers
    (tuple, list, set, frozenset, dict values). Anything else is left to the
    garbage collector. Cancelling is a use: if any endpoint found is already
    consumed, raises :class:`DoubleUseError` and cancels nothing.
    """
    for endpoint in _endpoints_in(value):
        if endpoint.consumed:
            raise DoubleUseError(f"{endpoint!r} was already used")
    _drop(value)


def _endpoints_in(value: Any) -> Iterator[Endpoint]:
    if isinstance(value, Endpoint):
        yield value
    elif isinstance(value, Wrapped):
        yield value.endpoint
    elif isinstance(value, (tuple, list, set, frozenset)):
        for item in value:
            yield from _endpoints_in(item)
    elif isinstance(value, dict):
        for item in value.values():
            yield from _endpoints_in(item)


def _drop(value: Any) -> None:
    # cancel without the double-use check, for finalizers and dead packets.
    hook = getattr(value, "_discard", None)
    if hook is not None:
        hook()
    elif isinstance(value, (tuple, list, set, frozenset)):
        for item in value:
            _drop(item)
    elif isinstance(value, dict):
        for item in value.values():
            _drop(item)


def fork(protocol: Protocol, process: Callable[[Endpoint], Any]) -> Endpoint:
    """Run ``process`` in a new thread on one endpoint of a fresh session and
    return the other endpoint.

    ``process`` receives an endpoint of ``protocol``; the caller gets the
    dual. Whatever the process raises is swallowed, and any endpoints it
    still holds are cancelled when its frame goes away.
    """
    here, there = _new_session(protocol)
    box = [here]
    del here
    thread = threading.Thread(
        target=_run_forked,
        args=(process, box),
        name=f"session-fork-{next(_fork_ids)}",
        daemon=True,
    )
    thread.start()
    return there


def _run_forked(process: Callable[[Endpoint], Any], box: list[Endpoint]) -> None:
    try:
        process(box.pop())
    except BaseException as exc:
        log.debug("forked process %r failed: %r", process, exc)
        # Frames in the traceback would otherwise keep endpoints alive.
        traceback.clear_frames(exc.__traceback__)


def unwrap(result: Optional[T]) -> T:
    """Return ``result`` unless it is ``None``, in which case raise
    :class:`Cancelled`."""
    if result is None:
        raise Cancelled
    return result
