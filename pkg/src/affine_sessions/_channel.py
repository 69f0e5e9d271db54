"""One-shot channels with disconnect-on-discard semantics.

This is the only module that touches threads and locks directly. Each
channel carries at most one payload. The two halves share a
:class:`ChannelState` whose reference count starts at two; every half that
is used, cancelled or garbage collected drops it by one. At one the channel
is disconnected, at zero any buffered payload is released.

Payloads that define a ``_discard`` method are disposed of through it when
they can no longer be delivered, which is how cancellation cascades through
packets that carry session endpoints.
"""

from __future__ import annotations

import random
import threading
from typing import Any, Sequence

__all__ = [
    "ChannelState",
    "Disconnected",
    "ReceiverHalf",
    "SenderHalf",
    "dispose",
    "oneshot_new",
    "oneshot_recv",
    "oneshot_send",
    "ready_index",
]

_EMPTY = object()
_pick = random.Random()


class Disconnected(Exception):
    """The peer half was discarded and nothing is buffered."""


class HalfReusedError(RuntimeError):
    """A channel half was used twice."""


def dispose(payload: Any) -> None:
    """Run the cancellation hook of a payload that can no longer be delivered."""
    hook = getattr(payload, "_discard", None)
    if hook is not None:
        hook()


class ChannelState:
    """State shared by the two halves of one channel."""

    __slots__ = ("_lock", "_value", "_waiters", "refcount", "disconnected")

    def __init__(self) -> None:
        # Re-entrant: a finalizer may run on this thread while the lock is held.
        self._lock = threading.RLock()
        self._value: Any = _EMPTY
        self._waiters: list[threading.Event] = []
        self.refcount = 2
        self.disconnected = False

    @property
    def buffered(self) -> bool:
        return self._value is not _EMPTY

    def _ready(self) -> bool:
        return self._value is not _EMPTY or self.disconnected

    def _release(self, receiver: bool) -> tuple[list[threading.Event], Any]:
        # Caller holds the lock. Returns waiters to wake and a payload to dispose.
        garbage = _EMPTY
        if receiver or self.refcount == 1:
            garbage, self._value = self._value, _EMPTY
        self.refcount -= 1
        if self.refcount <= 1:
            self.disconnected = True
        waiters, self._waiters = self._waiters, []
        return waiters, garbage


def _finish(waiters: list[threading.Event], garbage: Any) -> None:
    for ev in waiters:
        ev.set()
    if garbage is not _EMPTY:
        dispose(garbage)


class _Half:
    __slots__ = ("_state", "__weakref__")
    _is_receiver = False

    def __init__(self, state: ChannelState) -> None:
        self._state: ChannelState | None = state

    @property
    def state(self) -> ChannelState | None:
        """The shared state, or ``None`` once this half has been used."""
        return self._state

    @property
    def used(self) -> bool:
        return self._state is None

    def _claim(self) -> ChannelState:
        state = self._state
        if state is None:
            raise HalfReusedError(f"{type(self).__name__} already used")
        self._state = None
        return state

    def _discard(self) -> None:
        state = self._state
        if state is None:
            return
        self._state = None
        with state._lock:
            out = state._release(self._is_receiver)
        _finish(*out)

    def __del__(self) -> None:
        try:
            self._discard()
        except Exception:  # interpreter shutdown
            pass


class SenderHalf(_Half):
    """Sending side of a one-shot channel."""

    __slots__ = ()


class ReceiverHalf(_Half):
    """Receiving side of a one-shot channel."""

    __slots__ = ()
    _is_receiver = True


def oneshot_new() -> tuple[SenderHalf, ReceiverHalf]:
    state = ChannelState()
    return SenderHalf(state), ReceiverHalf(state)


def oneshot_send(half: SenderHalf, payload: Any) -> None:
    """Buffer ``payload`` for the receiver, or dispose of it if nobody is listening.

    Never blocks and never reports failure.
    """
    state = half._claim()
    with state._lock:
        if state.disconnected:
            dropped = payload
        else:
            state._value = payload
            dropped = _EMPTY
        waiters, garbage = state._release(receiver=False)
    _finish(waiters, garbage)
    if dropped is not _EMPTY:
        dispose(dropped)


def oneshot_recv(half: ReceiverHalf) -> Any:
    """Block until the payload arrives and return it.

    Raises :class:`Disconnected` if the sender was discarded without sending.
    """
    state = half._claim()
    event: threading.Event | None = None
    try:
        while True:
            with state._lock:
                if state._value is not _EMPTY:
                    value, state._value = state._value, _EMPTY
                    return value
                if state.disconnected:
                    raise Disconnected
                if event is None:
                    event = threading.Event()
                else:
                    event.clear()
                state._waiters.append(event)
            event.wait()
    finally:
        with state._lock:
            out = state._release(receiver=True)
        _finish(*out)


def ready_index(pool: Sequence[ReceiverHalf]) -> int:
    """Block until some receiver in ``pool`` is ready and return its index.

    A receiver is ready when a payload is buffered or its sender is gone, so
    a receive on the returned index completes without blocking. When several
    are ready one is picked at random.
    """
    if not pool:
        raise ValueError("ready_index() on an empty pool")
    states = []
    for half in pool:
        if half.state is None:
            raise HalfReusedError("pool contains a used receiver")
        states.append(half.state)
    event = threading.Event()
    try:
        while True:
            event.clear()
            ready = []
            for i, state in enumerate(states):
                with state._lock:
                    if state._ready():
                        ready.append(i)
                    elif event not in state._waiters:
                        state._waiters.append(event)
            if ready:
                return ready[0] if len(ready) == 1 else _pick.choice(ready)
            event.wait()
    finally:
        for state in states:
            with state._lock:
                try:
                    state._waiters.remove(event)
                except ValueError:
                    pass
