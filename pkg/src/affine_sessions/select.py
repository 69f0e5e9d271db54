"""Waiting on several receiving endpoints of the same protocol at once."""

from __future__ import annotations

from typing import Any, Iterable, Optional

from . import _channel as ch
from .core import Endpoint, RecvEndpoint, recv
from .errors import DoubleUseError, EmptyPoolError, ProtocolError

__all__ = ["select", "select_mut"]


def select_mut(pool: list[RecvEndpoint]) -> Optional[tuple[Any, Endpoint]]:
    """Receive from whichever endpoint in ``pool`` is ready first.

    The endpoint that fired is removed from ``pool``; the others keep their
    order. Returns ``(value, continuation)``, or ``None`` if the session
    that fired had been cancelled.

    Raises :class:`EmptyPoolError` for an empty pool.
    """
    if not pool:
        raise EmptyPoolError("select_mut() on an empty pool")
    first = pool[0]
    halves = []
    for endpoint in pool:
        if not isinstance(endpoint, RecvEndpoint):
            raise ProtocolError(f"can only select on receiving endpoints, got {endpoint!r}")
        if endpoint.protocol != first.protocol:
            raise ProtocolError(
                f"select needs endpoints of one protocol, got {first.protocol!r} "
                f"and {endpoint.protocol!r}"
            )
        if endpoint.consumed:
            raise DoubleUseError(f"{endpoint!r} was already used")
        halves.append(endpoint._halves[0])  # type: ignore[index]
    index = ch.ready_index(halves)
    # Ready means buffered or disconnected, so this recv does not block.
    return recv(pool.pop(index))


def select(
    pool: Iterable[RecvEndpoint],
) -> tuple[Optional[tuple[Any, Endpoint]], list[RecvEndpoint]]:
    """Like :func:`select_mut`, but takes the pool by value and returns
    ``(result, remainder)``."""
    rest = list(pool)
    result = select_mut(rest)
    return result, rest
