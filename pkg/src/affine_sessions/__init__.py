"""Session-typed channels with affine endpoints and implicit cancellation.

Protocols are described with :class:`Send`, :class:`Recv` and :data:`End`
and driven with :func:`send`, :func:`recv`, :func:`close` and :func:`fork`::

    from affine_sessions import End, Send, close, fork, recv, send

    def child(s):
        return close(send(None, s))

    s = fork(Send(None, End), child)
    received = recv(s)
    if received is not None:
        _, s = received
        close(s)

A cancelled session never raises; the blocked operation returns ``None``.
"""

from .choice import (
    Choice,
    Label,
    Left,
    Right,
    choose_label,
    choose_left,
    choose_right,
    offer_either,
    offer_labels,
)
from .core import (
    EndEndpoint,
    Endpoint,
    RecvEndpoint,
    SendEndpoint,
    cancel,
    close,
    fork,
    recv,
    send,
    unwrap,
)
from .errors import (
    Cancelled,
    DoubleUseError,
    EmptyPoolError,
    ProtocolError,
    UnusedEndpointWarning,
)
from .protocol import Choose, Either, End, Offer, Protocol, Recv, Send, dual, rec
from .select import select, select_mut

__version__ = "0.1.0"

__all__ = [
    "Cancelled",
    "Choice",
    "Choose",
    "DoubleUseError",
    "Either",
    "EmptyPoolError",
    "End",
    "EndEndpoint",
    "Endpoint",
    "Label",
    "Left",
    "Offer",
    "Protocol",
    "ProtocolError",
    "Recv",
    "RecvEndpoint",
    "Right",
    "Send",
    "SendEndpoint",
    "UnusedEndpointWarning",
    "cancel",
    "choose_label",
    "choose_left",
    "choose_right",
    "close",
    "dual",
    "fork",
    "offer_either",
    "offer_labels",
    "rec",
    "recv",
    "select",
    "select_mut",
    "send",
    "unwrap",
]
