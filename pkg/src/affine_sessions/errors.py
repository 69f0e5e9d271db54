"""Exceptions and warnings.

Cancellation is never reported through these: a cancelled session shows up
as a ``None`` result. The exceptions here signal programming errors.
"""

__all__ = [
    "Cancelled",
    "DoubleUseError",
    "EmptyPoolError",
    "ProtocolError",
    "UnusedEndpointWarning",
]


class DoubleUseError(RuntimeError):
    """An endpoint was consumed a second time."""


class ProtocolError(TypeError):
    """A value or endpoint does not fit the declared protocol."""


class EmptyPoolError(ValueError):
    """Selection was attempted on an empty pool of endpoints."""


class Cancelled(Exception):
    """Raised by :func:`~affine_sessions.unwrap` to short-circuit a process.

    :func:`~affine_sessions.fork` and the offer functions treat it like any
    other failure of the process: its sessions are cancelled.
    """


class UnusedEndpointWarning(ResourceWarning):
    """An endpoint was garbage collected without being used or cancelled."""
