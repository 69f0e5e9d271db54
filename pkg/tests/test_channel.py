import gc
import random
import threading
import time

import pytest

from affine_sessions._channel import (
    Disconnected,
    HalfReusedError,
    oneshot_new,
    oneshot_recv,
    oneshot_send,
    ready_index,
)
from conftest import WAKE_TIMEOUT, Timed


class Tracked:
    """Payload that records whether it was disposed of."""

    def __init__(self):
        self.discarded = False

    def _discard(self):
        self.discarded = True


def test_round_trip():
    s, r = oneshot_new()
    oneshot_send(s, 7)
    assert oneshot_recv(r) == 7


def test_fresh_state():
    s, r = oneshot_new()
    assert s.state is r.state
    assert s.state.refcount == 2
    assert not s.state.buffered
    assert not s.state.disconnected


def test_send_after_receiver_dropped_discards_payload():
    s, r = oneshot_new()
    del r
    payload = Tracked()
    assert oneshot_send(s, payload) is None
    assert payload.discarded


def test_recv_after_sender_dropped_is_disconnected():
    s, r = oneshot_new()
    del s
    with pytest.raises(Disconnected):
        oneshot_recv(r)


def test_recv_wakes_when_sender_dropped_mid_wait():
    s, r = oneshot_new()
    waiter = Timed(oneshot_recv, r)
    time.sleep(0.02)
    assert not waiter.finished(0)
    del s
    with pytest.raises(Disconnected):
        waiter.get()


def test_buffered_value_survives_sender_release():
    s, r = oneshot_new()
    oneshot_send(s, 42)
    state = r.state
    assert state.refcount == 1 and state.disconnected and state.buffered
    assert oneshot_recv(r) == 42
    assert state.refcount == 0


def test_packet_parts_arrive_intact():
    # Oracle: hand the two parts over on two separate channels.
    cont_tx, cont_rx = oneshot_new()
    s1, r1 = oneshot_new()
    s2, r2 = oneshot_new()
    oneshot_send(s1, "value")
    oneshot_send(s2, cont_tx)
    by_hand = (oneshot_recv(r1), oneshot_recv(r2))

    s, r = oneshot_new()
    oneshot_send(s, ("value", cont_rx))
    packed = oneshot_recv(r)
    assert packed[0] == by_hand[0]
    assert packed[1].state is by_hand[1].state


def test_halves_are_single_use():
    s, r = oneshot_new()
    oneshot_send(s, 1)
    with pytest.raises(HalfReusedError):
        oneshot_send(s, 2)
    oneshot_recv(r)
    with pytest.raises(HalfReusedError):
        oneshot_recv(r)


def test_send_never_blocks_without_a_receiver_task():
    s, r = oneshot_new()
    start = time.monotonic()
    oneshot_send(s, "x")
    assert time.monotonic() - start < 0.1
    assert r.state.buffered


def test_refcount_is_monotone():
    seen = []
    s, r = oneshot_new()
    state = s.state
    seen.append(state.refcount)
    oneshot_send(s, 1)
    seen.append(state.refcount)
    del s
    gc.collect()
    seen.append(state.refcount)
    oneshot_recv(r)
    seen.append(state.refcount)
    del r
    seen.append(state.refcount)
    assert seen == [2, 1, 1, 0, 0]


def test_refcount_zero_reclaims_buffer():
    s, r = oneshot_new()
    payload = Tracked()
    oneshot_send(s, payload)
    state = r.state
    del r
    assert state.refcount == 0
    assert not state.buffered
    assert payload.discarded


def test_discarding_receiver_cascades_into_buffered_payload():
    # The buffered payload is itself the sender of another channel, whose
    # receiver is blocked in another thread.
    inner_tx, inner_rx = oneshot_new()
    waiter = Timed(oneshot_recv, inner_rx)
    outer_tx, outer_rx = oneshot_new()
    oneshot_send(outer_tx, inner_tx)
    del inner_tx
    time.sleep(0.02)
    assert not waiter.finished(0)
    del outer_rx
    with pytest.raises(Disconnected):
        waiter.get()


@pytest.mark.parametrize("seed", range(100))
def test_no_lost_wakeup(seed):
    rng = random.Random(seed)
    s, r = oneshot_new()
    delay_send = rng.random() * 0.002
    delay_recv = rng.random() * 0.002
    sends = rng.random() < 0.5

    box = [s]
    del s

    def sender():
        half = box.pop()
        time.sleep(delay_send)
        if sends:
            oneshot_send(half, seed)
        # otherwise the half is dropped when this frame exits

    def receiver():
        time.sleep(delay_recv)
        try:
            return oneshot_recv(r)
        except Disconnected:
            return "disconnected"

    got = Timed(receiver)
    threading.Thread(target=sender, daemon=True).start()
    assert got.get(WAKE_TIMEOUT) == (seed if sends else "disconnected")


class TestReadyIndex:
    def test_single_buffered(self):
        s, r = oneshot_new()
        oneshot_send(s, 1)
        assert ready_index([r]) == 0

    def test_only_one_ready(self):
        pairs = [oneshot_new() for _ in range(3)]
        oneshot_send(pairs[2][0], "x")
        pool = [r for _, r in pairs]
        # Oracle: poll each receiver in turn.
        polled = [i for i, r in enumerate(pool) if r.state.buffered or r.state.disconnected]
        assert polled == [2]
        assert ready_index(pool) == 2

    def test_disconnect_counts_as_ready(self):
        (s0, r0), (s1, r1) = oneshot_new(), oneshot_new()
        del s0
        assert ready_index([r0, r1]) == 0
        with pytest.raises(Disconnected):
            oneshot_recv(r0)

    def test_blocks_until_a_sender_fires(self):
        pairs = [oneshot_new() for _ in range(4)]
        pool = [r for _, r in pairs]
        waiter = Timed(ready_index, pool)
        time.sleep(0.02)
        assert not waiter.finished(0)
        oneshot_send(pairs[3][0], "late")
        assert waiter.get() == 3
        for state in (r.state for r in pool):
            assert state._waiters == []

    def test_empty_pool(self):
        with pytest.raises(ValueError):
            ready_index([])

    def test_picks_among_ready_only(self):
        pairs = [oneshot_new() for _ in range(6)]
        for i in (1, 4):
            oneshot_send(pairs[i][0], i)
        pool = [r for _, r in pairs]
        assert {ready_index(pool) for _ in range(50)} <= {1, 4}
