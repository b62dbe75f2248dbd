from collections import deque

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redwsn.engine import Simulator
from redwsn.mac import RetxQueue, SarbConfig, SarbMac
from redwsn.packets import Packet, PacketKind


def make_packet(seq):
    return Packet(kind=PacketKind.DATA, node_id="n1", seq=seq, size_bytes=76)


# -- configuration -------------------------------------------------------------


def test_default_config_valid():
    cfg = SarbConfig()
    assert cfg.slot_min_ms == 20_000 and cfg.slot_max_ms == 30_000
    assert cfg.retx_slots_per_cycle * cfg.retx_interval_ms < cfg.slot_min_ms


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        SarbConfig(slot_min_ms=30_000, slot_max_ms=20_000)
    with pytest.raises(ValueError):
        SarbConfig(slot_step_ms=300)  # 10 s range not divisible
    with pytest.raises(ValueError):
        SarbConfig(retx_interval_ms=12_000)  # 2 x 12 s >= 20 s
    with pytest.raises(ValueError):
        SarbConfig(ack_timeout_ms=0)


# -- LIFO retransmission queue ---------------------------------------------------


def test_queue_is_lifo():
    q = RetxQueue(capacity=10)
    for seq in range(3):
        q.push(make_packet(seq))
    assert q.pop().seq == 2
    assert q.pop().seq == 1
    assert q.pop().seq == 0


def test_queue_eviction_removes_oldest():
    q = RetxQueue(capacity=3)
    evicted = [q.push(make_packet(seq)) for seq in range(5)]
    assert [e.seq for e in evicted if e is not None] == [0, 1]
    assert [p.seq for p in q.snapshot()] == [2, 3, 4]


def test_queue_pop_empty_raises():
    q = RetxQueue()
    with pytest.raises(IndexError):
        q.pop()


def test_queue_clear():
    q = RetxQueue()
    q.push(make_packet(1))
    q.clear()
    assert len(q) == 0


@settings(max_examples=300)
@given(
    st.lists(
        st.one_of(st.just("pop"), st.integers(0, 10_000).map(lambda s: ("push", s))),
        max_size=60,
    )
)
def test_queue_matches_reference_model(ops):
    """Bounded LIFO with oldest-eviction versus a plain deque model."""
    q = RetxQueue(capacity=10)
    model = deque()
    for op in ops:
        if op == "pop":
            if model:
                assert q.pop().seq == model.pop().seq
            else:
                with pytest.raises(IndexError):
                    q.pop()
        else:
            _, seq = op
            packet = make_packet(seq)
            evicted = q.push(packet)
            expected_evicted = model.popleft() if len(model) >= 10 else None
            model.append(packet)
            assert (evicted is None) == (expected_evicted is None)
            if evicted is not None:
                assert evicted.seq == expected_evicted.seq
        assert len(q) == len(model) <= 10
        assert [p.seq for p in q.snapshot()] == [p.seq for p in model]


# -- MAC state machine -----------------------------------------------------------


class Harness:
    """Wires a SarbMac to scripted transmit/power behaviour."""

    def __init__(self, cfg=SarbConfig(), seed=0, airtime_us=138_496):
        self.sim = Simulator(master_seed=seed)
        self.cfg = cfg
        self.airtime_us = airtime_us
        self.sent = []  # (time_us, packet)
        self.slots = []
        self.powered = True
        self.deliver = True
        self._seq = 0
        self.mac = SarbMac(
            self.sim,
            cfg,
            self.sim.rng("mac"),
            build_packet=self._build,
            transmit=self._transmit,
            is_powered=lambda: self.powered,
            on_slot=self.slots.append,
        )

    def _build(self, emergency):
        self._seq += 1
        return Packet(
            kind=PacketKind.DATA, node_id="n1", seq=self._seq, size_bytes=76, emergency=emergency
        )

    def _transmit(self, packet):
        if not self.powered:
            return None
        self.sent.append((self.sim.now_us, packet))
        return self.sim.now_us + self.airtime_us


def test_slots_fall_on_grid_in_window():
    h = Harness()
    h.mac.start()
    h.sim.run_until(600_000_000)
    gaps = [b - a for a, b in zip(h.slots, h.slots[1:])]
    assert gaps, "no slots scheduled"
    for gap in gaps:
        assert 20_000_000 <= gap <= 30_000_000
        assert gap % 500_000 == 0
    assert 20_000_000 <= h.slots[0] <= 30_000_000


def test_acked_packet_not_retransmitted():
    h = Harness()
    h.mac.start()
    # Ack every frame right after it ends.
    for _ in range(40):
        h.sim.run_until(h.sim.now_us + 1_000_000)
        if h.sent:
            h.mac.on_ack(h.sent[-1][1].seq)
    seqs = [p.seq for _, p in h.sent]
    assert len(seqs) == len(set(seqs))


def test_unacked_packet_uses_retransmission_slots():
    h = Harness()
    h.mac.start()
    h.sim.run_until(40_000_000)
    slot_time = h.slots[0]
    times = [t for t, _ in h.sent if t < slot_time + 15_000_000]
    assert times[0] == slot_time
    # No ack arrives, so the frame goes out again at +6 s and +12 s.
    assert times[1] == slot_time + 6_000_000
    assert times[2] == slot_time + 12_000_000
    seqs = {p.seq for _, p in h.sent[:3]}
    assert seqs == {h.sent[0][1].seq}


def test_disabled_mac_is_fixed_interval_fire_and_forget():
    h = Harness(cfg=SarbConfig(enabled=False))
    h.mac.start()
    h.sim.run_until(180_000_000)
    assert h.slots == [30_000_000, 60_000_000, 90_000_000, 120_000_000, 150_000_000, 180_000_000]
    # One transmission per slot, no retransmissions.
    assert [t for t, _ in h.sent] == h.slots
    assert len({p.seq for _, p in h.sent}) == len(h.sent)


def test_emergency_transmits_immediately():
    h = Harness()
    h.mac.start()
    h.sim.run_until(1_000_000)
    packet = Packet(kind=PacketKind.DATA, node_id="n1", seq=999, size_bytes=76, emergency=True)
    h.mac.on_emergency(packet)
    assert h.sent and h.sent[-1][1].seq == 999 and h.sent[-1][0] == h.sim.now_us


def test_slot_clock_ticks_while_unpowered():
    h = Harness()
    h.mac.start()
    h.sim.run_until(35_000_000)
    h.powered = False
    h.sim.run_until(335_000_000)
    h.powered = True
    h.sim.run_until(400_000_000)
    gaps = [b - a for a, b in zip(h.slots, h.slots[1:])]
    assert all(20_000_000 <= g <= 30_000_000 for g in gaps)
    # No frames on the air during the outage.
    assert not [t for t, _ in h.sent if 35_000_000 < t <= 335_000_000]
    assert [t for t, _ in h.sent if t > 335_000_000]


def test_power_cycle_clears_queue_and_pending():
    h = Harness()
    h.mac.start()
    h.sim.run_until(100_000_000)  # several unacked cycles -> non-empty queue
    assert len(h.mac.queue) > 0
    h.mac.power_cycle()
    assert len(h.mac.queue) == 0
    assert h.mac._pending is None


def test_queue_never_exceeds_capacity_without_acks():
    h = Harness()
    h.mac.start()
    h.sim.run_until(1_800_000_000)  # 30 min, no acks at all
    assert len(h.mac.queue) <= h.cfg.queue_capacity


def test_ack_for_wrong_seq_is_ignored():
    h = Harness()
    h.mac.start()
    h.sim.run_until(31_000_000)
    in_flight = h.sent[-1][1].seq
    h.mac.on_ack(in_flight + 123)
    h.sim.run_until(40_000_000)
    retx = [p.seq for t, p in h.sent if p.seq == in_flight]
    assert len(retx) >= 2  # still retransmitted
