"""Slotted-ALOHA-with-random-backoff MAC for primary boards.

Data slots fall on a 500 ms grid inside [20 s, 30 s] after the previous
slot; two fixed retransmission slots (+6 s, +12 s) follow each data slot.
Unacknowledged packets go through a bounded LIFO queue that evicts its
oldest entry when full.  With `enabled=False` the layer degrades to the
baseline: one transmission every fixed interval, no acks, no queue.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .engine import Simulator, draw_uniform_grid, ms_to_us
from .packets import Packet


@dataclass(frozen=True)
class SarbConfig:
    slot_min_ms: int = 20_000
    slot_max_ms: int = 30_000
    slot_step_ms: int = 500
    retx_interval_ms: int = 6_000
    retx_slots_per_cycle: int = 2
    queue_capacity: int = 10
    ack_timeout_ms: int = 2_000
    enabled: bool = True
    # Baseline when disabled: fixed interval, no retransmission.
    fixed_interval_ms: int = 30_000

    def __post_init__(self):
        if self.slot_min_ms > self.slot_max_ms:
            raise ValueError("slot_min must not exceed slot_max")
        if self.slot_step_ms <= 0 or (self.slot_max_ms - self.slot_min_ms) % self.slot_step_ms:
            raise ValueError("slot range must be divisible by the step")
        if self.retx_slots_per_cycle * self.retx_interval_ms >= self.slot_min_ms:
            raise ValueError("retransmission slots must fit before the earliest next data slot")
        if self.queue_capacity < 0 or self.ack_timeout_ms <= 0:
            raise ValueError("queue capacity and ack timeout must be positive")


class RetxQueue:
    """Bounded LIFO of unacknowledged packets; full push evicts the oldest."""

    def __init__(self, capacity: int = 10):
        self.capacity = capacity
        self._items: list[Packet] = []

    def __len__(self) -> int:
        return len(self._items)

    def push(self, packet: Packet) -> Optional[Packet]:
        """Append a packet; returns the evicted oldest packet, if any."""
        evicted = None
        if self.capacity == 0:
            return packet
        if len(self._items) >= self.capacity:
            evicted = self._items.pop(0)
        self._items.append(packet)
        return evicted

    def pop(self) -> Packet:
        """Remove and return the most recently pushed packet."""
        if not self._items:
            raise IndexError("pop from empty retransmission queue")
        return self._items.pop()

    def clear(self) -> None:
        self._items.clear()

    def snapshot(self) -> list[Packet]:
        return list(self._items)


class SarbMac:
    """Per-board MAC state machine, driven entirely by the event loop.

    The owning board supplies callbacks:
      * build_packet(emergency) -> Packet      fresh data packet, next seq
      * transmit(packet) -> Optional[int]      end-of-frame time, or None if
                                               the board is silenced
      * is_powered() -> bool                   hard-failure gate
      * on_slot(time_us)                       expected-slot bookkeeping

    The slot clock keeps ticking while the board is hard-failed (so the
    monitoring-epoch schedule is independent of injected faults); only the
    transmissions are suppressed.
    """

    def __init__(
        self,
        sim: Simulator,
        cfg: SarbConfig,
        rng: np.random.Generator,
        build_packet: Callable[[bool], Packet],
        transmit: Callable[[Packet], Optional[int]],
        is_powered: Callable[[], bool],
        on_slot: Callable[[int], None],
    ):
        self.sim = sim
        self.cfg = cfg
        self.rng = rng
        self._build_packet = build_packet
        self._transmit = transmit
        self._is_powered = is_powered
        self._on_slot = on_slot
        self.queue = RetxQueue(cfg.queue_capacity)
        self._pending: Optional[tuple[Packet, object]] = None  # (packet, timeout handle)

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        self.sim.schedule_at(self._draw_offset_us(), self._data_slot)

    def power_cycle(self) -> None:
        """Volatile state is lost when the board loses power."""
        self.queue.clear()
        if self._pending is not None:
            self._pending[1].cancel()
            self._pending = None

    def _draw_offset_us(self) -> int:
        if not self.cfg.enabled:
            return self.sim.now_us + ms_to_us(self.cfg.fixed_interval_ms)
        offset_ms = draw_uniform_grid(
            self.rng, self.cfg.slot_min_ms, self.cfg.slot_max_ms, self.cfg.slot_step_ms
        )
        return self.sim.now_us + ms_to_us(offset_ms)

    # -- slots --------------------------------------------------------------

    def _data_slot(self) -> None:
        now = self.sim.now_us
        self._on_slot(now)
        if self.cfg.enabled:
            for k in range(1, self.cfg.retx_slots_per_cycle + 1):
                self.sim.schedule_at(now + k * ms_to_us(self.cfg.retx_interval_ms), self._retx_slot)
        self.sim.schedule_at(self._draw_offset_us(), self._data_slot)
        if not self._is_powered():
            return
        packet = self._build_packet(False)
        self._send(packet)

    def _retx_slot(self) -> None:
        if not self._is_powered() or self._pending is not None or not len(self.queue):
            return
        self._send(self.queue.pop())

    def on_emergency(self, emergency_packet: Packet) -> None:
        """Threshold crossing: transmit outside the slot schedule, right away."""
        if not self._is_powered():
            return
        self._send(emergency_packet)

    # -- transmission and acknowledgement ------------------------------------

    def _send(self, packet: Packet) -> None:
        end_us = self._transmit(packet)
        if end_us is None:
            return
        if not self.cfg.enabled:
            return  # baseline: fire and forget
        if self._pending is not None:
            # A frame is already awaiting its ack; treat the new one as
            # unconfirmed immediately rather than tracking two timers.
            self.queue.push(packet)
            return
        deadline = end_us + ms_to_us(self.cfg.ack_timeout_ms)
        handle = self.sim.schedule_at(deadline, lambda: self._ack_timeout(packet))
        self._pending = (packet, handle)

    def _ack_timeout(self, packet: Packet) -> None:
        if self._pending is None or self._pending[0] is not packet:
            return
        self._pending = None
        if self._is_powered():
            self.queue.push(packet)

    def on_ack(self, acked_seq: int) -> None:
        if not self._is_powered() or self._pending is None:
            return
        packet, handle = self._pending
        if packet.seq == acked_seq:
            handle.cancel()
            self._pending = None
