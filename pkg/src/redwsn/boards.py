"""Primary and secondary board state machines plus fault injection.

The primary board senses continuously and transmits through the SARB MAC;
the secondary board overhears the channel, sends heartbeats while idle, and
substitutes with single-shot data packets when the primary goes silent or
its data is incomplete/anomalous.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from .channel import Channel, Position
from .engine import Simulator, ms_to_us
from .mac import SarbConfig, SarbMac
from .packets import (
    SENSOR_FIELDS,
    BoardRole,
    Packet,
    PacketKind,
    SensorReading,
    detect_anomaly,
)


class FaultKind(Enum):
    HARD_FAILURE = "hard_failure"
    SENSOR_READ_FAILURE = "sensor_read_failure"
    SENSOR_ANOMALY = "sensor_anomaly"
    GATEWAY_FAILURE = "gateway_failure"


@dataclass(frozen=True)
class FaultSpec:
    """One injected fault, active during [start, end)."""

    kind: FaultKind
    target: str  # "<node>.primary", "<node>.secondary" or a gateway id
    start_ms: int = 300_000
    end_ms: int = 1_500_000
    affected_sensor: Optional[str] = None
    anomaly_multiplier: float = 1.5

    def __post_init__(self):
        if self.start_ms >= self.end_ms:
            raise ValueError("fault window must have start < end")
        if self.kind in (FaultKind.SENSOR_READ_FAILURE, FaultKind.SENSOR_ANOMALY):
            if self.affected_sensor not in SENSOR_FIELDS:
                raise ValueError(f"unknown sensor field: {self.affected_sensor!r}")

    def active(self, t_ms: float) -> bool:
        return self.start_ms <= t_ms < self.end_ms


@dataclass(frozen=True)
class ThresholdTable:
    """Per-field (lower, upper) emergency bounds."""

    bounds: dict[str, tuple[float, float]]

    def __post_init__(self):
        for name, (lo, hi) in self.bounds.items():
            if name not in SENSOR_FIELDS:
                raise ValueError(f"unknown sensor field: {name!r}")
            if lo >= hi:
                raise ValueError(f"threshold for {name} must have lower < upper")


DEFAULT_THRESHOLDS = ThresholdTable(
    bounds={
        "co2_ppm": (450.0, 3_000.0),
        "pressure_hpa": (900.0, 1_090.0),
        "o2_percent": (18.0, 23.0),
        "co_ppm": (0.0, 100.0),
        **{f"temp_c_{i}": (5.0, 40.0) for i in range(4)},
        **{f"humidity_pct_{i}": (10.0, 90.0) for i in range(4)},
    }
)


def check_thresholds(reading: SensorReading, thresholds: ThresholdTable) -> bool:
    """True iff any present field lies outside its bounds (absent fields do
    not trigger; absence is a sensor failure symptom, not an emergency)."""
    for name, (lo, hi) in thresholds.bounds.items():
        value = reading.values.get(name)
        if value is not None and not lo <= value <= hi:
            return True
    return False


# Quiet habitat defaults: nominal midpoints and the per-sample random-walk
# step for each monitored field.
_NOMINAL = {
    "co2_ppm": 800.0,
    "pressure_hpa": 1_013.0,
    "o2_percent": 20.9,
    "co_ppm": 5.0,
    **{f"temp_c_{i}": 22.0 for i in range(4)},
    **{f"humidity_pct_{i}": 45.0 for i in range(4)},
}
_WALK_SIGMA = {
    "co2_ppm": 2.0,
    "pressure_hpa": 0.1,
    "o2_percent": 0.01,
    "co_ppm": 0.02,
    **{f"temp_c_{i}": 0.03 for i in range(4)},
    **{f"humidity_pct_{i}": 0.05 for i in range(4)},
}
_WALK_BAND = 0.05  # walk stays within +-5 % of nominal


class Environment:
    """Slow bounded random walk around quiet nominal values, shared by the
    two boards of a node so their readings agree when both are healthy."""

    def __init__(self, rng: np.random.Generator):
        self._rng = rng
        self._values = dict(_NOMINAL)

    def sample(self) -> dict[str, float]:
        for name, sigma in _WALK_SIGMA.items():
            nominal = _NOMINAL[name]
            lo, hi = nominal * (1 - _WALK_BAND), nominal * (1 + _WALK_BAND)
            v = self._values[name] + float(self._rng.normal(0.0, sigma))
            self._values[name] = min(max(v, lo), hi)
        return dict(self._values)


class _RadioBoard:
    """Shared radio behaviour: half-duplex serialization and fault gating."""

    def __init__(
        self,
        sim: Simulator,
        channel: Channel,
        node_id: str,
        role: BoardRole,
        position: Position,
        env: Environment,
        faults: list[FaultSpec],
        tx_power_dbm: float,
        sensor_noise_rel: float = 0.005,
    ):
        self.sim = sim
        self.channel = channel
        self.node_id = node_id
        self.role = role
        self.entity_id = f"{node_id}.{role.value}"
        self.position = position
        self.rx_extra_loss_db = 0.0
        self.env = env
        self.faults = [f for f in faults if f.target == self.entity_id]
        self.tx_power_dbm = tx_power_dbm
        self._sensor_noise_rel = sensor_noise_rel
        self._sense_rng = sim.rng(f"{self.entity_id}-sensor")
        self._last_fault_tags: frozenset = frozenset()
        self._seq = itertools.count(1)
        channel.add_receiver(self)

    def is_powered(self, t_ms: Optional[float] = None) -> bool:
        t = self.sim.now_us / 1000 if t_ms is None else t_ms
        return not any(f.kind is FaultKind.HARD_FAILURE and f.active(t) for f in self.faults)

    def sense(self) -> Optional[SensorReading]:
        """Fresh reading; None if the board is hard-failed.

        Sensor faults apply per field: a read failure blanks the value, an
        anomaly multiplies it.  Ground-truth tags ride along for metrics.
        """
        if not self.is_powered():
            return None
        t_ms = self.sim.now_us / 1000
        values: dict[str, Optional[float]] = {}
        tags = set()
        truth = self.env.sample()
        for name in SENSOR_FIELDS:
            v = truth[name] * (1.0 + float(self._sense_rng.normal(0.0, self._sensor_noise_rel)))
            for fault in self.faults:
                if fault.affected_sensor != name or not fault.active(t_ms):
                    continue
                if fault.kind is FaultKind.SENSOR_READ_FAILURE:
                    v = None
                    tags.add(f"read_failure:{name}")
                elif fault.kind is FaultKind.SENSOR_ANOMALY:
                    v = v * fault.anomaly_multiplier
                    tags.add(f"anomaly:{name}")
            values[name] = v
        reading = SensorReading(values=values)
        self._last_fault_tags = frozenset(tags)
        return reading

    def next_seq(self) -> int:
        return next(self._seq)

    def transmit(self, packet: Packet) -> Optional[int]:
        """Put a frame on the air, waiting out an in-flight frame if needed.

        Returns the end-of-frame time, or None when the send was deferred or
        the board is silenced (a deferred frame is sent fire-and-forget).
        """
        if not self.is_powered():
            return None
        busy = self.channel.busy_until(self.entity_id)
        if busy > self.sim.now_us:
            self.sim.schedule_at(busy + 1, lambda: self.transmit(packet))
            return None
        self.channel.begin_transmission(self.entity_id, self.position, packet, self.tx_power_dbm)
        return self.channel.busy_until(self.entity_id)

    def on_receive(self, packet: Packet, rssi_dbm: float, now_us: int) -> None:  # pragma: no cover
        pass


class PrimaryBoard(_RadioBoard):
    """Sensing board: periodic data slots via SARB, emergency transmissions
    on threshold crossings, ack-driven retransmission."""

    def __init__(
        self,
        sim: Simulator,
        channel: Channel,
        node_id: str,
        position: Position,
        env: Environment,
        faults: list[FaultSpec],
        mac_cfg: SarbConfig,
        thresholds: ThresholdTable = DEFAULT_THRESHOLDS,
        tx_power_dbm: float = 14.0,
        data_bytes: int = 76,
        sensing_poll_ms: int = 5_000,
        expected_slot_log: Optional[list[int]] = None,
    ):
        super().__init__(sim, channel, node_id, BoardRole.PRIMARY, position, env, faults, tx_power_dbm)
        self.thresholds = thresholds
        self.data_bytes = data_bytes
        self.sensing_poll_ms = sensing_poll_ms
        self.expected_slots_us: list[int] = expected_slot_log if expected_slot_log is not None else []
        self._in_emergency = False
        self.mac = SarbMac(
            sim,
            mac_cfg,
            sim.rng(f"{self.entity_id}-mac"),
            build_packet=self._build_data_packet,
            transmit=self.transmit,
            is_powered=self.is_powered,
            on_slot=self.expected_slots_us.append,
        )
        for fault in self.faults:
            if fault.kind is FaultKind.HARD_FAILURE:
                # Power loss wipes the MAC queue and any pending ack timer.
                sim.schedule_at(ms_to_us(fault.start_ms), self.mac.power_cycle)

    def start(self) -> None:
        self.mac.start()
        self.sim.schedule_in(ms_to_us(self.sensing_poll_ms), self._sensing_poll)

    def _build_data_packet(self, emergency: bool) -> Packet:
        reading = self.sense()
        return Packet(
            kind=PacketKind.DATA,
            node_id=self.node_id,
            board_role=BoardRole.PRIMARY,
            seq=self.next_seq(),
            size_bytes=self.data_bytes,
            reading=reading,
            emergency=emergency,
            fault_tags=self._last_fault_tags,
        )

    def _sensing_poll(self) -> None:
        self.sim.schedule_in(ms_to_us(self.sensing_poll_ms), self._sensing_poll)
        if not self.is_powered():
            self._in_emergency = False
            return
        reading = self.sense()
        crossed = check_thresholds(reading, self.thresholds)
        if crossed and not self._in_emergency:
            self.mac.on_emergency(self._build_data_packet(True))
        self._in_emergency = crossed

    def on_receive(self, packet: Packet, rssi_dbm: float, now_us: int) -> None:
        if not self.is_powered():
            return
        if packet.kind is PacketKind.ACK and packet.ack_for and packet.ack_for[0] == self.node_id:
            self.mac.on_ack(packet.ack_for[1])


@dataclass
class SecondaryConfig:
    sensing_interval_ms: int = 35_000
    heartbeat_period_ms: int = 60_000
    # Time the board needs to read all sensors before a substitute
    # transmission goes out.
    sense_duration_ms: int = 3_500
    heartbeat_bytes: int = 12
    data_bytes: int = 76
    anomaly_rel_threshold: float = 0.25


class SecondaryBoard(_RadioBoard):
    """Hot spare: overhears the primary, heartbeats while idle, and sends a
    single-shot backup or corrective data packet when the primary misses its
    window or ships faulty data.  No retransmission mechanism."""

    def __init__(
        self,
        sim: Simulator,
        channel: Channel,
        node_id: str,
        position: Position,
        env: Environment,
        faults: list[FaultSpec],
        cfg: SecondaryConfig = SecondaryConfig(),
        tx_power_dbm: float = 14.0,
    ):
        super().__init__(sim, channel, node_id, BoardRole.SECONDARY, position, env, faults, tx_power_dbm)
        self.cfg = cfg
        self._watchdog = None
        self._last_responded_seq = 0
        self._send_pending = False
        # Substitutions run at the board's own sensing cadence: at most one
        # backup/corrective per sensing interval, however many triggers fire.
        self._next_substitute_us = 0

    def start(self) -> None:
        self._arm_watchdog(self.sim.now_us + ms_to_us(self.cfg.sensing_interval_ms))
        self.sim.schedule_in(ms_to_us(self.cfg.heartbeat_period_ms), self._heartbeat)

    def _arm_watchdog(self, deadline_us: int) -> None:
        if self._watchdog is not None:
            self._watchdog.cancel()
        self._watchdog = self.sim.schedule_at(deadline_us, self._watchdog_expired)

    def on_receive(self, packet: Packet, rssi_dbm: float, now_us: int) -> None:
        if not self.is_powered():
            return
        if packet.kind is not PacketKind.DATA or packet.node_id != self.node_id:
            return
        if packet.board_role is not BoardRole.PRIMARY:
            return
        # Any overheard primary data packet proves the primary is alive, so
        # the watchdog resets even when the payload turns out to be faulty
        # (the corrective path handles the payload).
        self._arm_watchdog(now_us + ms_to_us(self.cfg.sensing_interval_ms))
        if packet.seq <= self._last_responded_seq:
            return  # retransmission of a packet already considered
        if self._is_faulty(packet):
            self._last_responded_seq = packet.seq
            if self._substitute_allowed():
                self._schedule_send(corrective=True, responds_to=packet.seq)

    def _is_faulty(self, packet: Packet) -> bool:
        if packet.reading is None or not packet.reading.is_complete():
            return True
        own = self.sense()
        if own is None:
            return False
        return bool(
            detect_anomaly(packet.reading, own, rel_threshold=self.cfg.anomaly_rel_threshold)
        )

    def _substitute_allowed(self) -> bool:
        if self.sim.now_us < self._next_substitute_us:
            return False
        self._next_substitute_us = self.sim.now_us + ms_to_us(self.cfg.sensing_interval_ms)
        return True

    def _watchdog_expired(self) -> None:
        deadline = self.sim.now_us + ms_to_us(self.cfg.sensing_interval_ms)
        if self.is_powered() and self._substitute_allowed():
            self._schedule_send(corrective=False)
            # The next silence countdown starts once this substitute is out.
            deadline += ms_to_us(self.cfg.sense_duration_ms)
        self._arm_watchdog(deadline)

    def _schedule_send(self, corrective: bool, responds_to: Optional[int] = None) -> None:
        if self._send_pending:
            return
        self._send_pending = True

        def fire():
            self._send_pending = False
            if not self.is_powered():
                return
            reading = self.sense()
            packet = Packet(
                kind=PacketKind.DATA,
                node_id=self.node_id,
                board_role=BoardRole.SECONDARY,
                seq=self.next_seq(),
                size_bytes=self.cfg.data_bytes,
                reading=reading,
                corrective=corrective,
                responds_to=responds_to,
                fault_tags=self._last_fault_tags,
            )
            self.transmit(packet)

        self.sim.schedule_in(ms_to_us(self.cfg.sense_duration_ms), fire)

    def _heartbeat(self) -> None:
        self.sim.schedule_in(ms_to_us(self.cfg.heartbeat_period_ms), self._heartbeat)
        if not self.is_powered():
            return
        packet = Packet(
            kind=PacketKind.HEARTBEAT,
            node_id=self.node_id,
            board_role=BoardRole.SECONDARY,
            seq=self.next_seq(),
            size_bytes=self.cfg.heartbeat_bytes,
        )
        self.transmit(packet)
