"""Gateway reception, acknowledgements, and server-side de-duplication."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .boards import FaultKind, FaultSpec
from .channel import Channel, Position
from .engine import Simulator
from .packets import BoardRole, Packet, PacketKind


@dataclass(frozen=True)
class ServerEntry:
    """One de-duplicated reception as the server sees it."""

    node_id: str
    board_role: str
    seq: int
    kind: str
    time_ms: float
    gateway_id: str
    rssi_dbm: float
    valid: bool
    corrective: bool
    emergency: bool


class Server:
    """Loss-free backhaul endpoint: collects gateway forwards and keeps the
    earliest copy per (node, board, seq)."""

    def __init__(self):
        self.raw: list[ServerEntry] = []
        self._first_seen: dict[tuple[str, str, int], ServerEntry] = {}
        self.duplicate_count = 0

    def on_gateway_reception(self, gateway_id: str, packet: Packet, rssi_dbm: float, now_us: int) -> None:
        valid = (
            packet.kind is PacketKind.DATA
            and packet.reading is not None
            and packet.reading.is_complete()
            and not packet.fault_tags
        )
        entry = ServerEntry(
            node_id=packet.node_id,
            board_role=packet.board_role.value if packet.board_role else "",
            seq=packet.seq,
            kind=packet.kind.value,
            time_ms=now_us / 1000,
            gateway_id=gateway_id,
            rssi_dbm=rssi_dbm,
            valid=valid,
            corrective=packet.corrective,
            emergency=packet.emergency,
        )
        self.raw.append(entry)
        key = (entry.node_id, entry.board_role, entry.seq)
        if key in self._first_seen:
            self.duplicate_count += 1
        else:
            self._first_seen[key] = entry

    def deduplicated(self) -> list[ServerEntry]:
        """Unique stream ordered by earliest reception time (stable)."""
        return sorted(self._first_seen.values(), key=lambda e: (e.time_ms, e.node_id, e.seq))


class Gateway:
    """Radio receiver that forwards to the server and acknowledges primary
    data frames (when it is the acking gateway for its module)."""

    ACK_BYTES = 8

    def __init__(
        self,
        sim: Simulator,
        channel: Channel,
        server: Server,
        gateway_id: str,
        position: Position,
        acks_enabled: bool = True,
        rx_extra_loss_db: float = 0.0,
        tx_power_dbm: float = 14.0,
        fail_windows: Optional[list[tuple[int, int]]] = None,
    ):
        self.sim = sim
        self.channel = channel
        self.server = server
        self.entity_id = gateway_id
        self.position = position
        self.acks_enabled = acks_enabled
        self.rx_extra_loss_db = rx_extra_loss_db
        self.tx_power_dbm = tx_power_dbm
        self.fail_windows = fail_windows or []
        self.rx_log: list[tuple[Packet, float, int]] = []
        channel.add_receiver(self)

    @classmethod
    def fail_windows_from(cls, gateway_id: str, faults: list[FaultSpec]) -> list[tuple[int, int]]:
        return [
            (f.start_ms, f.end_ms)
            for f in faults
            if f.kind is FaultKind.GATEWAY_FAILURE and f.target == gateway_id
        ]

    def failed(self, now_us: int) -> bool:
        t_ms = now_us / 1000
        return any(start <= t_ms < end for start, end in self.fail_windows)

    def on_receive(self, packet: Packet, rssi_dbm: float, now_us: int) -> None:
        if self.failed(now_us):
            return
        if packet.kind not in (PacketKind.DATA, PacketKind.HEARTBEAT):
            return  # noise is interference only; acks are for boards
        self.rx_log.append((packet, rssi_dbm, now_us))
        self.server.on_gateway_reception(self.entity_id, packet, rssi_dbm, now_us)
        if (
            packet.kind is PacketKind.DATA
            and packet.board_role is BoardRole.PRIMARY
            and self.acks_enabled
        ):
            self._send_ack(packet)

    def _send_ack(self, packet: Packet) -> None:
        # A gateway mid-transmission drops the ack; the board's timeout
        # covers the loss with a (benign) retransmission.
        if self.channel.busy_until(self.entity_id) > self.sim.now_us:
            return
        ack = Packet(
            kind=PacketKind.ACK,
            node_id=self.entity_id,
            seq=packet.seq,
            size_bytes=self.ACK_BYTES,
            ack_for=(packet.node_id, packet.seq),
        )
        self.channel.begin_transmission(self.entity_id, self.position, ack, self.tx_power_dbm)
