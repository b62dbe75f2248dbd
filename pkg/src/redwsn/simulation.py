"""One simulation instance: wires the channel, boards, gateways and noise
from a scenario configuration and produces per-iteration metrics."""

from __future__ import annotations

from typing import TYPE_CHECKING

from .boards import (
    Environment,
    FaultKind,
    PrimaryBoard,
    SecondaryBoard,
)
from .channel import Channel, NoiseSource, start_noise
from .engine import Simulator, ms_to_us
from .gateway import Gateway, Server
from .metrics import (
    IterationMetrics,
    compute_detection_rate,
    compute_prr,
    delay_violations,
    rssi_summary,
)

if TYPE_CHECKING:  # pragma: no cover
    from .scenario import ScenarioConfig


class Simulation:
    """Deterministic single run of a scenario under one master seed."""

    def __init__(self, cfg: "ScenarioConfig", seed: int):
        self.cfg = cfg
        self.seed = seed
        self.sim = Simulator(master_seed=seed)
        self.channel = Channel(self.sim, params=cfg.channel, lora=cfg.lora)
        self.server = Server()

        self.gateways: list[Gateway] = []
        for gw_cfg in cfg.gateways:
            fail_windows = list(gw_cfg.fail_windows)
            fail_windows += Gateway.fail_windows_from(gw_cfg.id, cfg.faults)
            self.gateways.append(
                Gateway(
                    self.sim,
                    self.channel,
                    self.server,
                    gateway_id=gw_cfg.id,
                    position=gw_cfg.position,
                    acks_enabled=gw_cfg.acks_enabled,
                    rx_extra_loss_db=gw_cfg.extra_loss_db,
                    tx_power_dbm=gw_cfg.tx_power_dbm,
                    fail_windows=fail_windows,
                )
            )

        self.primaries: dict[str, PrimaryBoard] = {}
        self.secondaries: dict[str, SecondaryBoard] = {}
        for node_cfg in cfg.nodes:
            env = Environment(self.sim.rng(f"{node_cfg.id}-environment"))
            primary = PrimaryBoard(
                self.sim,
                self.channel,
                node_id=node_cfg.id,
                position=node_cfg.position,
                env=env,
                faults=cfg.faults,
                mac_cfg=cfg.mac,
                thresholds=cfg.thresholds,
                tx_power_dbm=node_cfg.tx_power_dbm,
            )
            self.primaries[node_cfg.id] = primary
            if node_cfg.has_secondary:
                self.secondaries[node_cfg.id] = SecondaryBoard(
                    self.sim,
                    self.channel,
                    node_id=node_cfg.id,
                    position=node_cfg.secondary_position,
                    env=env,
                    faults=cfg.faults,
                    cfg=cfg.secondary,
                    tx_power_dbm=node_cfg.tx_power_dbm,
                )

        self.noise_burst_count = 0

    def run(self) -> IterationMetrics:
        cfg = self.cfg
        duration_us = ms_to_us(cfg.duration_ms)
        for primary in self.primaries.values():
            primary.start()
        for secondary in self.secondaries.values():
            secondary.start()
        if cfg.noise.enabled:
            source = NoiseSource(
                source_id="noise",
                period_ms=cfg.noise.period_ms,
                payload_bytes=cfg.noise.payload_bytes,
                jitter_ms=cfg.noise.jitter_ms,
                position=cfg.noise.position,
                tx_power_dbm=cfg.noise.tx_power_dbm,
            )
            self.noise_burst_count = start_noise(
                self.channel, source, duration_us, self.sim.rng("noise-schedule")
            )
        self.sim.run_until(duration_us)
        return self._metrics()

    # -- metrics -------------------------------------------------------------

    def _fault_active(self, node_id: str, t_ms: float) -> bool:
        """Ground truth: is a board/sensor fault on this node's primary
        active at the given time?"""
        target = f"{node_id}.primary"
        return any(
            f.target == target
            and f.kind
            in (FaultKind.HARD_FAILURE, FaultKind.SENSOR_READ_FAILURE, FaultKind.SENSOR_ANOMALY)
            and f.active(t_ms)
            for f in self.cfg.faults
        )

    def _metrics(self) -> IterationMetrics:
        cfg = self.cfg
        entries = self.server.deduplicated()
        bound = cfg.max_monitoring_delay_ms
        # Only epochs whose whole monitoring window fits inside the run are
        # scored; a window truncated by the horizon cannot be evaluated.
        slots_by_node = {
            node_id: [
                t / 1000
                for t in primary.expected_slots_us
                if t / 1000 + bound <= cfg.duration_ms
            ]
            for node_id, primary in self.primaries.items()
        }
        prr = compute_prr(entries, slots_by_node, bound)
        prr_primary = compute_prr(entries, slots_by_node, bound, roles=("primary",))

        faulty_missed = sum(
            1
            for node, slots in slots_by_node.items()
            for slot in slots
            if self._fault_active(node, slot)
        )
        detection = None
        if faulty_missed:
            detection = compute_detection_rate(entries, slots_by_node, self._fault_active, bound)

        violations = delay_violations(entries, list(slots_by_node), cfg.duration_ms, bound)
        rssi = {
            gw.entity_id: rssi_summary([r for _, r, _ in gw.rx_log]) for gw in self.gateways
        }
        return IterationMetrics(
            seed=self.seed,
            prr_redundant=prr,
            prr_primary_only=prr_primary,
            detection_rate=detection,
            delay_violations=violations,
            duplicate_count=self.server.duplicate_count,
            epochs_total=sum(len(s) for s in slots_by_node.values()),
            epochs_fault_active=faulty_missed,
            rssi=rssi,
        )
