"""Scenario metrics: PRR, detection rate, delay violations, RSSI stats.

A *monitoring epoch* is an expected primary data slot.  An epoch counts as
covered when a valid data packet from the node (either board) reaches the
server within the maximum monitoring delay of the slot time; validity means
complete, non-anomalous sensor data.  Using expected slots as the common
denominator lets the with- and without-redundancy ratios share one base.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .gateway import ServerEntry


def _covered(
    entries: list[ServerEntry],
    node_id: str,
    slot_ms: float,
    bound_ms: float,
    roles: tuple[str, ...],
) -> bool:
    return any(
        e.node_id == node_id
        and e.kind == "data"
        and e.valid
        and e.board_role in roles
        and slot_ms <= e.time_ms < slot_ms + bound_ms
        for e in entries
    )


def compute_prr(
    entries: list[ServerEntry],
    slots_by_node: dict[str, list[float]],
    bound_ms: float = 40_000.0,
    roles: tuple[str, ...] = ("primary", "secondary"),
) -> float:
    """Fraction of monitoring epochs covered by a valid data reception."""
    total = sum(len(slots) for slots in slots_by_node.values())
    if total == 0:
        raise ValueError("expected schedule is empty")
    covered = sum(
        _covered(entries, node, slot, bound_ms, roles)
        for node, slots in slots_by_node.items()
        for slot in slots
    )
    return covered / total


def compute_detection_rate(
    entries: list[ServerEntry],
    slots_by_node: dict[str, list[float]],
    fault_active: Callable[[str, float], bool],
    bound_ms: float = 40_000.0,
) -> float:
    """Secondary responsiveness on faulty/missed primary epochs.

    Denominator: epochs whose slot falls inside a fault window on the node's
    primary board and that no valid primary packet served within the bound
    (the primary either stayed silent or shipped faulty data).  Numerator:
    those epochs for which a secondary backup/corrective packet was received
    within the bound.
    """
    missed = 0
    detected = 0
    for node, slots in slots_by_node.items():
        for slot in slots:
            if not fault_active(node, slot):
                continue
            if _covered(entries, node, slot, bound_ms, roles=("primary",)):
                continue
            missed += 1
            if _covered(entries, node, slot, bound_ms, roles=("secondary",)):
                detected += 1
    if missed == 0:
        raise ValueError("scenario produced no faulty/missed primary epochs")
    return detected / missed


def delay_violations(
    entries: list[ServerEntry],
    node_ids: list[str],
    duration_ms: float,
    bound_ms: float = 40_000.0,
) -> int:
    """Count of per-node gaps between consecutive valid data receptions that
    exceed the maximum monitoring delay (run boundaries included)."""
    if bound_ms <= 0:
        raise ValueError("bound must be positive")
    violations = 0
    for node in node_ids:
        times = sorted(
            e.time_ms for e in entries if e.node_id == node and e.kind == "data" and e.valid
        )
        checkpoints = [0.0, *times, duration_ms]
        violations += sum(
            1 for a, b in zip(checkpoints, checkpoints[1:]) if b - a > bound_ms
        )
    return violations


def rssi_summary(samples: list[float]) -> dict[str, float]:
    """Distribution stats of one gateway's RSSI log; empty log, empty stats."""
    if not samples:
        return {"count": 0}
    arr = np.asarray(samples, dtype=float)
    return {
        "count": int(arr.size),
        "min": float(arr.min()),
        "q1": float(np.percentile(arr, 25)),
        "median": float(np.median(arr)),
        "q3": float(np.percentile(arr, 75)),
        "max": float(arr.max()),
        "mean": float(arr.mean()),
    }


@dataclass
class IterationMetrics:
    seed: int
    prr_redundant: float
    prr_primary_only: float
    detection_rate: Optional[float]
    delay_violations: int
    duplicate_count: int
    epochs_total: int
    epochs_fault_active: int
    rssi: dict[str, dict[str, float]] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "prr_redundant": self.prr_redundant,
            "prr_primary_only": self.prr_primary_only,
            "detection_rate": self.detection_rate,
            "delay_violations": self.delay_violations,
            "duplicate_count": self.duplicate_count,
            "epochs_total": self.epochs_total,
            "epochs_fault_active": self.epochs_fault_active,
            "rssi": self.rssi,
        }


_MEAN_FIELDS = (
    "prr_redundant",
    "prr_primary_only",
    "detection_rate",
    "delay_violations",
    "duplicate_count",
)


@dataclass
class MetricsReport:
    scenario: str
    seeds: list[int]
    iterations: list[IterationMetrics]

    def mean(self, metric: str) -> Optional[float]:
        values = [getattr(it, metric) for it in self.iterations]
        if any(v is None for v in values):
            return None
        return float(np.mean(values))

    def summary(self) -> dict:
        out = {}
        for name in _MEAN_FIELDS:
            m = self.mean(name)
            out[f"mean_{name}"] = m
        return out

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "seeds": list(self.seeds),
            "iterations": [it.as_dict() for it in self.iterations],
            "summary": self.summary(),
        }


def compare_reports(a: MetricsReport, b: MetricsReport, metric: str) -> float:
    """Difference of the mean metric (a minus b) in percentage points."""
    ma, mb = a.mean(metric), b.mean(metric)
    if ma is None or mb is None:
        raise ValueError(f"metric {metric!r} missing from one of the reports")
    return (ma - mb) * 100.0
