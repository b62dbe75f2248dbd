"""Scenario configuration, presets, multi-seed execution and report export.

Configs load from either a flat dotted-key text file (``mac.slot_min_ms=20000``)
or a JSON document with the same key paths; unknown keys are rejected by
name.  Presets reproduce the standard experiment setups: one sensor node
(primary + secondary board), one noise board, one gateway, 30-minute runs
with the fault active from minute 5 to minute 25.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field, replace

from .boards import DEFAULT_THRESHOLDS, FaultKind, FaultSpec, SecondaryConfig, ThresholdTable
from .channel import ChannelParams, Position
from .lora import LoraParams
from .mac import SarbConfig
from .metrics import IterationMetrics, MetricsReport, compare_reports
from .simulation import Simulation


class ConfigError(ValueError):
    """Invalid or unknown scenario configuration."""


@dataclass(frozen=True)
class NodeConfig:
    id: str
    position: Position = Position(2.0, 0.0)
    has_secondary: bool = True
    tx_power_dbm: float = 14.0

    @property
    def secondary_position(self) -> Position:
        # The spare sits on the same node, a hand's width from the primary.
        return Position(self.position.x, self.position.y + 0.1)


@dataclass(frozen=True)
class GatewayConfig:
    id: str
    position: Position = Position(0.0, 0.0)
    acks_enabled: bool = True
    extra_loss_db: float = 0.0
    tx_power_dbm: float = 14.0
    fail_windows: tuple[tuple[int, int], ...] = ()


@dataclass(frozen=True)
class NoiseConfig:
    enabled: bool = True
    period_ms: int = 500
    payload_bytes: int = 10
    # Jitter breaks the phase lock between the burst train and the MAC
    # timers, which all live on the same 500 ms grid.
    jitter_ms: int = 50
    position: Position = Position(-1.5, 0.5)
    tx_power_dbm: float = 14.0


@dataclass(frozen=True)
class ScenarioConfig:
    name: str = "custom"
    duration_ms: int = 1_800_000
    iterations: int = 3
    base_seed: int = 1
    max_monitoring_delay_ms: int = 40_000
    nodes: tuple[NodeConfig, ...] = (NodeConfig(id="n1"),)
    gateways: tuple[GatewayConfig, ...] = (GatewayConfig(id="gw-home"),)
    faults: tuple[FaultSpec, ...] = ()
    noise: NoiseConfig = NoiseConfig()
    mac: SarbConfig = SarbConfig()
    channel: ChannelParams = ChannelParams()
    lora: LoraParams = LoraParams()
    secondary: SecondaryConfig = SecondaryConfig()
    thresholds: ThresholdTable = DEFAULT_THRESHOLDS

    def __post_init__(self):
        if self.duration_ms <= 0:
            raise ConfigError("duration_ms must be positive")
        if self.iterations < 1:
            raise ConfigError("iterations must be at least 1")
        if not self.nodes:
            raise ConfigError("at least one node is required")
        if not self.gateways:
            raise ConfigError("at least one gateway is required")
        if self.secondary.sensing_interval_ms <= self.mac.slot_max_ms:
            raise ConfigError("sensing interval must exceed the maximum transmission interval")
        self._check_fault_overlap()

    def _check_fault_overlap(self):
        hard = [f for f in self.faults if f.kind is FaultKind.HARD_FAILURE]
        for i, a in enumerate(hard):
            for b in hard[i + 1 :]:
                if a.target == b.target and a.start_ms < b.end_ms and b.start_ms < a.end_ms:
                    raise ConfigError(f"overlapping hard failures on {a.target}")

    def seeds(self) -> list[int]:
        return [self.base_seed + i for i in range(self.iterations)]


# -- presets -----------------------------------------------------------------

PRESET_NAMES = (
    "control-clean",
    "control-noise",
    "control-noise-noSARB",
    "HF",
    "SF1",
    "SF2",
    "GWF",
    "HF-noSARB",
    "SF1-noSARB",
    "SF2-noSARB",
    "HF-noRedundancy",
    "SF1-noRedundancy",
    "SF2-noRedundancy",
)

_FAULT_WINDOW = (300_000, 1_500_000)  # minutes 5..25 of a 30-minute run


def _board_fault(kind: FaultKind, sensor: str | None = None) -> FaultSpec:
    return FaultSpec(
        kind=kind,
        target="n1.primary",
        start_ms=_FAULT_WINDOW[0],
        end_ms=_FAULT_WINDOW[1],
        affected_sensor=sensor,
    )


def build_preset(name: str) -> ScenarioConfig:
    """Expand a preset name into a full scenario config (pure function)."""
    base = ScenarioConfig(name=name)
    variant = name
    no_sarb = variant.endswith("-noSARB")
    no_redundancy = variant.endswith("-noRedundancy")
    root = variant.replace("-noSARB", "").replace("-noRedundancy", "")

    if root == "control-clean":
        cfg = replace(base, noise=replace(base.noise, enabled=False))
    elif root == "control-noise":
        cfg = base
    elif root == "HF":
        cfg = replace(base, faults=(_board_fault(FaultKind.HARD_FAILURE),))
    elif root == "SF1":
        cfg = replace(base, faults=(_board_fault(FaultKind.SENSOR_READ_FAILURE, "co2_ppm"),))
    elif root == "SF2":
        cfg = replace(base, faults=(_board_fault(FaultKind.SENSOR_ANOMALY, "co2_ppm"),))
    elif root == "GWF":
        cfg = replace(
            base,
            gateways=(
                GatewayConfig(id="gw-home", fail_windows=(_FAULT_WINDOW,)),
                GatewayConfig(
                    id="gw-backup",
                    position=Position(12.0, 0.0),
                    acks_enabled=False,
                    extra_loss_db=4.0,  # one wall in the path
                ),
            ),
        )
    else:
        raise ConfigError(f"unknown preset: {name!r} (see `sim presets`)")

    if no_sarb:
        cfg = replace(cfg, mac=replace(cfg.mac, enabled=False))
    if no_redundancy:
        cfg = replace(cfg, nodes=tuple(replace(n, has_secondary=False) for n in cfg.nodes))
    return cfg


# -- loading -------------------------------------------------------------------

_SECTION_TYPES = {
    "mac": SarbConfig,
    "noise": NoiseConfig,
    "channel": ChannelParams,
    "lora": LoraParams,
    "secondary": SecondaryConfig,
}
_TOP_SCALARS = {
    "name": str,
    "duration_ms": int,
    "iterations": int,
    "base_seed": int,
    "max_monitoring_delay_ms": int,
    "preset": str,
}


def _coerce(raw: str, target_type):
    if target_type is bool or target_type == "bool":
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"expected a boolean, got {raw!r}")
    if target_type is int:
        return int(raw)
    if target_type is float:
        return float(raw)
    return raw


def _parse_flat(text: str) -> dict:
    """Dotted-key lines into a nested dict; '#' starts a comment."""
    tree: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected key=value, got {stripped!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        node = tree
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"line {lineno}: key {key!r} conflicts with earlier value")
        node[parts[-1]] = raw
    return tree


def _apply_section(cfg_obj, section: str, overrides: dict):
    fields = type(cfg_obj).__dataclass_fields__
    kwargs = {}
    for key, raw in overrides.items():
        if key not in fields:
            raise ConfigError(f"unknown key: {section}.{key}")
        ftype = fields[key].type
        current = getattr(cfg_obj, key)
        if isinstance(raw, str):
            if isinstance(current, bool) or ftype == "bool":
                value = _coerce(raw, bool)
            elif isinstance(current, int) and not isinstance(current, bool):
                value = int(raw)
            elif isinstance(current, float):
                value = float(raw)
            elif isinstance(current, Position):
                raise ConfigError(f"{section}.{key}: positions need JSON configs")
            else:
                value = raw
        else:
            value = raw
        kwargs[key] = value
    return replace(cfg_obj, **kwargs)


def _config_from_tree(tree: dict) -> ScenarioConfig:
    tree = dict(tree)
    preset = tree.pop("preset", None)
    cfg = build_preset(str(preset)) if preset else ScenarioConfig()

    top_kwargs = {}
    for key in list(tree):
        value = tree[key]
        if key in _TOP_SCALARS:
            top_kwargs[key] = _coerce(value, _TOP_SCALARS[key]) if isinstance(value, str) else value
            tree.pop(key)
    if top_kwargs:
        cfg = replace(cfg, **top_kwargs)

    for section in list(tree):
        value = tree.pop(section)
        if section in _SECTION_TYPES:
            if not isinstance(value, dict):
                raise ConfigError(f"section {section!r} must hold nested keys")
            updated = _apply_section(getattr(cfg, section), section, value)
            cfg = replace(cfg, **{section: updated})
        elif section == "nodes":
            cfg = replace(cfg, nodes=tuple(_node_from_dict(v) for v in value))
        elif section == "gateways":
            cfg = replace(cfg, gateways=tuple(_gateway_from_dict(v) for v in value))
        elif section == "faults":
            cfg = replace(cfg, faults=tuple(_fault_from_dict(v) for v in value))
        else:
            raise ConfigError(f"unknown key: {section}")
    return cfg


def _position_from(value) -> Position:
    if isinstance(value, dict):
        return Position(float(value["x"]), float(value["y"]))
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return Position(float(value[0]), float(value[1]))
    raise ConfigError(f"cannot parse position from {value!r}")


def _node_from_dict(value: dict) -> NodeConfig:
    allowed = {"id", "position", "has_secondary", "tx_power_dbm"}
    _reject_unknown(value, allowed, "nodes")
    kwargs = dict(value)
    if "position" in kwargs:
        kwargs["position"] = _position_from(kwargs["position"])
    return NodeConfig(**kwargs)


def _gateway_from_dict(value: dict) -> GatewayConfig:
    allowed = {"id", "position", "acks_enabled", "extra_loss_db", "tx_power_dbm", "fail_windows"}
    _reject_unknown(value, allowed, "gateways")
    kwargs = dict(value)
    if "position" in kwargs:
        kwargs["position"] = _position_from(kwargs["position"])
    if "fail_windows" in kwargs:
        kwargs["fail_windows"] = tuple((int(a), int(b)) for a, b in kwargs["fail_windows"])
    return GatewayConfig(**kwargs)


def _fault_from_dict(value: dict) -> FaultSpec:
    allowed = {"kind", "target", "start_ms", "end_ms", "affected_sensor", "anomaly_multiplier"}
    _reject_unknown(value, allowed, "faults")
    kwargs = dict(value)
    kwargs["kind"] = FaultKind(kwargs["kind"])
    return FaultSpec(**kwargs)


def _reject_unknown(value: dict, allowed: set, section: str):
    for key in value:
        if key not in allowed:
            raise ConfigError(f"unknown key: {section}.{key}")


def load_scenario(path: str) -> ScenarioConfig:
    """Load and validate a scenario config from a flat-text or JSON file."""
    if not os.path.exists(path):
        raise ConfigError(f"no such config file: {path}")
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    try:
        if stripped.startswith("{"):
            tree = json.loads(text)
        else:
            tree = _parse_flat(text)
        return _config_from_tree(tree)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(str(exc)) from exc


def resolve_scenario(name_or_path: str) -> ScenarioConfig:
    """A preset name, or a path to a config file."""
    if name_or_path in PRESET_NAMES:
        return build_preset(name_or_path)
    return load_scenario(name_or_path)


# -- execution and export ------------------------------------------------------


def run_scenario(cfg: ScenarioConfig, seeds: list[int] | None = None) -> MetricsReport:
    """One independent simulation per seed, aggregated into a report."""
    seeds = list(seeds) if seeds is not None else cfg.seeds()
    iterations: list[IterationMetrics] = [Simulation(cfg, seed).run() for seed in seeds]
    return MetricsReport(scenario=cfg.name, seeds=seeds, iterations=iterations)


def report_to_json(report: MetricsReport) -> str:
    return json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n"


def _csv_rows(report: MetricsReport) -> list[tuple[str, str, str, str]]:
    rows = []
    for it in report.iterations:
        flat = it.as_dict()
        rssi = flat.pop("rssi")
        iteration = str(flat.pop("seed"))
        for metric, value in flat.items():
            rows.append((report.scenario, iteration, metric, _fmt(value)))
        for gw_id, stats in rssi.items():
            for stat, value in stats.items():
                rows.append((report.scenario, iteration, f"rssi.{gw_id}.{stat}", _fmt(value)))
    for metric, value in report.summary().items():
        rows.append((report.scenario, "mean", metric, _fmt(value)))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def report_to_csv(report: MetricsReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("scenario", "iteration", "metric", "value"))
    writer.writerows(_csv_rows(report))
    return buf.getvalue()


def export_report(report: MetricsReport, fmt: str, path: str) -> None:
    if fmt == "json":
        payload = report_to_json(report)
    elif fmt == "csv":
        payload = report_to_csv(report)
    else:
        raise ValueError(f"unsupported format: {fmt!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(payload)


compare_scenarios = compare_reports
