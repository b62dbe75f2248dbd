"""LoRa time-on-air from the SX127x symbol-count formula."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .engine import ms_to_us


@dataclass(frozen=True)
class LoraParams:
    """Radio settings of the single shared channel.

    Defaults: SF7, 125 kHz, coding rate 4/5, 8-symbol preamble, explicit
    header, CRC on, no low-data-rate optimization.  Frequency is metadata
    only (868 MHz band); the simulation is single-channel.
    """

    spreading_factor: int = 7
    bandwidth_hz: int = 125_000
    coding_rate_denominator: int = 5  # 4/5 .. 4/8
    preamble_symbols: int = 8
    explicit_header: bool = True
    crc_on: bool = True
    low_data_rate_optimize: bool = False
    frequency_hz: int = 868_000_000

    def __post_init__(self):
        if not 6 <= self.spreading_factor <= 12:
            raise ValueError("spreading factor must be in 6..12")
        if not 5 <= self.coding_rate_denominator <= 8:
            raise ValueError("coding rate denominator must be in 5..8 (4/5..4/8)")
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth must be positive")
        if self.preamble_symbols <= 0:
            raise ValueError("preamble must have at least one symbol")


def symbol_time_ms(params: LoraParams) -> float:
    return (2 ** params.spreading_factor) / params.bandwidth_hz * 1000.0


def time_on_air_ms(payload_bytes: int, params: LoraParams = LoraParams()) -> float:
    """Frame duration in milliseconds for a payload of the given size.

    Preamble time plus payload time, with the payload symbol count

        8 + max(ceil((8*PL - 4*SF + 28 + 16*CRC - 20*IH) / (4*(SF - 2*DE))) * (CR + 4), 0)

    where CR is the coding-rate numerator excess (1..4), IH=1 for implicit
    header and DE=1 with low-data-rate optimization.
    """
    if payload_bytes < 0:
        raise ValueError("payload size must be non-negative")
    sf = params.spreading_factor
    t_sym = symbol_time_ms(params)
    de = 1 if params.low_data_rate_optimize else 0
    ih = 0 if params.explicit_header else 1
    crc = 1 if params.crc_on else 0
    cr = params.coding_rate_denominator - 4
    numerator = 8 * payload_bytes - 4 * sf + 28 + 16 * crc - 20 * ih
    payload_symbols = 8 + max(math.ceil(numerator / (4 * (sf - 2 * de))) * (cr + 4), 0)
    preamble_symbols = params.preamble_symbols + 4.25
    return (preamble_symbols + payload_symbols) * t_sym


def time_on_air_us(payload_bytes: int, params: LoraParams = LoraParams()) -> int:
    return ms_to_us(time_on_air_ms(payload_bytes, params))
