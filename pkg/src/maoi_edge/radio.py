"""Uplink rate under co-channel interference and per-device transmission time.

All offloading devices share the uplink, so each one sees the aggregate
received power of the other offloaders as interference at the base station.
A device's own rate never depends on its own offload flag: the interference
sum excludes the device itself.
"""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np

from .system_model import DeviceProfile, SystemConfig, total_data_bits


def as_offload_vector(x: Sequence[int] | np.ndarray, n_devices: int) -> np.ndarray:
    """Validate and normalize an offload vector to an int array of 0/1."""
    arr = np.asarray(x, dtype=np.int64)
    if arr.shape != (n_devices,):
        raise ValueError(f"offload vector has shape {arr.shape}, expected ({n_devices},)")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("offload vector entries must be 0 or 1")
    return arr


def interference(d: int, profiles: Sequence[DeviceProfile],
                 x: Sequence[int] | np.ndarray) -> float:
    """Aggregate received power (W) at the BS from other offloading devices."""
    x = as_offload_vector(x, len(profiles))
    return float(sum(x[j] * p.tx_power * p.channel_gain
                     for j, p in enumerate(profiles) if j != d))


def uplink_rate(d: int, profiles: Sequence[DeviceProfile], config: SystemConfig,
                x: Sequence[int] | np.ndarray) -> float:
    """Shannon uplink rate (bit/s) of device ``d`` under offload pattern ``x``."""
    if not 0 <= d < len(profiles):
        raise ValueError(f"device index {d} out of range")
    p = profiles[d]
    sinr = (p.tx_power * p.channel_gain
            / (config.noise_power + interference(d, profiles, x)))
    return config.bandwidth * math.log2(1.0 + sinr)


def transmission_time(d: int, profiles: Sequence[DeviceProfile],
                      config: SystemConfig,
                      x: Sequence[int] | np.ndarray) -> float:
    """Uplink time (s) to ship one full status update of device ``d``."""
    return total_data_bits(profiles[d]) / uplink_rate(d, profiles, config, x)


__all__ = ["as_offload_vector", "interference", "uplink_rate", "transmission_time"]
