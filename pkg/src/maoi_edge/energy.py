"""Per-update energy model: sensing, computation, transmission.

Sensing energy is charged once per update.  A device pays either the local
computation energy or the uplink transmission energy, never both, selected
by its offload flag.  Dividing the per-update total by the sampling
interval gives the average power draw that the budget constrains.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from . import radio
from .system_model import MODALITIES, DeviceProfile, SystemConfig, compute_flops


def sensing_energy(profile: DeviceProfile) -> float:
    """Joules spent acquiring one full update (camera + ADC + radar-on time)."""
    e_img = (profile.cam_overhead_energy
             + profile.per_pixel_energy
             * (profile.img_height * profile.img_width * profile.img_channels))
    e_aud = ((profile.aud_baseline_power
              + profile.adc_scaling * profile.aud_rate
              * profile.aud_bit_depth * profile.aud_channels)
             * profile.aud_duration)
    e_sig = profile.sig_active_power * profile.sig_duration
    return e_img + e_aud + e_sig


def computation_energy(profile: DeviceProfile, config: SystemConfig) -> float:
    """Joules for local inference over all three modalities."""
    return config.energy_per_flop * sum(compute_flops(profile, config, m)
                                        for m in MODALITIES)


def transmission_energy(d: int, profiles: Sequence[DeviceProfile],
                        config: SystemConfig,
                        x: Sequence[int] | np.ndarray) -> float:
    """Joules to transmit one full update under offload pattern ``x``."""
    return profiles[d].tx_power * radio.transmission_time(d, profiles, config, x)


def total_energy(d: int, profiles: Sequence[DeviceProfile], config: SystemConfig,
                 x: Sequence[int] | np.ndarray) -> float:
    """Per-update energy of device ``d``: sensing plus compute or transmit."""
    x = radio.as_offload_vector(x, len(profiles))
    profile = profiles[d]
    e = sensing_energy(profile)
    if x[d]:
        return e + transmission_energy(d, profiles, config, x)
    return e + computation_energy(profile, config)


def avg_energy_rate(d: int, profiles: Sequence[DeviceProfile],
                    config: SystemConfig, x: Sequence[int] | np.ndarray,
                    tau_d: float) -> float:
    """Average power draw (J/s) at sampling interval ``tau_d``."""
    if tau_d <= 0:
        raise ValueError(f"sampling interval must be > 0, got {tau_d}")
    return total_energy(d, profiles, config, x) / tau_d


__all__ = ["sensing_energy", "computation_energy", "transmission_energy",
           "total_energy", "avg_energy_rate"]
