"""Device/system parameters and the per-modality time models.

Every device senses three modalities per status update: an image frame, an
audio clip, and a frame-batched signal segment (e.g. radar).  Payload sizes
follow directly from the media parameters; processing cost is expressed in
FLOPs of a reference network per modality and scaled by the input size.
All quantities are SI (seconds, bits, watts, joules, FLOP/s).
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, fields
from pathlib import Path

import yaml


class ModalityKind(enum.IntEnum):
    """The three sensing modalities, in their canonical order."""

    IMAGE = 1
    AUDIO = 2
    SIGNAL = 3


MODALITIES = (ModalityKind.IMAGE, ModalityKind.AUDIO, ModalityKind.SIGNAL)

#: Scheduling policies for the sequential local processor.
SCHEDULE_FIXED = "fixed"
SCHEDULE_BY_WEIGHT = "by_weight"


@dataclass(frozen=True)
class DeviceProfile:
    """Per-device physical, media, energy and age-weight parameters."""

    id: int
    # image
    img_height: int = 224
    img_width: int = 224
    img_channels: int = 3
    # audio
    aud_duration: float = 2.0          # s
    aud_rate: float = 16_000.0         # Hz
    aud_bit_depth: int = 16
    aud_channels: int = 1
    # signal
    sig_duration: float = 3.0          # s
    sig_frame_rate: float = 80.0       # frames/s
    sig_points_per_frame: int = 64
    sig_features_per_point: int = 4
    sig_bits_per_feature: int = 16
    sig_rate: float = 80.0             # Hz
    sig_bit_depth: int = 16
    # radio
    tx_power: float = 0.1              # W
    channel_gain: float = 1e-2
    # sensing energy
    cam_overhead_energy: float = 5e-3  # J per capture
    per_pixel_energy: float = 15e-12   # J/pixel
    aud_baseline_power: float = 8e-3   # W
    adc_scaling: float = 1e-8
    sig_active_power: float = 50e-3    # W
    # age weights and budget
    maoi_weights: tuple[float, float, float] = (1.0, 1.0, 1.0)
    energy_budget: float = 1.0         # J/s

    def __post_init__(self) -> None:
        if self.id < 0:
            raise ValueError(f"device id must be >= 0, got {self.id}")
        positive = (
            "img_height", "img_width", "img_channels", "aud_duration",
            "aud_rate", "aud_bit_depth", "aud_channels", "sig_duration",
            "sig_frame_rate", "sig_points_per_frame", "sig_features_per_point",
            "sig_bits_per_feature", "sig_rate", "sig_bit_depth", "tx_power",
            "channel_gain", "cam_overhead_energy", "per_pixel_energy",
            "aud_baseline_power", "adc_scaling", "sig_active_power",
            "energy_budget",
        )
        for name in positive:
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if len(self.maoi_weights) != 3 or any(w < 0 for w in self.maoi_weights):
            raise ValueError(f"maoi_weights must be 3 values >= 0, got {self.maoi_weights}")
        samples = self.aud_duration * self.aud_rate
        if abs(samples - round(samples)) > 1e-6 * max(1.0, samples):
            raise ValueError(f"aud_duration*aud_rate = {samples} is not an integer sample count")

    def weight(self, modality: ModalityKind) -> float:
        return self.maoi_weights[modality - 1]


@dataclass(frozen=True)
class SystemConfig:
    """Cell-wide constants and solver settings."""

    bandwidth: float = 1e6             # Hz
    noise_power: float = 1e-13         # W (-100 dBm)
    f_local: float = 1e9               # FLOP/s
    f_edge: float = 1e10               # FLOP/s
    energy_per_flop: float = 1e-9      # J/FLOP
    resnet_base_flops: float = 4e9     # at 224x224
    ds2_base_flops_per_sec: float = 5e9
    tft_base_flops: float = 0.45e9     # at tft_base_len frames
    tft_base_len: int = 200
    event_rates: tuple[float, float, float] = (0.8, 0.8, 0.8)  # 1/s
    tau_min: float = 2.0               # s
    capacity_threshold: float = 6e6    # bits of offloaded payload the cell admits
    lagrange_step: float = 0.01
    convergence_eps: float = 1e-3
    newton_max_iters: int = 50
    newton_tol: float = 1e-8
    local_schedule_order: tuple[ModalityKind, ModalityKind, ModalityKind] = MODALITIES
    schedule_policy: str = SCHEDULE_FIXED
    # outer-loop settings
    max_outer_iters: int = 40_000
    energy_tol: float = 0.05           # relative slack on the energy budget at convergence
    mu_init: float = 0.1

    def __post_init__(self) -> None:
        if not (self.f_edge >= self.f_local > 0):
            raise ValueError("need f_edge >= f_local > 0")
        for name in ("bandwidth", "noise_power", "energy_per_flop",
                     "resnet_base_flops", "ds2_base_flops_per_sec",
                     "tft_base_flops", "tft_base_len", "tau_min",
                     "capacity_threshold", "lagrange_step", "convergence_eps",
                     "newton_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        rates = tuple(float(lam) for lam in self.event_rates)
        if len(rates) != 3 or any(lam <= 0 for lam in rates):
            raise ValueError(f"event_rates must be 3 positive values, got {self.event_rates}")
        object.__setattr__(self, "event_rates", rates)
        order = tuple(ModalityKind(m) for m in self.local_schedule_order)
        if sorted(order) != list(MODALITIES):
            raise ValueError(f"local_schedule_order must permute the three modalities, got {order}")
        object.__setattr__(self, "local_schedule_order", order)
        if self.schedule_policy not in (SCHEDULE_FIXED, SCHEDULE_BY_WEIGHT):
            raise ValueError(f"unknown schedule_policy {self.schedule_policy!r}")

    def event_rate(self, modality: ModalityKind) -> float:
        return self.event_rates[modality - 1]


def data_size_bits(profile: DeviceProfile, modality: ModalityKind) -> float:
    """Payload size of one update of the given modality, in bits.

    Signal frame counts are truncated toward zero: a partial frame is not
    emitted.
    """
    if modality is ModalityKind.IMAGE:
        return float(profile.img_height * profile.img_width * 3 * 8)
    if modality is ModalityKind.AUDIO:
        return float(profile.aud_duration * profile.aud_rate
                     * profile.aud_channels * profile.aud_bit_depth)
    n_frames = int(profile.sig_frame_rate * profile.sig_duration)
    return float(n_frames * profile.sig_points_per_frame
                 * profile.sig_features_per_point * profile.sig_bits_per_feature)


def total_data_bits(profile: DeviceProfile) -> float:
    """Total uplink payload of one full status update (all three modalities)."""
    return sum(data_size_bits(profile, m) for m in MODALITIES)


def compute_flops(profile: DeviceProfile, config: SystemConfig,
                  modality: ModalityKind) -> float:
    """Inference cost of one update, scaled from the per-modality baseline.

    Image cost scales with pixel area, audio cost with clip duration, and
    signal cost quadratically with the frame count (self-attention).
    """
    if modality is ModalityKind.IMAGE:
        scale = (profile.img_width * profile.img_height) / (224.0 * 224.0)
        return config.resnet_base_flops * scale
    if modality is ModalityKind.AUDIO:
        return config.ds2_base_flops_per_sec * profile.aud_duration
    n_frames = int(profile.sig_frame_rate * profile.sig_duration)
    return config.tft_base_flops * (n_frames / config.tft_base_len) ** 2


def compute_time(profile: DeviceProfile, config: SystemConfig,
                 modality: ModalityKind, location: str) -> float:
    """Processing time in seconds at ``location`` ("local" or "edge")."""
    if location == "local":
        f_c = config.f_local
    elif location == "edge":
        f_c = config.f_edge
    else:
        raise ValueError(f"location must be 'local' or 'edge', got {location!r}")
    return compute_flops(profile, config, modality) / f_c


def sensing_time(profile: DeviceProfile, modality: ModalityKind) -> float:
    """Acquisition time: zero for a camera shot, clip/segment duration otherwise."""
    if modality is ModalityKind.IMAGE:
        return 0.0
    if modality is ModalityKind.AUDIO:
        return profile.aud_duration
    return profile.sig_duration


def schedule_order(profile: DeviceProfile, config: SystemConfig,
                   ) -> tuple[ModalityKind, ...]:
    """Order in which the local processor serves the modalities.

    Under the ``by_weight`` policy, higher-weight modalities are served
    first (ties broken by modality index); otherwise the configured fixed
    order applies.
    """
    if config.schedule_policy == SCHEDULE_BY_WEIGHT:
        return tuple(sorted(MODALITIES, key=lambda m: (-profile.weight(m), int(m))))
    return config.local_schedule_order


def local_waiting_time(profile: DeviceProfile, config: SystemConfig,
                       modality: ModalityKind) -> float:
    """Queueing delay on the sequential local processor.

    Equals the summed local compute times of every modality scheduled ahead
    of ``modality``.
    """
    order = schedule_order(profile, config)
    rank = order.index(modality)
    return sum(compute_time(profile, config, m, "local") for m in order[:rank])


def system_time(profile: DeviceProfile, config: SystemConfig,
                modality: ModalityKind, offloaded: bool,
                trans_time: float) -> float:
    """End-to-end time from sampling start to processed result.

    ``trans_time`` must be the device's current uplink transmission time
    under the prevailing offload pattern (the radio module computes it).
    The edge processes all modalities in parallel, so no waiting term
    appears on that branch.
    """
    sens = sensing_time(profile, modality)
    if offloaded:
        return sens + trans_time + compute_time(profile, config, modality, "edge")
    return (sens + local_waiting_time(profile, config, modality)
            + compute_time(profile, config, modality, "local"))


# ---------------------------------------------------------------------------
# configuration documents

_MODALITY_NAMES = {"image": ModalityKind.IMAGE, "audio": ModalityKind.AUDIO,
                   "signal": ModalityKind.SIGNAL}


def _coerce_order(value) -> tuple[ModalityKind, ...]:
    out = []
    for item in value:
        if isinstance(item, str):
            out.append(_MODALITY_NAMES[item.lower()])
        else:
            out.append(ModalityKind(item))
    return tuple(out)


def config_from_mapping(doc: dict) -> SystemConfig:
    """Build a SystemConfig from the ``system`` section of a config document."""
    known = {f.name for f in fields(SystemConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown system config fields: {sorted(unknown)}")
    kwargs = dict(doc)
    if "event_rates" in kwargs:
        kwargs["event_rates"] = tuple(float(v) for v in kwargs["event_rates"])
    if "local_schedule_order" in kwargs:
        kwargs["local_schedule_order"] = _coerce_order(kwargs["local_schedule_order"])
    return SystemConfig(**kwargs)


def profile_from_mapping(doc: dict) -> DeviceProfile:
    """Build a DeviceProfile from one device section of a config document."""
    known = {f.name for f in fields(DeviceProfile)}
    unknown = set(doc) - known
    if unknown:
        raise ValueError(f"unknown device fields: {sorted(unknown)}")
    kwargs = dict(doc)
    if "maoi_weights" in kwargs:
        kwargs["maoi_weights"] = tuple(float(v) for v in kwargs["maoi_weights"])
    return DeviceProfile(**kwargs)


def load_config_document(path: str | Path) -> tuple[list[DeviceProfile], SystemConfig]:
    """Load profiles and system config from a YAML or JSON document.

    The document holds one ``system`` section plus a ``devices`` list with
    one section per device; field names match the dataclass fields.
    """
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        doc = json.loads(text)
    else:
        doc = yaml.safe_load(text)
    if not isinstance(doc, dict) or "system" not in doc or "devices" not in doc:
        raise ValueError(f"{path}: expected a mapping with 'system' and 'devices' sections")
    config = config_from_mapping(doc["system"])
    profiles = [profile_from_mapping(d) for d in doc["devices"]]
    if len({p.id for p in profiles}) != len(profiles):
        raise ValueError(f"{path}: duplicate device ids")
    return profiles, config


def dump_config_document(profiles: list[DeviceProfile], config: SystemConfig,
                         path: str | Path) -> None:
    """Write profiles and config back out as a YAML document."""
    sys_doc = {}
    for f in fields(SystemConfig):
        value = getattr(config, f.name)
        if f.name == "local_schedule_order":
            value = [m.name.lower() for m in value]
        elif f.name == "event_rates":
            value = list(value)
        sys_doc[f.name] = value
    dev_docs = []
    for p in profiles:
        d = {f.name: getattr(p, f.name) for f in fields(DeviceProfile)}
        d["maoi_weights"] = list(d["maoi_weights"])
        dev_docs.append(d)
    Path(path).write_text(yaml.safe_dump({"system": sys_doc, "devices": dev_docs},
                                         sort_keys=False))


__all__ = [
    "ModalityKind", "MODALITIES", "SCHEDULE_FIXED", "SCHEDULE_BY_WEIGHT",
    "DeviceProfile", "SystemConfig", "data_size_bits", "total_data_bits",
    "compute_flops", "compute_time", "sensing_time", "schedule_order",
    "local_waiting_time", "system_time", "config_from_mapping",
    "profile_from_mapping", "load_config_document", "dump_config_document",
]
