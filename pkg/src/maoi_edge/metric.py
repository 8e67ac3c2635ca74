"""Modality-tailored age metric: content attributes, growth model, closed forms.

The age of an update grows at slope 1 while nothing interesting happens and
at slope ``1 + psi`` whenever at least one content event (Poisson, rate
``lambda_s``) fell inside the sampling interval.  The modality weight
``psi`` aggregates content attributes extracted from the raw frames:

* image:  pixel-difference dynamism + region-of-interest ratio,
* audio:  semantic frame variation + (normalized) rate-times-depth quality,
* signal: descriptor dynamics + (normalized) rate-times-depth quality.

Weights may be supplied directly (the optimizer only ever consumes the
numbers) or extracted from frame sequences via the functions below.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import energy, radio
from .system_model import (
    MODALITIES,
    DeviceProfile,
    SystemConfig,
    system_time,
)

OBJECTIVE_MAOI = "maoi"
OBJECTIVE_AOI = "aoi"
OBJECTIVES = (OBJECTIVE_MAOI, OBJECTIVE_AOI)


# ---------------------------------------------------------------------------
# content attributes

def _as_frames(frames: Sequence) -> list[np.ndarray]:
    out = [np.asarray(f, dtype=float) for f in frames]
    if len(out) < 2:
        raise ValueError(f"need at least 2 frames, got {len(out)}")
    shape = out[0].shape
    for i, f in enumerate(out):
        if f.shape != shape:
            raise ValueError(f"frame {i} has shape {f.shape}, expected {shape}")
    return out


def image_dynamism(frames: Sequence) -> float:
    """Mean absolute pixel difference, averaged over consecutive frame pairs."""
    fs = _as_frames(frames)
    diffs = [np.abs(a - b).mean() for a, b in zip(fs[1:], fs[:-1])]
    return float(np.mean(diffs))


def roi_ratio(roi_area: float, total_area: float) -> float:
    """Fraction of the frame covered by regions of interest."""
    if total_area <= 0:
        raise ValueError(f"total_area must be > 0, got {total_area}")
    if not 0 <= roi_area <= total_area:
        raise ValueError(f"roi_area {roi_area} outside [0, {total_area}]")
    return roi_area / total_area


def audio_semantic_variation(frames: Sequence) -> float:
    """Mean absolute feature change between consecutive audio frames."""
    fs = _as_frames(frames)
    diffs = [np.abs(a - b).mean() for a, b in zip(fs[1:], fs[:-1])]
    return float(np.mean(diffs))


def signal_dynamics(frames: Sequence) -> float:
    """Mean squared difference between consecutive frame descriptors.

    Each frame is a point set of shape ``(n_points, n_features)``; its
    descriptor is the per-feature mean over detected points.
    """
    if len(frames) < 2:
        raise ValueError(f"need at least 2 frames, got {len(frames)}")
    descriptors = []
    for i, frame in enumerate(frames):
        pts = np.asarray(frame, dtype=float)
        if pts.ndim != 2:
            raise ValueError(f"frame {i} must be 2-D (points x features), got ndim={pts.ndim}")
        if pts.shape[0] == 0:
            raise ValueError(f"frame {i} has no detected points")
        descriptors.append(pts.mean(axis=0))
    z = np.stack(descriptors)
    if z.shape[1] == 0:
        raise ValueError("frames carry no features")
    return float(np.mean((z[1:] - z[:-1]) ** 2))


@dataclass(frozen=True)
class NormalizationConfig:
    """Reference rate/depth products that scale the raw quality terms to O(1).

    Setting all references to 1 recovers the raw rate-times-depth products.
    """

    aud_ref_rate: float = 16_000.0
    aud_ref_depth: float = 16.0
    sig_ref_rate: float = 80.0
    sig_ref_depth: float = 16.0

    def __post_init__(self) -> None:
        for name in ("aud_ref_rate", "aud_ref_depth", "sig_ref_rate", "sig_ref_depth"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


def quality_terms(profile: DeviceProfile,
                  norm: NormalizationConfig = NormalizationConfig(),
                  ) -> tuple[float, float]:
    """Audio and signal acquisition-quality attributes (rate x bit depth)."""
    if profile.aud_bit_depth <= 0 or profile.sig_bit_depth <= 0:
        raise ValueError("bit depths must be > 0")
    q_aud = (profile.aud_rate * profile.aud_bit_depth) / (norm.aud_ref_rate * norm.aud_ref_depth)
    q_sig = (profile.sig_rate * profile.sig_bit_depth) / (norm.sig_ref_rate * norm.sig_ref_depth)
    return q_aud, q_sig


@dataclass(frozen=True)
class ModalityWeights:
    """Per-modality age-growth weights with their provenance."""

    psi: tuple[float, float, float]
    provenance: str = "direct"  # "direct" or "extracted"

    def __post_init__(self) -> None:
        if len(self.psi) != 3 or any(p < 0 for p in self.psi):
            raise ValueError(f"psi must be 3 values >= 0, got {self.psi}")
        if self.provenance not in ("direct", "extracted"):
            raise ValueError(f"unknown provenance {self.provenance!r}")


def extract_weights(profile: DeviceProfile,
                    image_frames: Sequence,
                    roi_area: float,
                    audio_frames: Sequence,
                    signal_frames: Sequence,
                    norm: NormalizationConfig = NormalizationConfig(),
                    ) -> ModalityWeights:
    """Aggregate content attributes into the three modality weights."""
    total_area = float(profile.img_height * profile.img_width)
    psi_img = image_dynamism(image_frames) + roi_ratio(roi_area, total_area)
    q_aud, q_sig = quality_terms(profile, norm)
    psi_aud = q_aud + audio_semantic_variation(audio_frames)
    psi_sig = signal_dynamics(signal_frames) + q_sig
    return ModalityWeights(psi=(psi_img, psi_aud, psi_sig), provenance="extracted")


# ---------------------------------------------------------------------------
# growth model and closed-form averages

def growth_rate_pmf(psi_s: float, lambda_s: float, tau: float,
                    ) -> tuple[tuple[float, float], tuple[float, float]]:
    """Two-point PMF of the age growth rate over one sampling interval.

    Returns ``((1, p_quiet), (1 + psi, p_event))`` where ``p_event`` is the
    probability that at least one Poisson event lands in the interval.
    """
    if tau <= 0:
        raise ValueError(f"tau must be > 0, got {tau}")
    p_event = 1.0 - math.exp(-lambda_s * tau)
    return ((1.0, 1.0 - p_event), (1.0 + psi_s, p_event))


def growth_rate_expectation(psi_s: float, lambda_s: float, tau: float) -> float:
    """Expected growth rate: 1 + psi * P(at least one event in tau)."""
    return 1.0 + psi_s * (1.0 - math.exp(-lambda_s * tau))


def avg_maoi_modality(psi_s: float, lambda_s: float, tau: float,
                      t_sys: float) -> float:
    """Long-run average modality age for interval ``tau`` and system time ``t_sys``.

    With ``psi_s = 0`` this reduces to the classical sawtooth average
    ``tau/2 + t_sys``.
    """
    return growth_rate_expectation(psi_s, lambda_s, tau) * (0.5 * tau + t_sys)


def device_system_times(profiles: Sequence[DeviceProfile], config: SystemConfig,
                        d: int, x: Sequence[int] | np.ndarray,
                        ) -> tuple[float, float, float]:
    """System times of all three modalities of device ``d`` under pattern ``x``."""
    xv = radio.as_offload_vector(x, len(profiles))
    offloaded = bool(xv[d])
    trans = radio.transmission_time(d, profiles, config, x) if offloaded else 0.0
    return tuple(system_time(profiles[d], config, m, offloaded, trans)
                 for m in MODALITIES)


def _device_psi(profile: DeviceProfile, objective: str) -> tuple[float, float, float]:
    if objective == OBJECTIVE_MAOI:
        return profile.maoi_weights
    if objective == OBJECTIVE_AOI:
        return (0.0, 0.0, 0.0)
    raise ValueError(f"unknown objective {objective!r}")


def avg_maoi_device(profiles: Sequence[DeviceProfile], config: SystemConfig,
                    d: int, tau_d: float, x: Sequence[int] | np.ndarray,
                    objective: str = OBJECTIVE_MAOI) -> float:
    """Weighted average age of device ``d``, summed over its three modalities."""
    t_sys = device_system_times(profiles, config, d, x)
    psi = _device_psi(profiles[d], objective)
    return sum(avg_maoi_modality(psi[s], config.event_rates[s], tau_d, t_sys[s])
               for s in range(3))


def penalized_cost(profiles: Sequence[DeviceProfile], config: SystemConfig,
                   d: int, tau_d: float, mu_d: float,
                   x: Sequence[int] | np.ndarray,
                   objective: str = OBJECTIVE_MAOI) -> float:
    """Device age plus the Lagrangian energy-budget penalty."""
    age = avg_maoi_device(profiles, config, d, tau_d, x, objective)
    e_rate = energy.avg_energy_rate(d, profiles, config, x, tau_d)
    return age + mu_d * (e_rate - profiles[d].energy_budget)


def system_cost(profiles: Sequence[DeviceProfile], config: SystemConfig,
                tau: Sequence[float], mu: Sequence[float],
                x: Sequence[int] | np.ndarray,
                objective: str = OBJECTIVE_MAOI) -> float:
    """Sum of penalized device costs; the outer loop's convergence quantity.

    The ``aoi`` objective zeroes the modality weights inside the age term
    only; energy penalties are unchanged.
    """
    return sum(penalized_cost(profiles, config, d, tau[d], mu[d], x, objective)
               for d in range(len(profiles)))


# ---------------------------------------------------------------------------
# frame-sequence ingestion (columnar text, one frame per record)

def read_frames(path: str | Path) -> list[np.ndarray]:
    """Read flat frames from a text file: one whitespace-separated row each.

    Blank lines and ``#`` comments are skipped.
    """
    frames = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        frames.append(np.array([float(tok) for tok in line.split()]))
    return frames


def read_signal_frames(path: str | Path, n_features: int) -> list[np.ndarray]:
    """Read signal frames, reshaping each record into (n_points, n_features)."""
    if n_features <= 0:
        raise ValueError(f"n_features must be > 0, got {n_features}")
    frames = []
    for i, flat in enumerate(read_frames(path)):
        if flat.size % n_features != 0:
            raise ValueError(f"record {i} has {flat.size} values, "
                             f"not a multiple of {n_features}")
        frames.append(flat.reshape(-1, n_features))
    return frames


__all__ = [
    "OBJECTIVE_MAOI", "OBJECTIVE_AOI", "OBJECTIVES",
    "image_dynamism", "roi_ratio", "audio_semantic_variation", "signal_dynamics",
    "NormalizationConfig", "quality_terms", "ModalityWeights", "extract_weights",
    "growth_rate_pmf", "growth_rate_expectation", "avg_maoi_modality",
    "device_system_times", "avg_maoi_device", "penalized_cost", "system_cost",
    "read_frames", "read_signal_frames",
]
