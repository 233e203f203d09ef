"""Bistatic ring-array geometry and background-medium constants.

Emitters sit on a ring of radius 0.76 m every 10 degrees; receivers on a
ring of radius 0.72 m every 5 degrees, indexed on the absolute angular grid
(index 1 at angle 0). Which receivers are valid for a given emitter is not
geometry but masking, handled by the msr module. All public indices are
1-based; angles are radians internally, degrees only in configuration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class MediumParams:
    """Homogeneous background medium (free-space values by default)."""

    conductivity: float = 0.0                      # S/m
    permeability: float = 4.0e-7 * math.pi         # H/m
    permittivity: float = 8.854e-12                # F/m

    def __post_init__(self):
        if self.permeability <= 0.0 or self.permittivity <= 0.0:
            raise ConfigurationError("permeability and permittivity must be positive")
        if self.conductivity != 0.0:
            raise ConfigurationError("lossy background is not supported (conductivity must be 0)")


@dataclass(frozen=True)
class ArrayConfig:
    """Emitter/receiver ring layout and the receiver validity window.

    The aperture window [aperture_start_deg, aperture_end_deg] is measured
    relative to the transmitting emitter's direction.
    """

    emitter_radius: float = 0.76       # m
    receiver_radius: float = 0.72      # m
    emitter_count: int = 36
    receiver_count: int = 72
    emitter_step_deg: float = 10.0
    receiver_step_deg: float = 5.0
    aperture_start_deg: float = 60.0
    aperture_end_deg: float = 300.0

    def __post_init__(self):
        if self.emitter_radius <= 0.0 or self.receiver_radius <= 0.0:
            raise ConfigurationError("ring radii must be positive")
        if self.emitter_count < 1 or self.receiver_count < 1:
            raise ConfigurationError("station counts must be positive")
        if not math.isclose(self.emitter_count * self.emitter_step_deg, 360.0, abs_tol=1e-9):
            raise ConfigurationError("emitter_count * emitter_step_deg must equal 360")
        if not math.isclose(self.receiver_count * self.receiver_step_deg, 360.0, abs_tol=1e-9):
            raise ConfigurationError("receiver_count * receiver_step_deg must equal 360")
        if not 0.0 <= self.aperture_start_deg <= self.aperture_end_deg <= 360.0:
            raise ConfigurationError("aperture window must satisfy 0 <= start <= end <= 360")

    def emitter_angle(self, m: int) -> float:
        """Angle of emitter m (radians)."""
        if not 1 <= m <= self.emitter_count:
            raise DomainError(f"emitter index {m} outside 1..{self.emitter_count}")
        return math.radians(self.emitter_step_deg * (m - 1))

    def receiver_angle(self, n: int) -> float:
        """Angle of receiver n on the absolute grid (radians)."""
        if not 1 <= n <= self.receiver_count:
            raise DomainError(f"receiver index {n} outside 1..{self.receiver_count}")
        return math.radians(self.receiver_step_deg * (n - 1))

    def emitter_position(self, m: int) -> np.ndarray:
        """Position of emitter m in meters."""
        a = self.emitter_angle(m)
        return self.emitter_radius * np.array([math.cos(a), math.sin(a)])

    def receiver_position(self, n: int) -> np.ndarray:
        """Position of receiver n in meters."""
        a = self.receiver_angle(n)
        return self.receiver_radius * np.array([math.cos(a), math.sin(a)])

    def emitter_positions(self) -> np.ndarray:
        """All emitter positions, shape (emitter_count, 2)."""
        ang = np.radians(self.emitter_step_deg) * np.arange(self.emitter_count)
        return self.emitter_radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)

    def receiver_positions(self) -> np.ndarray:
        """All receiver positions, shape (receiver_count, 2)."""
        ang = np.radians(self.receiver_step_deg) * np.arange(self.receiver_count)
        return self.receiver_radius * np.stack([np.cos(ang), np.sin(ang)], axis=1)


@dataclass(frozen=True)
class Frequency:
    """Operating frequency with the derived angular frequency."""

    f_hz: float

    def __post_init__(self):
        if not self.f_hz > 0.0:
            raise DomainError(f"frequency must be positive, got {self.f_hz}")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * self.f_hz

    def wavenumber(self, medium: MediumParams) -> float:
        return wavenumber(medium, self.f_hz)


def wavenumber(medium: MediumParams, f_hz: float) -> float:
    """Background wavenumber 2*pi*f*sqrt(eps*mu) in rad/m."""
    if not f_hz > 0.0:
        raise DomainError(f"frequency must be positive, got {f_hz}")
    return 2.0 * math.pi * f_hz * math.sqrt(medium.permittivity * medium.permeability)


def wavelength(medium: MediumParams, f_hz: float) -> float:
    """Background wavelength 2*pi/k in meters."""
    return 2.0 * math.pi / wavenumber(medium, f_hz)


_ARRAY_KEYS = {
    "emitter_radius", "receiver_radius", "emitter_count", "receiver_count",
    "emitter_step_deg", "receiver_step_deg", "aperture_start_deg", "aperture_end_deg",
}
_MEDIUM_KEYS = {"conductivity", "permeability", "permittivity"}


def load_config(path) -> tuple[ArrayConfig, MediumParams]:
    """Read array + medium parameters from a JSON file.

    Keys mirror the ArrayConfig / MediumParams field names (flat namespace);
    omitted keys keep their defaults. Units: meters, degrees, SI medium
    constants.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: config must be a JSON object")
    unknown = set(raw) - _ARRAY_KEYS - _MEDIUM_KEYS
    if unknown:
        raise ConfigurationError(f"{path}: unknown config keys {sorted(unknown)}")
    array_kwargs = {k: raw[k] for k in raw if k in _ARRAY_KEYS}
    medium_kwargs = {k: raw[k] for k in raw if k in _MEDIUM_KEYS}
    return ArrayConfig(**array_kwargs), MediumParams(**medium_kwargs)


def default_config() -> ArrayConfig:
    return ArrayConfig()


def default_medium() -> MediumParams:
    return MediumParams()
