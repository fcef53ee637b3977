"""Gaussian-beam power budget for a laser beaming onto a circular solar array.

All lengths here are metres (slant ranges arrive in metres, not km).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LaserConfig:
    """Transmitter: electrical input power, wavelength, wall-plug efficiency, aperture."""

    p_i: float = 1000.0  # W
    wavelength: float = 1064e-9  # m
    eta_t: float = 0.51
    d_l: float = 0.3  # m

    def __post_init__(self):
        if self.p_i <= 0 or self.wavelength <= 0 or self.d_l <= 0:
            raise ValueError("laser power, wavelength and aperture must be positive")
        if not 0.0 < self.eta_t <= 1.0:
            raise ValueError(f"eta_t {self.eta_t} outside (0, 1]")

    @property
    def theta(self) -> float:
        """Divergence angle, rad."""
        return self.wavelength / self.d_l

    @property
    def w0(self) -> float:
        """Beam waist, m (equals d_l / pi)."""
        return self.wavelength / (math.pi * self.theta)

    @property
    def optical_power(self) -> float:
        return self.eta_t * self.p_i


@dataclass(frozen=True)
class PanelConfig:
    """Circular receiving array."""

    d_r: float = 2.0  # m
    eta_r: float = 0.689
    l_m: float = 1.0  # 1 = perfect pointing

    def __post_init__(self):
        if self.d_r < 0:
            raise ValueError("panel diameter must be non-negative")
        if not 0.0 <= self.eta_r <= 1.0:
            raise ValueError(f"eta_r {self.eta_r} outside [0, 1]")
        if not 0.0 <= self.l_m <= 1.0:
            raise ValueError(f"l_m {self.l_m} outside [0, 1]")

    @property
    def radius(self) -> float:
        return self.d_r / 2.0

    @property
    def area(self) -> float:
        return math.pi * self.radius**2


@dataclass(frozen=True)
class LinkResult:
    p_r: float  # W, optical power on the array
    p_h: float  # W, electrical power out of the array
    zeta: float  # %, p_h / p_i


def beam_radius(z, laser: LaserConfig):
    """1/e^2 intensity radius at range ``z`` (m)."""
    w0 = laser.w0
    zr = math.pi * w0 * w0 / laser.wavelength
    return w0 * np.sqrt(1.0 + (np.asarray(z, dtype=float) / zr) ** 2)


def irradiance(r, z, laser: LaserConfig):
    """Gaussian irradiance at radial offset ``r`` and range ``z``, W/m^2."""
    w = beam_radius(z, laser)
    return 2.0 * laser.optical_power / (math.pi * w * w) * np.exp(-2.0 * np.asarray(r) ** 2 / (w * w))


def capture_fraction(z, laser: LaserConfig, panel: PanelConfig):
    """Share of the beam falling inside the array when the beam is centred on it."""
    w = beam_radius(z, laser)
    return -np.expm1(-2.0 * panel.radius**2 / (w * w))


def received_power_tracking(z, laser: LaserConfig, panel: PanelConfig):
    return laser.optical_power * capture_fraction(z, laser, panel)


def received_power_fixed(z, psi, laser: LaserConfig, panel: PanelConfig):
    """Tracking power scaled by cos(psi); zero at or past grazing incidence."""
    c = np.cos(np.asarray(psi, dtype=float))
    c = np.where(np.asarray(psi) >= math.pi / 2, 0.0, c)
    return c * received_power_tracking(z, laser, panel)


def harvest(p_r, panel: PanelConfig, laser: LaserConfig):
    """Electrical output and end-to-end efficiency (%) for received power ``p_r``.

    Scalars give a :class:`LinkResult`; arrays give a ``(p_h, zeta)`` tuple.
    """
    p_r_arr = np.asarray(p_r, dtype=float)
    if np.any(p_r_arr < 0):
        raise ValueError("received power must be non-negative")
    p_h = p_r_arr * panel.l_m * panel.eta_r
    zeta = 100.0 * p_h / laser.p_i
    if p_r_arr.ndim == 0:
        return LinkResult(float(p_r_arr), float(p_h), float(zeta))
    return p_h, zeta


def efficiency_ceiling(laser: LaserConfig, panel: PanelConfig) -> float:
    """Best possible end-to-end efficiency, %."""
    return 100.0 * laser.eta_t * panel.eta_r * panel.l_m
