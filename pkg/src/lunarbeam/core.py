"""Constants, epochs and Moon frame conversions shared by the other modules.

Frames: the Moon-centred inertial frame has +z along the lunar spin axis and
zero axial tilt, so a site at either pole is fixed in inertial space.
Positions are in km, velocities in km/s, times in seconds from START_EPOCH.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta

import numpy as np

DAY = 86400.0

MU_MOON = 4902.800066  # km^3/s^2
R_MOON = 1737.4  # km
MU_EARTH = 398600.4418  # km^3/s^2
MU_SUN = 1.32712440018e11  # km^3/s^2
EARTH_MOON_DIST = 384400.0  # km
MOON_SIDEREAL_PERIOD = 27.321661 * DAY  # s
AU = 149597870.7  # km
SOLAR_FLUX_1AU = 1361.0  # W/m^2
C_LIGHT = 299792.458  # km/s
YEAR = 365.25 * DAY

OMEGA_MOON = 2.0 * math.pi / MOON_SIDEREAL_PERIOD  # rad/s

START_EPOCH = datetime(2025, 1, 1, 0, 0, 0)


@dataclass(frozen=True)
class Constants:
    """Bundle of the physical constants, for callers that want them as a value."""

    mu_moon: float = MU_MOON
    r_moon: float = R_MOON
    mu_earth: float = MU_EARTH
    mu_sun: float = MU_SUN
    earth_moon_dist: float = EARTH_MOON_DIST
    moon_sidereal_period: float = MOON_SIDEREAL_PERIOD
    au: float = AU
    solar_flux_1au: float = SOLAR_FLUX_1AU
    c_light: float = C_LIGHT


CONSTANTS = Constants()


@dataclass(frozen=True, order=True)
class Epoch:
    """Seconds elapsed since the simulation start (2025-01-01T00:00:00)."""

    seconds: float = 0.0

    def __add__(self, dt: float) -> "Epoch":
        return Epoch(self.seconds + dt)

    def __sub__(self, other: "Epoch") -> float:
        return self.seconds - other.seconds

    def to_datetime(self) -> datetime:
        return START_EPOCH + timedelta(seconds=self.seconds)

    def iso(self) -> str:
        return format_iso(self.seconds)

    @classmethod
    def from_datetime(cls, when: datetime) -> "Epoch":
        return cls((when - START_EPOCH).total_seconds())

    @classmethod
    def from_iso(cls, text: str) -> "Epoch":
        return cls(parse_iso(text))


def format_iso(seconds: float) -> str:
    """ISO-8601 with millisecond resolution, e.g. ``2025-01-01T00:01:00.000``."""
    when = START_EPOCH + timedelta(seconds=float(seconds))
    return when.isoformat(timespec="milliseconds")


def parse_iso(text: str) -> float:
    """Seconds since START_EPOCH for an ISO-8601 timestamp (a trailing Z is accepted)."""
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1]
    when = datetime.fromisoformat(text)
    if when.tzinfo is not None:
        raise ValueError(f"timezone offsets are not supported: {text!r}")
    return (when - START_EPOCH).total_seconds()


def rot_z(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def moon_rotation_angle(t: float | np.ndarray) -> float | np.ndarray:
    """Angle the Moon has spun through since the start epoch, rad."""
    return OMEGA_MOON * t


def moon_inertial_to_body(t: float, v) -> np.ndarray:
    """Express an inertial vector in the Moon body-fixed frame at time ``t`` (s)."""
    return rot_z(-moon_rotation_angle(t)) @ np.asarray(v, dtype=float)


def moon_body_to_inertial(t: float, v) -> np.ndarray:
    return rot_z(moon_rotation_angle(t)) @ np.asarray(v, dtype=float)


def body_to_inertial_many(t: np.ndarray, v) -> np.ndarray:
    """Rotate one body-fixed vector into the inertial frame at each time in ``t``.

    Returns an array of shape (len(t), 3).
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    ang = moon_rotation_angle(t)
    c, s = np.cos(ang), np.sin(ang)
    out = np.empty((t.size, 3))
    out[:, 0] = c * v[0] - s * v[1]
    out[:, 1] = s * v[0] + c * v[1]
    out[:, 2] = v[2]
    return out


def surface_point(lat_deg: float, lon_deg: float, radius: float = R_MOON) -> tuple[np.ndarray, np.ndarray]:
    """Body-fixed position of a surface site and its outward unit normal.

    >>> p, n = surface_point(-90.0, 0.0)
    >>> p.round(6).tolist(), n.round(6).tolist()
    ([0.0, 0.0, -1737.4], [0.0, 0.0, -1.0])
    """
    if not -90.0 <= lat_deg <= 90.0:
        raise ValueError(f"latitude {lat_deg} outside [-90, 90]")
    if not -180.0 <= lon_deg < 360.0:
        raise ValueError(f"longitude {lon_deg} outside [-180, 360)")
    lat = math.radians(lat_deg)
    lon = math.radians(lon_deg)
    # exact values at the poles keep the site on the spin axis
    if abs(lat_deg) == 90.0:
        normal = np.array([0.0, 0.0, math.copysign(1.0, lat_deg)])
    else:
        normal = np.array([math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)])
    return radius * normal, normal


def unit(v: np.ndarray) -> np.ndarray:
    """Normalise along the last axis."""
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)
