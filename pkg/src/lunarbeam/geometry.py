"""Line-of-sight access between orbiters and a surface site.

Builds the per-step slant-range matrix ``Z`` and angle-of-incidence matrix
``Psi`` (rows: time index, columns: satellite). Entries for satellites
below the elevation mask hold ``inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import R_MOON, body_to_inertial_many, surface_point
from .dynamics import Ephemeris

TRACKING = "tracking"
FIXED = "fixed"


@dataclass(frozen=True)
class RoverSite:
    lat_deg: float = -90.0
    lon_deg: float = 0.0
    panel_mode: str = FIXED

    def __post_init__(self):
        if self.panel_mode not in (TRACKING, FIXED):
            raise ValueError(f"panel_mode must be 'tracking' or 'fixed', not {self.panel_mode!r}")
        surface_point(self.lat_deg, self.lon_deg)

    def body_position(self) -> tuple[np.ndarray, np.ndarray]:
        return surface_point(self.lat_deg, self.lon_deg)

    def inertial(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Site position and outward normal at each time, shape (len(t), 3)."""
        p, n = self.body_position()
        return body_to_inertial_many(t, p), body_to_inertial_many(t, n)


def visibility(sat_pos, rover_pos, rover_normal, mask_deg: float = 0.0) -> tuple[bool, float]:
    """Whether the satellite clears the elevation mask, and its elevation (rad)."""
    d = np.asarray(sat_pos, dtype=float) - np.asarray(rover_pos, dtype=float)
    sin_el = float(d @ np.asarray(rover_normal, dtype=float) / np.linalg.norm(d))
    sin_el = max(-1.0, min(1.0, sin_el))
    return sin_el >= math.sin(math.radians(mask_deg)), math.asin(sin_el)


def angle_of_incidence(boresight, normal):
    """Angle between the incoming beam and the panel normal, rad.

    ``boresight`` points from the satellite to the panel, so a beam hitting the
    panel face-on has ``boresight == -normal`` and an angle of 0.
    """
    b = np.asarray(boresight, dtype=float)
    n = np.asarray(normal, dtype=float)
    c = -np.sum(b * n, axis=-1)
    return np.arccos(np.clip(c, -1.0, 1.0))


@dataclass
class AccessMatrices:
    """Per-step access data for a set of satellites.

    ``Z`` (km) and ``Psi`` (rad) are ``inf`` where the satellite is not
    visible. ``elevation`` is kept for every entry.
    """

    t: np.ndarray
    sat_ids: list
    Z: np.ndarray
    Psi: np.ndarray
    visible: np.ndarray
    elevation: np.ndarray
    mask_deg: float = 0.0
    panel_mode: str = FIXED
    meta: dict = field(default_factory=dict)

    @property
    def N(self) -> int:
        return len(self.t)

    @property
    def n_sats(self) -> int:
        return len(self.sat_ids)

    @property
    def step(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 60.0

    def visible_count(self) -> np.ndarray:
        return self.visible.sum(axis=1)

    def accessible(self) -> np.ndarray:
        return self.visible.any(axis=1)


class GridMismatchError(ValueError):
    pass


def check_grid(ephemerides: list[Ephemeris]) -> np.ndarray:
    if not ephemerides:
        raise GridMismatchError("no ephemerides to check")
    t = ephemerides[0].t
    for eph in ephemerides[1:]:
        if len(eph.t) != len(t) or not np.array_equal(eph.t, t):
            raise GridMismatchError(f"satellite {eph.sat_id} is not on the same time grid as satellite {ephemerides[0].sat_id}")
    if len(t) > 2:
        dt = np.diff(t)
        if not np.allclose(dt, dt[0], rtol=0.0, atol=1e-6):
            raise GridMismatchError("ephemeris grid is not uniform")
    return t


def look_angles(r_sat: np.ndarray, site_pos: np.ndarray, site_normal: np.ndarray):
    """Slant range (km), sine of elevation and satellite->site unit vector.

    Arrays broadcast over the leading (time) axis.
    """
    d = r_sat - site_pos
    rng = np.linalg.norm(d, axis=-1)
    u = d / rng[..., None]
    sin_el = np.clip(np.sum(u * site_normal, axis=-1), -1.0, 1.0)
    return rng, sin_el, -u


def build_access_matrices(
    ephemerides: list[Ephemeris],
    site: RoverSite,
    mask_deg: float = 0.0,
    t: np.ndarray | None = None,
) -> AccessMatrices:
    """Visibility, slant range and angle of incidence for every (step, satellite).

    With no ephemerides the grid must be passed as ``t``.
    """
    if ephemerides:
        t = check_grid(ephemerides)
    elif t is None:
        raise GridMismatchError("an empty constellation needs an explicit time grid")
    t = np.asarray(t, dtype=float)
    N, M = len(t), len(ephemerides)
    Z = np.full((N, M), np.inf)
    Psi = np.full((N, M), np.inf)
    vis = np.zeros((N, M), dtype=bool)
    elev = np.zeros((N, M))
    pos, normal = site.inertial(t)
    sin_mask = math.sin(math.radians(mask_deg))
    for m, eph in enumerate(ephemerides):
        rng, sin_el, bore = look_angles(eph.r, pos, normal)
        v = sin_el >= sin_mask
        vis[:, m] = v
        elev[:, m] = np.arcsin(sin_el)
        Z[v, m] = rng[v]
        if site.panel_mode == TRACKING:
            Psi[v, m] = 0.0
        else:
            Psi[v, m] = angle_of_incidence(bore[v], normal[v])
    return AccessMatrices(
        t=t,
        sat_ids=[eph.sat_id for eph in ephemerides],
        Z=Z,
        Psi=Psi,
        visible=vis,
        elevation=elev,
        mask_deg=mask_deg,
        panel_mode=site.panel_mode,
    )


def horizon_range(a: float, radius: float = R_MOON) -> float:
    """Slant range to a satellite at orbit radius ``a`` sitting on the horizon."""
    return math.sqrt(a * a - radius * radius)


# --- pass refinement -----------------------------------------------------------


@dataclass(frozen=True)
class PassWindow:
    """One visibility pass with rise/set refined between grid samples."""

    sat_id: object
    start_index: int
    end_index: int
    rise_s: float
    set_s: float
    min_range_km: float
    min_range_s: float
    max_elevation_deg: float
    truncated: bool

    @property
    def duration_min(self) -> float:
        return (self.set_s - self.rise_s) / 60.0


def visible_runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive (start, end) index pairs of the True runs in a boolean vector."""
    m = np.asarray(mask, dtype=bool).astype(np.int8)
    edges = np.diff(np.concatenate([[0], m, [0]]))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return list(zip(starts.tolist(), ends.tolist()))


def refine_passes(
    eph: Ephemeris,
    site: RoverSite,
    mask_deg: float = 0.0,
    iterations: int = 60,
) -> list[PassWindow]:
    """Locate rise, set and closest approach of each pass on the Hermite interpolant.

    The sampled runs come from the 60 s grid; the crossing times are found by
    bisection inside the bracketing step and the minimum slant range by a
    golden-section search over the pass. Runs touching either end of the
    grid are flagged ``truncated`` and not refined at the clipped edge.
    """
    t = eph.t
    pos, normal = site.inertial(t)
    _, sin_el, _ = look_angles(eph.r, pos, normal)
    sin_mask = math.sin(math.radians(mask_deg))
    runs = visible_runs(sin_el >= sin_mask)
    if not runs:
        return []
    spline = eph.interpolator()
    p_body, n_body = site.body_position()

    def sin_elev(tt):
        sp, sn = body_to_inertial_many(tt, p_body), body_to_inertial_many(tt, n_body)
        return look_angles(spline(tt), sp, sn)[1] - sin_mask

    def slant(tt):
        sp = body_to_inertial_many(tt, p_body)
        return np.linalg.norm(spline(tt) - sp, axis=-1)

    starts = np.array([s for s, _ in runs])
    ends = np.array([e for _, e in runs])
    last = len(t) - 1

    def bisect(lo, hi, rising):
        lo, hi = lo.astype(float), hi.astype(float)
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            above = sin_elev(mid) >= 0.0
            if rising:
                hi = np.where(above, mid, hi)
                lo = np.where(above, lo, mid)
            else:
                lo = np.where(above, mid, lo)
                hi = np.where(above, hi, mid)
        return 0.5 * (lo + hi)

    has_before = starts > 0
    has_after = ends < last
    rise = t[starts].astype(float)
    sett = t[ends].astype(float)
    if has_before.any():
        rise[has_before] = bisect(t[starts[has_before] - 1], t[starts[has_before]], True)
    if has_after.any():
        sett[has_after] = bisect(t[ends[has_after]], t[ends[has_after] + 1], False)

    # golden-section on slant range over [rise, set]
    g = (math.sqrt(5.0) - 1.0) / 2.0
    lo, hi = rise.copy(), sett.copy()
    x1 = hi - g * (hi - lo)
    x2 = lo + g * (hi - lo)
    f1, f2 = slant(x1), slant(x2)
    for _ in range(iterations):
        left = f1 < f2
        hi = np.where(left, x2, hi)
        lo = np.where(left, lo, x1)
        nx1 = np.where(left, hi - g * (hi - lo), x2)
        nx2 = np.where(left, x1, lo + g * (hi - lo))
        x1, x2 = nx1, nx2
        f1, f2 = slant(x1), slant(x2)
    t_min = 0.5 * (lo + hi)
    # endpoints can win on truncated passes
    cand_t = np.stack([rise, t_min, sett])
    cand_f = np.stack([slant(rise), slant(t_min), slant(sett)])
    k = np.argmin(cand_f, axis=0)
    cols = np.arange(len(runs))
    t_best = cand_t[k, cols]
    r_best = cand_f[k, cols]
    sp, sn = body_to_inertial_many(t_best, p_body), body_to_inertial_many(t_best, n_body)
    el_best = np.degrees(np.arcsin(look_angles(spline(t_best), sp, sn)[1]))

    return [
        PassWindow(
            sat_id=eph.sat_id,
            start_index=int(starts[i]),
            end_index=int(ends[i]),
            rise_s=float(rise[i]),
            set_s=float(sett[i]),
            min_range_km=float(r_best[i]),
            min_range_s=float(t_best[i]),
            max_elevation_deg=float(el_best[i]),
            truncated=not (has_before[i] and has_after[i]),
        )
        for i in range(len(runs))
    ]
