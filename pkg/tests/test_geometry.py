import math

import numpy as np
import pytest

from lunarbeam.core import R_MOON
from lunarbeam.dynamics import Ephemeris
from lunarbeam.geometry import (
    FIXED,
    TRACKING,
    GridMismatchError,
    RoverSite,
    angle_of_incidence,
    build_access_matrices,
    horizon_range,
    refine_passes,
    visibility,
    visible_runs,
)
from lunarbeam.orbits import KeplerianElements, kepler_positions

A = 1837.4
POLE = np.array([0.0, 0.0, -R_MOON])
DOWN = np.array([0.0, 0.0, -1.0])


def test_zenith_pass_visible():
    vis, el = visibility([0, 0, -A], POLE, DOWN)
    assert vis and el == pytest.approx(math.pi / 2)


def test_antipodal_not_visible():
    assert not visibility([0, 0, A], POLE, DOWN)[0]


def test_equatorial_satellite_below_horizon():
    vis, el = visibility([A, 0, 0], POLE, DOWN)
    d = math.hypot(A, R_MOON)
    assert not vis
    assert math.sin(el) == pytest.approx(-R_MOON / d, rel=1e-14)


def test_mask_applies():
    # 10 degrees elevation seen from the pole
    el = math.radians(10)
    sat = POLE + 500 * np.array([math.cos(el), 0, -math.sin(el)])
    assert visibility(sat, POLE, DOWN, 5.0)[0]
    assert not visibility(sat, POLE, DOWN, 15.0)[0]


def test_aoi_basic():
    n = np.array([0.0, 0.0, 1.0])
    assert angle_of_incidence(-n, n) == 0.0
    assert angle_of_incidence([1.0, 0, 0], n) == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("el_deg", [5, 30, 60, 89])
def test_aoi_is_complement_of_elevation(el_deg):
    el = math.radians(el_deg)
    sat = POLE + 300 * np.array([math.cos(el), 0, -math.sin(el)])
    bore = (POLE - sat) / np.linalg.norm(POLE - sat)
    assert angle_of_incidence(bore, DOWN) == pytest.approx(math.pi / 2 - el, abs=1e-12)
    assert visibility(sat, POLE, DOWN)[1] == pytest.approx(el, abs=1e-12)


def _single(minutes=360, step=60.0, ta=0.0):
    el = KeplerianElements(A, 0.0, math.pi / 2, 0.0, 0.0, ta)
    t = step * np.arange(int(minutes * 60 / step))
    r, v = kepler_positions(el, t)
    return Ephemeris(1, t, r, v)


def test_single_satellite_pass_duration():
    eph = _single(minutes=24 * 60)
    m = build_access_matrices([eph], RoverSite())
    runs = visible_runs(m.visible[:, 0])
    full = [e - s + 1 for s, e in runs if s > 0 and e < m.N - 1]
    # 38 deg of a 117.8 min orbit = 12.43 min, sampled at 1 min
    assert set(full) <= {12, 13}
    passes = [p for p in refine_passes(eph, RoverSite()) if not p.truncated]
    arc = 2 * (90 - math.degrees(math.asin(R_MOON / A)))
    expected = arc / 360 * 2 * math.pi * math.sqrt(A**3 / 4902.800066) / 60
    assert expected == pytest.approx(12.43, abs=0.01)
    for p in passes:
        # limited by the cubic Hermite interpolant between 60 s samples
        assert p.duration_min == pytest.approx(expected, abs=1e-5)
        assert p.min_range_km == pytest.approx(A - R_MOON, abs=1e-3)
        assert p.max_elevation_deg == pytest.approx(90.0, abs=0.05)


def test_empty_constellation():
    t = 60.0 * np.arange(10)
    m = build_access_matrices([], RoverSite(), t=t)
    assert m.Z.shape == (10, 0)
    assert not m.accessible().any()


def test_empty_constellation_needs_grid():
    with pytest.raises(GridMismatchError):
        build_access_matrices([], RoverSite())


def test_grid_mismatch():
    a = _single(minutes=10)
    b = Ephemeris(2, a.t + 1.0, a.r, a.v)
    with pytest.raises(GridMismatchError):
        build_access_matrices([a, b], RoverSite())


def test_matrix_invariants():
    ephs = [_single(minutes=240, ta=math.radians(k * 45)) for k in range(8)]
    m = build_access_matrices(ephs, RoverSite())
    assert np.array_equal(np.isfinite(m.Z), m.visible)
    assert np.array_equal(np.isfinite(m.Psi), m.visible)
    z = m.Z[m.visible]
    assert z.min() >= A - R_MOON - 1e-9
    assert z.max() <= horizon_range(A) + 1e-9
    # fixed panel at the pole: incidence is the zenith angle
    assert np.abs(m.Psi[m.visible] - (math.pi / 2 - m.elevation[m.visible])).max() < 1e-9


def test_tracking_mode_zero_aoi():
    m = build_access_matrices([_single(minutes=240)], RoverSite(panel_mode=TRACKING))
    assert np.all(m.Psi[m.visible] == 0.0)


def test_horizon_range():
    assert horizon_range(A) == pytest.approx(597.8963, abs=1e-4)


def test_boundary_range_near_horizon():
    eph = _single(minutes=24 * 60)
    m = build_access_matrices([eph], RoverSite())
    # first/last visible sample of each pass lies within one step of the horizon
    v = 2 * math.pi * A / (2 * math.pi * math.sqrt(A**3 / 4902.800066))
    for s, e in visible_runs(m.visible[:, 0]):
        for i in (s, e):
            assert horizon_range(A) - v * 60 <= m.Z[i, 0] <= horizon_range(A) + 1e-9


def test_access_monotone_in_satellites():
    ephs = [_single(minutes=600, ta=math.radians(k * 36)) for k in range(10)]
    counts = [build_access_matrices(ephs[:k], RoverSite(), t=ephs[0].t).accessible().sum() for k in range(11)]
    assert all(b >= a for a, b in zip(counts, counts[1:]))


def test_off_pole_site_rotates():
    site = RoverSite(lat_deg=-80.0, lon_deg=30.0, panel_mode=FIXED)
    p, n = site.inertial(np.array([0.0, 86400.0]))
    assert not np.allclose(p[0], p[1])
    assert np.allclose(np.linalg.norm(p, axis=1), R_MOON)


def test_visible_runs():
    assert visible_runs([0, 1, 1, 0, 1]) == [(1, 2), (4, 4)]
    assert visible_runs([]) == []
