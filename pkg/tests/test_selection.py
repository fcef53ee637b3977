import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lunarbeam.geometry import AccessMatrices
from lunarbeam.selection import NONE, select, select_series


def matrices(Z, Psi=None):
    Z = np.asarray(Z, dtype=float)
    Psi = np.zeros_like(Z) if Psi is None else np.asarray(Psi, dtype=float)
    vis = np.isfinite(Z)
    Psi = np.where(vis, Psi, np.inf)
    t = 60.0 * np.arange(Z.shape[0])
    return AccessMatrices(t, list(range(1, Z.shape[1] + 1)), Z, Psi, vis, np.where(vis, math.pi / 2 - Psi, -1.0))


def test_select_argmin():
    rec = select([1500, 900, 1200], np.radians([60, 20, 40]))
    assert rec.sat == 2
    assert rec.z == 900
    assert rec.psi == pytest.approx(math.radians(20))


def test_select_tie_keeps_first():
    assert select([700, 700], [0.1, 0.2]).sat == 1


def test_select_none_visible():
    rec = select([np.inf, np.inf], [np.inf, np.inf])
    assert rec.sat is None and math.isinf(rec.z)


def test_select_respects_mask():
    assert select([100, 200], [0, 0], visible_mask=[False, True]).sat == 2


def test_select_length_mismatch():
    with pytest.raises(ValueError):
        select([1, 2], [1])


def test_series_empty_constellation():
    m = AccessMatrices(60.0 * np.arange(5), [], np.zeros((5, 0)), np.zeros((5, 0)), np.zeros((5, 0), bool), np.zeros((5, 0)))
    s = select_series(m)
    assert np.all(s.sat == NONE)
    assert len(s) == 5


row = st.lists(st.one_of(st.just(math.inf), st.sampled_from([150.0, 300.0]), st.floats(100, 600)), min_size=1, max_size=12)


@given(st.lists(row, min_size=1, max_size=8).filter(lambda rows: len({len(r) for r in rows}) == 1))
def test_series_matches_row_scan(rows):
    Z = np.array(rows)
    Psi = np.where(np.isfinite(Z), Z / 1000.0, np.inf)
    s = select_series(matrices(Z, Psi))
    for n, zr in enumerate(Z):
        rec = select(zr, Psi[n])
        assert (rec.sat or NONE) == s.sat[n]
        if rec.sat:
            assert s.z[n] == rec.z and s.psi[n] == rec.psi
            assert np.all(s.z[n] <= zr[np.isfinite(zr)])


@given(st.lists(row, min_size=1, max_size=6).filter(lambda rows: len({len(r) for r in rows}) == 1), st.floats(100, 600))
def test_adding_satellite_never_increases_range(rows, extra):
    Z = np.array(rows)
    base = select_series(matrices(Z)).z
    more = select_series(matrices(np.column_stack([Z, np.full(len(Z), extra)]))).z
    assert np.all(more <= base)
