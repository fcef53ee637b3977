"""Nearest-satellite selection per time step.

At each step the visible satellite with the shortest slant range is chosen;
scanning in satellite order with a strict ``<`` leaves ties with the lowest
index.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import AccessMatrices

NONE = 0  # sentinel satellite number meaning no link


@dataclass(frozen=True)
class SelectionRecord:
    n: int
    sat: int | None  # 1-based column of the chosen satellite
    z: float  # km, inf when no link
    psi: float  # rad, inf when no link


def select(z_row, psi_row, visible_mask=None, n: int = 0) -> SelectionRecord:
    z_row = np.asarray(z_row, dtype=float)
    psi_row = np.asarray(psi_row, dtype=float)
    if z_row.shape != psi_row.shape:
        raise ValueError("Z and Psi rows differ in length")
    visible = np.isfinite(z_row) if visible_mask is None else np.asarray(visible_mask, dtype=bool)
    best = None
    z_best = np.inf
    for m in range(z_row.size):
        if visible[m] and z_row[m] < z_best:
            best, z_best = m, z_row[m]
    if best is None:
        return SelectionRecord(n, None, np.inf, np.inf)
    return SelectionRecord(n, best + 1, float(z_best), float(psi_row[best]))


@dataclass
class SelectionSeries:
    """The selection matrix: one chosen satellite, range and incidence angle per step.

    ``sat`` holds 1-based column numbers with ``NONE`` (0) for steps without a link.
    """

    t: np.ndarray
    sat: np.ndarray
    z: np.ndarray
    psi: np.ndarray
    elevation: np.ndarray

    def __len__(self) -> int:
        return len(self.sat)

    @property
    def connected(self) -> np.ndarray:
        return self.sat != NONE

    def record(self, i: int) -> SelectionRecord:
        s = int(self.sat[i])
        return SelectionRecord(i + 1, s if s else None, float(self.z[i]), float(self.psi[i]))


def select_series(matrices: AccessMatrices) -> SelectionSeries:
    N = matrices.N
    if matrices.n_sats == 0:
        inf = np.full(N, np.inf)
        return SelectionSeries(matrices.t, np.zeros(N, dtype=int), inf, inf.copy(), np.full(N, np.nan))
    Z = np.where(matrices.visible, matrices.Z, np.inf)
    # argmin returns the first minimum, matching the strict-< scan
    idx = np.argmin(Z, axis=1)
    rows = np.arange(N)
    z = Z[rows, idx]
    ok = np.isfinite(z)
    sat = np.where(ok, idx + 1, NONE)
    psi = np.where(ok, matrices.Psi[rows, idx], np.inf)
    elev = np.where(ok, matrices.elevation[rows, idx], np.nan)
    return SelectionSeries(matrices.t, sat, z, psi, elev)
