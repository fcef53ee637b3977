"""Power and efficiency time series, horizon averages and interval reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fso
from .core import format_iso
from .geometry import AccessMatrices, PassWindow, visible_runs
from .selection import NONE, SelectionSeries


@dataclass
class MetricSeries:
    """Per-step link metrics for both panel modes, all zero while the link is lost."""

    t: np.ndarray
    sat: np.ndarray  # column number, NONE when unlinked
    sat_label: list
    visible_count: np.ndarray
    z_km: np.ndarray
    psi: np.ndarray
    elevation: np.ndarray
    p_r_track: np.ndarray
    p_h_track: np.ndarray
    zeta_track: np.ndarray
    p_r_fixed: np.ndarray
    p_h_fixed: np.ndarray
    zeta_fixed: np.ndarray

    def __len__(self) -> int:
        return len(self.t)

    @property
    def connected(self) -> np.ndarray:
        return self.sat != NONE


def compute_series(
    selection: SelectionSeries,
    laser: fso.LaserConfig,
    panel: fso.PanelConfig,
    sat_ids: list | None = None,
    visible_count: np.ndarray | None = None,
) -> MetricSeries:
    ok = selection.sat != NONE
    z_m = np.where(ok, selection.z, 0.0) * 1e3
    psi = np.where(ok, selection.psi, 0.0)
    p_r_t = np.where(ok, fso.received_power_tracking(z_m, laser, panel), 0.0)
    p_h_t, zeta_t = fso.harvest(p_r_t, panel, laser)
    # fixed panel: every column is the tracking column times the same cosine
    cos_psi = np.where(psi >= np.pi / 2, 0.0, np.cos(psi))
    p_r_f, p_h_f, zeta_f = p_r_t * cos_psi, p_h_t * cos_psi, zeta_t * cos_psi
    if sat_ids is None:
        labels = [int(s) if s else None for s in selection.sat]
    else:
        labels = [sat_ids[s - 1] if s else None for s in selection.sat]
    if visible_count is None:
        visible_count = ok.astype(int)
    return MetricSeries(
        t=selection.t,
        sat=selection.sat,
        sat_label=labels,
        visible_count=np.asarray(visible_count),
        z_km=selection.z,
        psi=selection.psi,
        elevation=selection.elevation,
        p_r_track=p_r_t,
        p_h_track=p_h_t,
        zeta_track=zeta_t,
        p_r_fixed=p_r_f,
        p_h_fixed=p_h_f,
        zeta_fixed=zeta_f,
    )


@dataclass
class SummaryReport:
    n_steps: int
    accessible: int
    access_rate: float
    los_loss_min: float
    avg_p_h_track: float
    avg_p_h_fixed: float
    avg_zeta_track: float
    avg_zeta_fixed: float
    peak_zeta_track: float
    peak_zeta_fixed: float
    min_zeta_track_connected: float
    min_zeta_fixed_connected: float
    handovers: int
    passes: dict = field(default_factory=dict)

    def rounded(self) -> dict:
        """Values at two decimals, as reported in tables."""
        out = {}
        for k, v in self.__dict__.items():
            if isinstance(v, float) and math.isfinite(v):
                out[k] = round(v, 2)
            elif isinstance(v, float):
                out[k] = None
            else:
                out[k] = v
        return out


def _fsum(x: np.ndarray) -> float:
    return math.fsum(np.asarray(x, dtype=float).tolist())


def count_handovers(sat: np.ndarray) -> int:
    """Changes of serving satellite between consecutive linked steps."""
    sat = np.asarray(sat)
    a, b = sat[:-1], sat[1:]
    return int(np.count_nonzero((a != NONE) & (b != NONE) & (a != b)))


def average_metrics(series: MetricSeries, step_s: float = 60.0) -> SummaryReport:
    """Means over every step, including those without a link."""
    N = len(series)
    if N == 0:
        raise ValueError("empty series")
    ok = series.connected
    accessible = int(ok.sum())

    def cmin(x):
        return float(x[ok].min()) if accessible else float("nan")

    def cmax(x):
        return float(x.max())

    return SummaryReport(
        n_steps=N,
        accessible=accessible,
        access_rate=100.0 * accessible / N,
        los_loss_min=(N - accessible) * step_s / 60.0,
        avg_p_h_track=_fsum(series.p_h_track) / N,
        avg_p_h_fixed=_fsum(series.p_h_fixed) / N,
        avg_zeta_track=_fsum(series.zeta_track) / N,
        avg_zeta_fixed=_fsum(series.zeta_fixed) / N,
        peak_zeta_track=cmax(series.zeta_track),
        peak_zeta_fixed=cmax(series.zeta_fixed),
        min_zeta_track_connected=cmin(series.zeta_track),
        min_zeta_fixed_connected=cmin(series.zeta_fixed),
        handovers=count_handovers(series.sat),
    )


def access_report(matrices: AccessMatrices) -> tuple[int, float]:
    """Steps with at least one visible satellite, and their share in percent."""
    N = matrices.N
    if N == 0:
        return 0, 0.0
    count = int(matrices.accessible().sum()) if matrices.n_sats else 0
    return count, 100.0 * count / N


@dataclass(frozen=True)
class Interval:
    kind: str  # "visibility", "selected" or "gap"
    sat: object
    start_index: int  # 1-based time index
    end_index: int
    start_s: float
    end_s: float
    duration_min: float


@dataclass
class IntervalReport:
    visibility: list[Interval]
    selected: list[Interval]
    gaps: list[Interval]
    handovers: int
    passes: list[PassWindow] = field(default_factory=list)

    def all(self) -> list[Interval]:
        return self.visibility + self.selected + self.gaps

    def pass_stats(self) -> dict:
        full = [p for p in self.passes if not p.truncated]
        if not full:
            return {"count": 0}
        dur = np.array([p.duration_min for p in full])
        rng = np.array([p.min_range_km for p in full])
        return {
            "count": len(full),
            "duration_min_mean": float(dur.mean()),
            "duration_min_min": float(dur.min()),
            "duration_min_max": float(dur.max()),
            "min_range_km_min": float(rng.min()),
            "min_range_km_max": float(rng.max()),
        }


def _intervals(kind, runs, t, step_s, sat) -> list[Interval]:
    return [
        Interval(kind, sat, s + 1, e + 1, float(t[s]), float(t[e]) + step_s, (e - s + 1) * step_s / 60.0)
        for s, e in runs
    ]


def interval_report(
    matrices: AccessMatrices,
    selection: SelectionSeries,
    passes: list[PassWindow] | None = None,
) -> IntervalReport:
    """Sampled visibility runs per satellite, serving-satellite segments and link gaps.

    A run covering steps s..e is reported as lasting (e - s + 1) steps. For
    durations resolved below the step size pass ``passes`` from
    :func:`lunarbeam.geometry.refine_passes`.
    """
    t = matrices.t
    step = matrices.step
    vis = []
    for m, sid in enumerate(matrices.sat_ids):
        vis += _intervals("visibility", visible_runs(matrices.visible[:, m]), t, step, sid)
    sel = []
    sat = selection.sat
    if len(sat):
        change = np.flatnonzero(np.diff(sat) != 0) + 1
        bounds = np.concatenate([[0], change, [len(sat)]])
        for s, e in zip(bounds[:-1], bounds[1:]):
            col = int(sat[s])
            if col != NONE:
                sel += _intervals("selected", [(int(s), int(e) - 1)], t, step, matrices.sat_ids[col - 1])
    gaps = _intervals("gap", visible_runs(sat == NONE), t, step, None)
    return IntervalReport(vis, sel, gaps, count_handovers(sat), list(passes or []))


def format_interval_rows(report: IntervalReport) -> list[list]:
    rows = []
    for iv in report.all():
        rows.append(
            [
                iv.kind,
                "" if iv.sat is None else iv.sat,
                iv.start_index,
                iv.end_index,
                format_iso(iv.start_s),
                format_iso(iv.end_s),
                f"{iv.duration_min:.2f}",
            ]
        )
    return rows
