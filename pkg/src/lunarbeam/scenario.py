"""Scenario configuration and end-to-end runs.

A scenario is a JSON document::

    {
      "name": "quad40",
      "constellation": {"n_sats": 40, "ta_step_deg": 9, "raan_list_deg": [0, 90, 225, 315]},
      "dynamics": "kepler"
    }

Every other section falls back to the lunar south-pole defaults below.
Unknown keys are rejected.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import analysis, fso
from .core import Epoch, format_iso, parse_iso
from .dynamics import Ephemeris, ForceModelConfig, ingest_ephemeris, propagate_many, write_ephemeris
from .geometry import AccessMatrices, RoverSite, build_access_matrices, refine_passes
from .orbits import ConstellationSpec, build_constellation, elements_to_state, kepler_positions
from .selection import SelectionSeries, select_series

DEFAULT_DURATION_MIN = 39360
DYNAMICS_MODES = ("kepler", "perturbed", "ephemeris")

TIMESERIES_COLUMNS = [
    "n",
    "epoch_iso",
    "selected_sat",
    "visible_count",
    "slant_range_km",
    "aoi_deg",
    "p_r_track_w",
    "p_h_track_w",
    "zeta_track_pct",
    "p_r_fixed_w",
    "p_h_fixed_w",
    "zeta_fixed_pct",
]
INTERVAL_COLUMNS = ["kind", "sat", "start_n", "end_n", "start_iso", "end_iso", "duration_min"]


class ConfigError(ValueError):
    pass


_SECTIONS = {
    "constellation": {
        "n_sats",
        "ta_start_deg",
        "ta_step_deg",
        "raan_list_deg",
        "a_km",
        "e",
        "inc_deg",
        "argp_deg",
    },
    "rover": {"lat_deg", "lon_deg"},
    "laser": {"p_i_w", "wavelength_m", "eta_t", "d_l_m"},
    "panel": {"d_r_m", "eta_r", "l_m"},
    "forces": set(ForceModelConfig.__dataclass_fields__),
}
_TOP = {
    "name",
    "start_epoch",
    "duration_minutes",
    "step_seconds",
    "dynamics",
    "elevation_mask_deg",
    "ephemeris_dir",
    "refine_passes",
} | set(_SECTIONS)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    constellation: ConstellationSpec
    start_epoch: str = "2025-01-01T00:00:00"
    duration_minutes: int = DEFAULT_DURATION_MIN
    step_seconds: float = 60.0
    site: RoverSite = field(default_factory=RoverSite)
    laser: fso.LaserConfig = field(default_factory=fso.LaserConfig)
    panel: fso.PanelConfig = field(default_factory=fso.PanelConfig)
    forces: ForceModelConfig = field(default_factory=ForceModelConfig.perturbed)
    dynamics: str = "kepler"
    elevation_mask_deg: float = 0.0
    ephemeris_dir: str | None = None
    refine_passes: bool = True

    def __post_init__(self):
        if self.dynamics not in DYNAMICS_MODES:
            raise ConfigError(f"dynamics must be one of {DYNAMICS_MODES}, not {self.dynamics!r}")
        if self.duration_minutes <= 0 or self.step_seconds <= 0:
            raise ConfigError("duration_minutes and step_seconds must be positive")
        n = self.duration_minutes * 60.0 / self.step_seconds
        if abs(n - round(n)) > 1e-9:
            raise ConfigError("duration_minutes * 60 must be divisible by step_seconds")
        if self.dynamics == "ephemeris" and not self.ephemeris_dir:
            raise ConfigError("dynamics 'ephemeris' needs ephemeris_dir")

    @property
    def start_s(self) -> float:
        return parse_iso(self.start_epoch)

    @property
    def horizon_s(self) -> float:
        return self.duration_minutes * 60.0

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon_s / self.step_seconds))

    def grid(self) -> np.ndarray:
        return self.start_s + self.step_seconds * np.arange(self.n_steps)

    def to_dict(self) -> dict:
        c = self.constellation
        out = {
            "name": self.name,
            "start_epoch": self.start_epoch,
            "duration_minutes": self.duration_minutes,
            "step_seconds": self.step_seconds,
            "dynamics": self.dynamics,
            "elevation_mask_deg": self.elevation_mask_deg,
            "constellation": {
                "n_sats": c.n_sats,
                "ta_start_deg": c.ta_start_deg,
                "ta_step_deg": c.ta_step_deg,
                "raan_list_deg": list(c.raan_list_deg),
                "a_km": c.a,
                "e": c.e,
                "inc_deg": c.inc_deg,
                "argp_deg": c.argp_deg,
            },
            "rover": {"lat_deg": self.site.lat_deg, "lon_deg": self.site.lon_deg},
            "laser": {
                "p_i_w": self.laser.p_i,
                "wavelength_m": self.laser.wavelength,
                "eta_t": self.laser.eta_t,
                "d_l_m": self.laser.d_l,
            },
            "panel": {"d_r_m": self.panel.d_r, "eta_r": self.panel.eta_r, "l_m": self.panel.l_m},
            "forces": self.forces.to_dict(),
            "refine_passes": self.refine_passes,
        }
        if self.ephemeris_dir:
            out["ephemeris_dir"] = self.ephemeris_dir
        return out


def _check_keys(section: str, data: dict, allowed: set) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"{section}: expected an object")
    extra = sorted(set(data) - allowed)
    if extra:
        raise ConfigError(f"{section}: unknown key(s) {', '.join(extra)}")


def config_from_dict(data: dict, base_dir: Path | None = None) -> ScenarioConfig:
    _check_keys("config", data, _TOP)
    if "constellation" not in data:
        raise ConfigError("config: missing 'constellation'")
    for sec, allowed in _SECTIONS.items():
        if sec in data:
            _check_keys(sec, data[sec], allowed)
    try:
        start = data.get("start_epoch", "2025-01-01T00:00:00")
        start_s = parse_iso(start)
        c = data["constellation"]
        if "n_sats" not in c or "raan_list_deg" not in c:
            raise ConfigError("constellation: n_sats and raan_list_deg are required")
        n_sats = int(c["n_sats"])
        constellation = ConstellationSpec(
            n_sats=n_sats,
            ta_step_deg=float(c.get("ta_step_deg", 360.0 / n_sats if n_sats else 360.0)),
            raan_list_deg=tuple(c["raan_list_deg"]),
            ta_start_deg=float(c.get("ta_start_deg", 0.0)),
            a=float(c.get("a_km", 1837.4)),
            e=float(c.get("e", 0.0)),
            inc_deg=float(c.get("inc_deg", 90.0)),
            argp_deg=float(c.get("argp_deg", 0.0)),
            epoch=Epoch(start_s),
        )
        r = data.get("rover", {})
        site = RoverSite(lat_deg=float(r.get("lat_deg", -90.0)), lon_deg=float(r.get("lon_deg", 0.0)))
        la = data.get("laser", {})
        laser = fso.LaserConfig(
            p_i=float(la.get("p_i_w", 1000.0)),
            wavelength=float(la.get("wavelength_m", 1064e-9)),
            eta_t=float(la.get("eta_t", 0.51)),
            d_l=float(la.get("d_l_m", 0.3)),
        )
        pa = data.get("panel", {})
        panel = fso.PanelConfig(
            d_r=float(pa.get("d_r_m", 2.0)), eta_r=float(pa.get("eta_r", 0.689)), l_m=float(pa.get("l_m", 1.0))
        )
        forces = ForceModelConfig.perturbed(**data.get("forces", {}))
        eph_dir = data.get("ephemeris_dir")
        if eph_dir and base_dir is not None and not Path(eph_dir).is_absolute():
            eph_dir = str(base_dir / eph_dir)
        return ScenarioConfig(
            name=str(data.get("name", "scenario")),
            constellation=constellation,
            start_epoch=start,
            duration_minutes=int(data.get("duration_minutes", DEFAULT_DURATION_MIN)),
            step_seconds=float(data.get("step_seconds", 60.0)),
            site=site,
            laser=laser,
            panel=panel,
            forces=forces,
            dynamics=str(data.get("dynamics", "kepler")),
            elevation_mask_deg=float(data.get("elevation_mask_deg", 0.0)),
            ephemeris_dir=eph_dir,
            refine_passes=bool(data.get("refine_passes", True)),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    try:
        return config_from_dict(data, base_dir=path.parent)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None


# --- running ---------------------------------------------------------------------


def build_ephemerides(config: ScenarioConfig, workers: int = 1) -> list[Ephemeris]:
    sats = build_constellation(config.constellation)
    t = config.grid()
    if config.dynamics == "kepler":
        out = []
        for sid, el in sats:
            r, v = kepler_positions(el, t)
            out.append(Ephemeris(sid.index, t, r, v))
        return out
    if config.dynamics == "perturbed":
        initials = [(sid.index, elements_to_state(el)) for sid, el in sats]
        return propagate_many(initials, config.forces, config.horizon_s, config.step_seconds, workers=workers)
    eph_dir = Path(config.ephemeris_dir)
    files = sorted(eph_dir.glob("*.txt"), key=lambda p: p.name)
    if not files:
        raise FileNotFoundError(f"no ephemeris files (*.txt) in {eph_dir}")
    ephs = [ingest_ephemeris(f, config.start_s, config.horizon_s, config.step_seconds) for f in files]
    return sorted(ephs, key=lambda e: (str(type(e.sat_id)), e.sat_id))


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    ephemerides: list[Ephemeris]
    matrices: AccessMatrices
    selection: SelectionSeries
    series: analysis.MetricSeries
    summary: analysis.SummaryReport
    intervals: analysis.IntervalReport


def run(config: ScenarioConfig, workers: int = 1, ephemerides: list[Ephemeris] | None = None) -> ScenarioResult:
    ephs = build_ephemerides(config, workers) if ephemerides is None else ephemerides
    site = config.site
    matrices = build_access_matrices(ephs, site, config.elevation_mask_deg, t=config.grid())
    selection = select_series(matrices)
    series = analysis.compute_series(selection, config.laser, config.panel, matrices.sat_ids, matrices.visible_count())
    summary = analysis.average_metrics(series, config.step_seconds)
    passes = []
    if config.refine_passes:
        for eph in ephs:
            passes += refine_passes(eph, site, config.elevation_mask_deg)
    intervals = analysis.interval_report(matrices, selection, passes)
    summary.passes = intervals.pass_stats()
    return ScenarioResult(config, ephs, matrices, selection, series, summary, intervals)


# --- output ------------------------------------------------------------------------


def _num(x: float, digits: int = 6) -> str:
    return f"{x:.{digits}f}"


def timeseries_csv(result: ScenarioResult) -> str:
    s = result.series
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TIMESERIES_COLUMNS)
    for i in range(len(s)):
        ok = s.sat[i] != 0
        w.writerow(
            [
                i + 1,
                format_iso(s.t[i]),
                s.sat_label[i] if ok else "",
                int(s.visible_count[i]),
                _num(s.z_km[i]) if ok else "",
                _num(math.degrees(s.psi[i])) if ok else "",
                _num(s.p_r_track[i]),
                _num(s.p_h_track[i]),
                _num(s.zeta_track[i]),
                _num(s.p_r_fixed[i]),
                _num(s.p_h_fixed[i]),
                _num(s.zeta_fixed[i]),
            ]
        )
    return buf.getvalue()


def intervals_csv(result: ScenarioResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(INTERVAL_COLUMNS)
    w.writerows(analysis.format_interval_rows(result.intervals))
    return buf.getvalue()


def summary_dict(result: ScenarioResult, reference: dict | None = None) -> dict:
    s = result.summary
    out = {
        "name": result.config.name,
        "dynamics": result.config.dynamics,
        "n_sats": result.matrices.n_sats,
        "n_steps": s.n_steps,
        "accessible_indices": s.accessible,
        "access_rate": round(s.access_rate, 2),
        "los_loss_min": s.los_loss_min,
        "avg_p_h_track_w": round(s.avg_p_h_track, 2),
        "avg_p_h_fixed_w": round(s.avg_p_h_fixed, 2),
        "avg_zeta_track_pct": round(s.avg_zeta_track, 2),
        "avg_zeta_fixed_pct": round(s.avg_zeta_fixed, 2),
        "peak_zeta_track_pct": round(s.peak_zeta_track, 2),
        "peak_zeta_fixed_pct": round(s.peak_zeta_fixed, 2),
        "min_zeta_track_connected_pct": None
        if math.isnan(s.min_zeta_track_connected)
        else round(s.min_zeta_track_connected, 2),
        "min_zeta_fixed_connected_pct": None
        if math.isnan(s.min_zeta_fixed_connected)
        else round(s.min_zeta_fixed_connected, 2),
        "handovers": s.handovers,
        "gaps": len(result.intervals.gaps),
        "passes": {k: (round(v, 4) if isinstance(v, float) else v) for k, v in s.passes.items()},
        "config": result.config.to_dict(),
    }
    if reference is not None:
        out["reference"] = reference
    return out


def write_outputs(result: ScenarioResult, outdir, reference: dict | None = None, write_ephem: bool = False) -> Path:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "timeseries.csv").write_text(timeseries_csv(result))
    (outdir / "intervals.csv").write_text(intervals_csv(result))
    (outdir / "summary.json").write_text(json.dumps(summary_dict(result, reference), indent=2) + "\n")
    if write_ephem:
        eph_dir = outdir / "ephemeris"
        eph_dir.mkdir(exist_ok=True)
        for eph in result.ephemerides:
            write_ephemeris(eph, eph_dir / f"sat{int(eph.sat_id):03d}.txt" if isinstance(eph.sat_id, int) else eph_dir / f"{eph.sat_id}.txt")
    return outdir


def with_dynamics(config: ScenarioConfig, mode: str) -> ScenarioConfig:
    return replace(config, dynamics=mode)


def asdict_config(config: ScenarioConfig) -> dict:
    return asdict(config)
