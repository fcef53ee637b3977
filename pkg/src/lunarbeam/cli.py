"""Command-line front end.

    lunarbeam run -c config.json -o out/ [--dynamics kepler|perturbed] [--compare-paper]
    lunarbeam sweep -d configs/ -o out/
    lunarbeam access -c config.json -o out/
    lunarbeam ephem export -c config.json -o out/
    lunarbeam ephem ingest -i sat001.txt [...] -o out/
    lunarbeam validate -c config.json [...]

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import scenario
from .analysis import access_report
from .core import format_iso
from .dynamics import EphemerisFormatError, PropagationError, ingest_ephemeris, write_ephemeris
from .geometry import build_access_matrices
from .reference import lookup

log = logging.getLogger("lunarbeam")

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3

SWEEP_COLUMNS = [
    "name",
    "n_sats",
    "orbits",
    "dynamics",
    "accessible_indices",
    "access_rate",
    "avg_p_h_track_w",
    "avg_p_h_fixed_w",
    "avg_zeta_track_pct",
    "avg_zeta_fixed_pct",
    "los_loss_min",
]


def bundled_config_dir() -> Path:
    return Path(str(resources.files("lunarbeam") / "configs"))


def _load(path, dynamics: str | None) -> scenario.ScenarioConfig:
    cfg = scenario.load_config(path)
    if dynamics:
        cfg = replace(cfg, dynamics=dynamics)
    return cfg


def cmd_run(args) -> int:
    cfg = _load(args.config, args.dynamics)
    if args.ephem_dir:
        cfg = replace(cfg, dynamics="ephemeris", ephemeris_dir=args.ephem_dir)
    result = scenario.run(cfg, workers=args.workers)
    ref = lookup(cfg.name) if args.compare_paper else None
    scenario.write_outputs(result, args.outdir, reference=ref if args.compare_paper else None, write_ephem=args.write_ephem)
    s = result.summary
    print(
        f"{cfg.name}: access {s.access_rate:.2f}% ({s.accessible}/{s.n_steps}), "
        f"P_H track {s.avg_p_h_track:.2f} W, fixed {s.avg_p_h_fixed:.2f} W, "
        f"zeta track {s.avg_zeta_track:.2f}%, fixed {s.avg_zeta_fixed:.2f}%"
    )
    return EXIT_OK


def sweep_rows(results, compare: bool) -> tuple[list[str], list[list]]:
    cols = list(SWEEP_COLUMNS)
    if compare:
        cols += [f"ref_{c}" for c in SWEEP_COLUMNS[4:]]
    rows = []
    for res in results:
        d = scenario.summary_dict(res)
        row = [
            d["name"],
            d["n_sats"],
            len(res.config.constellation.raan_list_deg),
            d["dynamics"],
            d["accessible_indices"],
            f"{d['access_rate']:.2f}",
            f"{d['avg_p_h_track_w']:.2f}",
            f"{d['avg_p_h_fixed_w']:.2f}",
            f"{d['avg_zeta_track_pct']:.2f}",
            f"{d['avg_zeta_fixed_pct']:.2f}",
            f"{d['los_loss_min']:.0f}",
        ]
        if compare:
            ref = lookup(res.config.name) or {}
            row += ["" if ref.get(c) is None else ref[c] for c in SWEEP_COLUMNS[4:]]
        rows.append(row)
    return cols, rows


def cmd_sweep(args) -> int:
    cdir = Path(args.configdir)
    files = sorted(cdir.glob("*.json")) if cdir.is_dir() else []
    if not files:
        raise scenario.ConfigError(f"no *.json configs in {cdir}")
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    results, failures = [], []
    for path in files:
        try:
            cfg = _load(path, args.dynamics)
            res = scenario.run(replace(cfg, refine_passes=False), workers=args.workers)
        except (scenario.ConfigError, PropagationError, EphemerisFormatError, OSError) as exc:
            log.error("%s: %s", path.name, exc)
            failures.append({"config": path.name, "error": str(exc)})
            continue
        results.append(res)
        s = res.summary
        print(f"{cfg.name:<24} {s.accessible:>6} {s.access_rate:7.2f}%  {s.avg_zeta_track:6.2f}%  {s.avg_zeta_fixed:6.2f}%")
    cols, rows = sweep_rows(results, args.compare_paper)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    w.writerows(rows)
    (outdir / "comparison.csv").write_text(buf.getvalue())
    payload = {"rows": [dict(zip(cols, r)) for r in rows], "failures": failures}
    (outdir / "comparison.json").write_text(json.dumps(payload, indent=2) + "\n")
    return EXIT_RUNTIME if failures else EXIT_OK


def _matrix_csv(matrices, values, transform) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "epoch_iso"] + [f"sat{sid}" for sid in matrices.sat_ids])
    for i in range(matrices.N):
        row = [i + 1, format_iso(matrices.t[i])]
        row += [f"{transform(x):.6f}" if math.isfinite(x) else "" for x in values[i]]
        w.writerow(row)
    return buf.getvalue()


def cmd_access(args) -> int:
    cfg = _load(args.config, args.dynamics)
    ephs = scenario.build_ephemerides(cfg, workers=args.workers)
    m = build_access_matrices(ephs, cfg.site, cfg.elevation_mask_deg, t=cfg.grid())
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "access_z_km.csv").write_text(_matrix_csv(m, m.Z, float))
    (outdir / "access_aoi_deg.csv").write_text(_matrix_csv(m, m.Psi, math.degrees))
    count, rate = access_report(m)
    (outdir / "access.json").write_text(
        json.dumps({"name": cfg.name, "accessible_indices": count, "access_rate": round(rate, 2), "n_steps": m.N}, indent=2)
        + "\n"
    )
    print(f"{cfg.name}: {count}/{m.N} accessible ({rate:.2f}%)")
    return EXIT_OK


def cmd_ephem_export(args) -> int:
    cfg = _load(args.config, args.dynamics)
    ephs = scenario.build_ephemerides(cfg, workers=args.workers)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for eph in ephs:
        write_ephemeris(eph, outdir / f"sat{int(eph.sat_id):03d}.txt")
    print(f"wrote {len(ephs)} ephemeris files to {outdir}")
    return EXIT_OK


def cmd_ephem_ingest(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    horizon = None if args.duration_minutes is None else args.duration_minutes * 60.0
    from .core import parse_iso

    start = parse_iso(args.start)
    for path in args.inputs:
        eph = ingest_ephemeris(path, start, horizon, args.step)
        write_ephemeris(eph, outdir / Path(path).name)
        r = np.linalg.norm(eph.r, axis=1)
        print(f"{path}: satellite {eph.sat_id}, {len(eph)} samples, radius {r.min():.3f}..{r.max():.3f} km")
    return EXIT_OK


def cmd_validate(args) -> int:
    bad = 0
    for path in args.configs:
        try:
            cfg = scenario.load_config(path)
        except scenario.ConfigError as exc:
            print(f"{path}: INVALID: {exc}")
            bad += 1
        else:
            print(f"{path}: ok ({cfg.name}, {cfg.constellation.n_sats} satellites, {cfg.n_steps} steps)")
    return EXIT_CONFIG if bad else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lunarbeam", description="Laser power beaming from low lunar orbit to a polar rover.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("-c", "--config", required=True, help="scenario JSON")
        sp.add_argument("--dynamics", choices=["kepler", "perturbed"], help="override the config's dynamics mode")
        sp.add_argument("--workers", type=int, default=1, help="threads for satellite propagation")

    r = sub.add_parser("run", help="run one scenario and write timeseries/summary/intervals")
    common(r)
    r.add_argument("-o", "--outdir", required=True)
    r.add_argument("--compare-paper", action="store_true", help="attach published reference values to summary.json")
    r.add_argument("--write-ephem", action="store_true", help="also write per-satellite ephemeris files")
    r.add_argument("--ephem-dir", help="use ephemeris files from this directory instead of propagating")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("sweep", help="run every config in a directory and tabulate")
    s.add_argument("-d", "--configdir", required=True)
    s.add_argument("-o", "--outdir", required=True)
    s.add_argument("--dynamics", choices=["kepler", "perturbed"])
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--compare-paper", action="store_true", help="add published reference columns")
    s.set_defaults(func=cmd_sweep)

    a = sub.add_parser("access", help="write the slant-range and incidence-angle matrices")
    common(a)
    a.add_argument("-o", "--outdir", required=True)
    a.set_defaults(func=cmd_access)

    e = sub.add_parser("ephem", help="ephemeris file export and ingestion")
    esub = e.add_subparsers(dest="ephem_command", required=True)
    ex = esub.add_parser("export", help="write one ephemeris file per satellite")
    common(ex)
    ex.add_argument("-o", "--outdir", required=True)
    ex.set_defaults(func=cmd_ephem_export)
    ing = esub.add_parser("ingest", help="resample ephemeris files onto the simulation grid")
    ing.add_argument("-i", "--inputs", nargs="+", required=True)
    ing.add_argument("-o", "--outdir", required=True)
    ing.add_argument("--start", default="2025-01-01T00:00:00")
    ing.add_argument("--duration-minutes", type=int)
    ing.add_argument("--step", type=float, default=60.0)
    ing.set_defaults(func=cmd_ephem_ingest)

    v = sub.add_parser("validate", help="check config files")
    v.add_argument("-c", "--configs", nargs="+", required=True)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (scenario.ConfigError, EphemerisFormatError) as exc:
        print(f"lunarbeam: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PropagationError, OSError, RuntimeError, ValueError) as exc:
        print(f"lunarbeam: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
