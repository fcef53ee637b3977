"""
Selecting satellites and summarising a run
==========================================

Every minute the rover links to the nearest visible satellite. The run is
summarised by access rate, mean harvested power and efficiency, and
handovers.
"""

import numpy as np

from lunarbeam import scenario
from lunarbeam.cli import bundled_config_dir

cfg = scenario.load_config(bundled_config_dir() / "paper_single_sat.json")
res = scenario.run(cfg)
s = res.summary
print(f"{cfg.name}: {s.accessible}/{s.n_steps} steps linked ({s.access_rate:.2f}%)")
print(f"mean P_H tracking {s.avg_p_h_track:.2f} W, fixed {s.avg_p_h_fixed:.2f} W")
print(f"mean zeta tracking {s.avg_zeta_track:.2f}%, fixed {s.avg_zeta_fixed:.2f}%")

# one pass, minute by minute
first = res.intervals.selected[0]
sl = slice(first.start_index - 1, first.end_index)
for z, psi, zt, zf in zip(res.series.z_km[sl], np.degrees(res.series.psi[sl]), res.series.zeta_track[sl], res.series.zeta_fixed[sl]):
    print(f"  z {z:7.2f} km  psi {psi:5.1f} deg  zeta_T {zt:5.2f}%  zeta_F {zf:5.2f}%")

# pass geometry refined between samples
p = res.intervals.passes[0]
print(f"first pass {p.duration_min:.3f} min, closest {p.min_range_km:.3f} km")

# a full constellation
quad = scenario.run(scenario.load_config(bundled_config_dir() / "paper_40sat_quad.json"))
q = quad.summary
print(f"{quad.config.name}: access {q.access_rate:.2f}%, zeta_T {q.avg_zeta_track:.2f}%, zeta_F {q.avg_zeta_fixed:.2f}%, handovers {q.handovers}")
