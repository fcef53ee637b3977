"""
Sweeping constellation layouts
==============================

Runs the eight 30- and 40-satellite layouts with and without perturbations
and prints access and mean efficiency side by side.
"""

from dataclasses import replace

from lunarbeam import scenario
from lunarbeam.cli import bundled_config_dir

names = [f"paper_{n}sat_{k}" for n in (30, 40) for k in ("single", "double", "triple", "quad")]
print(f"{'config':<20} {'mode':<10} {'access %':>9} {'zeta_T %':>9} {'zeta_F %':>9}")
for name in names:
    base = scenario.load_config(bundled_config_dir() / f"{name}.json")
    for mode in ("kepler", "perturbed"):
        s = scenario.run(replace(base, dynamics=mode, refine_passes=False), workers=4).summary
        print(f"{name:<20} {mode:<10} {s.access_rate:9.2f} {s.avg_zeta_track:9.2f} {s.avg_zeta_fixed:9.2f}")
