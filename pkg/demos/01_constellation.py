"""
Building a polar constellation
==============================

Satellites share one circular polar orbit shape (100 km altitude) and differ
in right ascension of the ascending node and true anomaly. Satellite i goes
to plane (i - 1) mod k.
"""

import math

import numpy as np

from lunarbeam.orbits import ConstellationSpec, build_constellation, orbit_populations, reference_constellation

# a 40-satellite, four-plane layout
spec = reference_constellation(40, "quadruple")
print("planes:", spec.raan_list_deg, "per plane:", orbit_populations(spec))

# first few satellites and their elements
for sid, el in build_constellation(spec)[:5]:
    print(f"sat {sid.index:2d}  raan {sid.raan_deg:6.1f}  ta {sid.ta_deg:6.1f}  period {el.period / 60:.2f} min")

# uneven splits put the extra satellites in the first planes
odd = ConstellationSpec(n_sats=40, ta_step_deg=9, raan_list_deg=(0, 120, 240))
print("40 over 3 planes:", orbit_populations(odd))

# the largest gap in argument of latitude inside one plane
ta = np.array([sid.ta_deg for sid, _ in build_constellation(spec) if sid.raan_deg == 0.0])
print("max phasing gap in plane 1:", np.diff(np.sort(np.append(ta, ta.min() + 360))).max(), "deg")
print("coverage arc from 100 km:", 2 * (90 - math.degrees(math.asin(1737.4 / 1837.4))), "deg")
