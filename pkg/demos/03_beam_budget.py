"""
The laser link budget
=====================

A 1 kW, 1064 nm laser with a 0.3 m aperture illuminates a 2 m solar panel.
The received share is the Gaussian power inside the panel radius; a fixed
panel also loses the cosine of the incidence angle.
"""

import math

import numpy as np

from lunarbeam.fso import LaserConfig, PanelConfig, beam_radius, harvest, received_power_fixed, received_power_tracking

laser, panel = LaserConfig(), PanelConfig()
print(f"waist {laser.w0 * 100:.2f} cm, optical power {laser.optical_power:.0f} W")

# beam growth and captured power with range
for z_km in (100, 300, 597.9, 1000, 3000):
    z = z_km * 1e3
    p_r = received_power_tracking(z, laser, panel)
    res = harvest(p_r, panel, laser)
    print(f"z {z_km:7.1f} km  w {beam_radius(z, laser):6.3f} m  P_R {p_r:7.2f} W  P_H {res.p_h:7.2f} W  zeta {res.zeta:5.2f}%")

# the cosine effect on a horizontal panel at 100 km
psi = np.radians([0, 20, 40, 60, 80, 90])
p_f = received_power_fixed(1e5, psi, laser, panel)
print("fixed panel P_R:", np.round(p_f, 2))
print("ratio to tracking:", np.round(p_f / received_power_tracking(1e5, laser, panel), 4))
print("cos(psi):         ", np.round(np.cos(psi), 4))
