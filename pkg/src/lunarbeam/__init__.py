"""Continuous laser power beaming from low lunar orbit to a south-pole rover."""

from .core import CONSTANTS, Epoch, moon_inertial_to_body, surface_point
from .dynamics import Ephemeris, ForceModelConfig, StateVector, accel, ingest_ephemeris, propagate
from .fso import LaserConfig, PanelConfig, beam_radius, harvest, irradiance, received_power_fixed, received_power_tracking
from .geometry import RoverSite, angle_of_incidence, build_access_matrices, visibility
from .orbits import ConstellationSpec, KeplerianElements, build_constellation, elements_to_state, solve_kepler
from .selection import select, select_series
from .analysis import access_report, average_metrics, compute_series, interval_report

__version__ = "0.1.0"
