"""Keplerian elements, Kepler's equation and constellation layout."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .core import MU_MOON, R_MOON, Epoch

TWO_PI = 2.0 * math.pi


class KeplerConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class KeplerianElements:
    """Osculating elements. Angles in radians, ``a`` in km."""

    a: float
    e: float
    inc: float
    raan: float
    argp: float
    ta: float
    epoch: Epoch = field(default_factory=Epoch)

    def __post_init__(self):
        if not self.a > R_MOON:
            raise ValueError(f"semi-major axis {self.a} km is inside the Moon")
        if not 0.0 <= self.e < 1.0:
            raise ValueError(f"eccentricity {self.e} outside [0, 1)")
        if not 0.0 <= self.inc <= math.pi:
            raise ValueError(f"inclination {self.inc} rad outside [0, pi]")

    @property
    def period(self) -> float:
        return orbital_period(self.a)

    @property
    def mean_motion(self) -> float:
        return math.sqrt(MU_MOON / self.a**3)


def orbital_period(a: float, mu: float = MU_MOON) -> float:
    return TWO_PI * math.sqrt(a**3 / mu)


def solve_kepler(mean_anomaly, e, tol: float = 1e-13, max_iter: int = 50):
    """Eccentric anomaly E with E - e sin E = M, by Newton iteration.

    Works elementwise on arrays. E stays in the same revolution as M.
    """
    M = np.asarray(mean_anomaly, dtype=float)
    e = np.asarray(e, dtype=float)
    if np.any((e < 0.0) | (e >= 1.0)):
        raise ValueError("eccentricity must lie in [0, 1)")
    scalar = M.ndim == 0 and e.ndim == 0
    M, e = np.broadcast_arrays(np.atleast_1d(M), np.atleast_1d(e))
    # reduce to [-pi, pi) then add the revolution back
    turns = np.floor((M + math.pi) / TWO_PI)
    Mr = M - turns * TWO_PI
    E = np.where(e < 0.8, Mr, math.pi * np.sign(Mr))
    for _ in range(max_iter):
        f = E - e * np.sin(E) - Mr
        dE = f / (1.0 - e * np.cos(E))
        E = E - dE
        if np.all(np.abs(dE) <= tol * np.maximum(1.0, np.abs(E))):
            break
    else:
        raise KeplerConvergenceError(f"Kepler iteration did not converge in {max_iter} steps")
    E = E + turns * TWO_PI
    return float(E[0]) if scalar else E


def true_to_eccentric(ta, e):
    return 2.0 * np.arctan2(np.sqrt(1.0 - e) * np.sin(ta / 2.0), np.sqrt(1.0 + e) * np.cos(ta / 2.0))


def eccentric_to_true(E, e):
    return 2.0 * np.arctan2(np.sqrt(1.0 + e) * np.sin(E / 2.0), np.sqrt(1.0 - e) * np.cos(E / 2.0))


def _perifocal_to_inertial(raan: float, inc: float, argp: float) -> np.ndarray:
    cO, sO = math.cos(raan), math.sin(raan)
    ci, si = math.cos(inc), math.sin(inc)
    cw, sw = math.cos(argp), math.sin(argp)
    return np.array(
        [
            [cO * cw - sO * sw * ci, -cO * sw - sO * cw * ci, sO * si],
            [sO * cw + cO * sw * ci, -sO * sw + cO * cw * ci, -cO * si],
            [sw * si, cw * si, ci],
        ]
    )


def elements_to_rv(el: KeplerianElements, ta=None, mu: float = MU_MOON) -> tuple[np.ndarray, np.ndarray]:
    """Position and velocity for ``el``, optionally at other true anomalies.

    With an array ``ta`` the outputs have shape (len(ta), 3).
    """
    nu = np.asarray(el.ta if ta is None else ta, dtype=float)
    p = el.a * (1.0 - el.e**2)
    r = p / (1.0 + el.e * np.cos(nu))
    h = math.sqrt(mu / p)
    r_pf = np.stack([r * np.cos(nu), r * np.sin(nu), np.zeros_like(nu)], axis=-1)
    v_pf = np.stack([-h * np.sin(nu), h * (el.e + np.cos(nu)), np.zeros_like(nu)], axis=-1)
    Q = _perifocal_to_inertial(el.raan, el.inc, el.argp)
    return r_pf @ Q.T, v_pf @ Q.T


def elements_to_state(el: KeplerianElements, mu: float = MU_MOON):
    from .dynamics import StateVector

    r, v = elements_to_rv(el, mu=mu)
    return StateVector(el.epoch, r, v)


def state_to_elements(r, v, epoch: Epoch | None = None, mu: float = MU_MOON) -> KeplerianElements:
    """Classical elements from a state vector.

    Circular orbits get argp = 0 and the true anomaly is measured from the
    ascending node; equatorial orbits measure from +x.
    """
    r = np.asarray(r, dtype=float)
    v = np.asarray(v, dtype=float)
    rn = np.linalg.norm(r)
    vn2 = v @ v
    h = np.cross(r, v)
    hn = np.linalg.norm(h)
    node = np.cross([0.0, 0.0, 1.0], h)
    nn = np.linalg.norm(node)
    evec = ((vn2 - mu / rn) * r - (r @ v) * v) / mu
    e = float(np.linalg.norm(evec))
    a = 1.0 / (2.0 / rn - vn2 / mu)
    inc = math.acos(max(-1.0, min(1.0, h[2] / hn)))
    eps = 1e-11
    if nn > eps * hn:
        raan = math.atan2(node[1], node[0]) % TWO_PI
    else:
        raan = 0.0
        node = np.array([hn, 0.0, 0.0])
        nn = hn
    if e > eps:
        argp = math.atan2(np.cross(node, evec) @ h / hn, node @ evec) % TWO_PI
        ta = math.atan2(np.cross(evec, r) @ h / hn, evec @ r) % TWO_PI
    else:
        e = 0.0
        argp = 0.0
        ta = math.atan2(np.cross(node, r) @ h / hn, node @ r) % TWO_PI
    return KeplerianElements(a, e, inc, raan, argp, ta, epoch or Epoch())


def kepler_positions(el: KeplerianElements, t, mu: float = MU_MOON) -> tuple[np.ndarray, np.ndarray]:
    """Two-body analytic position/velocity at times ``t`` (s since start epoch)."""
    t = np.asarray(t, dtype=float)
    n = math.sqrt(mu / el.a**3)
    E0 = true_to_eccentric(el.ta, el.e)
    M0 = E0 - el.e * math.sin(E0)
    M = M0 + n * (t - el.epoch.seconds)
    if el.e == 0.0:
        nu = M
    else:
        nu = eccentric_to_true(solve_kepler(M, el.e), el.e)
    return elements_to_rv(el, ta=nu, mu=mu)


@dataclass(frozen=True)
class ConstellationSpec:
    """Evenly phased constellation sharing a, e, inc and argp.

    Satellite i (1-based) takes true anomaly ta_start + (i-1)*ta_step and
    cycles through ``raan_list_deg``.
    """

    n_sats: int
    ta_step_deg: float
    raan_list_deg: tuple[float, ...]
    ta_start_deg: float = 0.0
    a: float = 1837.4
    e: float = 0.0
    inc_deg: float = 90.0
    argp_deg: float = 0.0
    epoch: Epoch = field(default_factory=Epoch)

    def __post_init__(self):
        object.__setattr__(self, "raan_list_deg", tuple(float(x) for x in self.raan_list_deg))
        if self.n_sats < 0:
            raise ValueError("n_sats must be non-negative")
        if not self.raan_list_deg:
            raise ValueError("raan_list_deg must not be empty")
        for raan in self.raan_list_deg:
            if not 0.0 <= raan < 360.0:
                raise ValueError(f"RAAN {raan} outside [0, 360)")
        if self.n_sats and not math.isclose(self.n_sats * self.ta_step_deg, 360.0, abs_tol=1e-9):
            raise ValueError(f"{self.n_sats} satellites x {self.ta_step_deg} deg does not span 360 deg")


@dataclass(frozen=True)
class SatelliteId:
    index: int
    raan_deg: float
    ta_deg: float


def build_constellation(spec: ConstellationSpec) -> list[tuple[SatelliteId, KeplerianElements]]:
    k = len(spec.raan_list_deg)
    out = []
    for i in range(1, spec.n_sats + 1):
        ta = (spec.ta_start_deg + (i - 1) * spec.ta_step_deg) % 360.0
        raan = spec.raan_list_deg[(i - 1) % k]
        el = KeplerianElements(
            a=spec.a,
            e=spec.e,
            inc=math.radians(spec.inc_deg),
            raan=math.radians(raan),
            argp=math.radians(spec.argp_deg),
            ta=math.radians(ta),
            epoch=spec.epoch,
        )
        out.append((SatelliteId(i, raan, ta), el))
    return out


def orbit_populations(spec: ConstellationSpec) -> list[int]:
    """Number of satellites assigned to each RAAN."""
    k = len(spec.raan_list_deg)
    return [len(range(j, spec.n_sats, k)) for j in range(k)]


# Constellation layouts studied for the south-pole rover
RAAN_SCHEMES = {
    "single": (0.0,),
    "double": (0.0, 90.0),
    "triple": (0.0, 120.0, 240.0),
    "quadruple": (0.0, 90.0, 225.0, 315.0),
}


def reference_constellation(n_sats: int, scheme: str) -> ConstellationSpec:
    """One of the 30/40-satellite layouts (or the lone satellite when n_sats == 1)."""
    return ConstellationSpec(n_sats=n_sats, ta_step_deg=360.0 / n_sats, raan_list_deg=RAAN_SCHEMES[scheme])


def with_epoch(el: KeplerianElements, epoch: Epoch) -> KeplerianElements:
    return replace(el, epoch=epoch)
