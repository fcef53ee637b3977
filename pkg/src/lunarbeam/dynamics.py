"""Orbit propagation about the Moon and ephemeris file I/O.

Force model (all terms optional except the central body):

* lunar point-mass gravity, plus J2 oblateness
* Earth and Sun as third bodies on coplanar circular paths about the Moon
* cannonball solar radiation pressure with a cylindrical umbra
* a crude lunar albedo push: constant radial acceleration scaled by the
  albedo coefficient and the solar flux

The integrator is an adaptive Dormand-Prince 5(4) pair with its native
4th-order continuous extension used to sample the fixed output grid.
"""

from __future__ import annotations

import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numba
import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .core import (
    AU,
    C_LIGHT,
    EARTH_MOON_DIST,
    MOON_SIDEREAL_PERIOD,
    MU_EARTH,
    MU_MOON,
    MU_SUN,
    R_MOON,
    SOLAR_FLUX_1AU,
    YEAR,
    Epoch,
    format_iso,
    parse_iso,
)

LUNAR_J2 = 2.0330e-4
LUNAR_J2_RADIUS = 1738.0  # km, reference radius for LUNAR_J2

MAX_GAP_S = 600.0


class PropagationError(RuntimeError):
    pass


class EphemerisFormatError(ValueError):
    def __init__(self, message: str, lineno: int | None = None, path=None):
        where = ""
        if path is not None:
            where += f"{path}"
        if lineno is not None:
            where += f":{lineno}"
        super().__init__(f"{where}: {message}" if where else message)
        self.lineno = lineno
        self.path = path


@dataclass(frozen=True)
class StateVector:
    epoch: Epoch
    r: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "r", np.asarray(self.r, dtype=float).reshape(3))
        object.__setattr__(self, "v", np.asarray(self.v, dtype=float).reshape(3))

    @property
    def y(self) -> np.ndarray:
        return np.concatenate([self.r, self.v])


@dataclass(frozen=True)
class ForceModelConfig:
    """Which perturbations to include. The defaults give pure two-body motion."""

    earth_third_body: bool = False
    sun_third_body: bool = False
    srp: bool = False
    srp_cr: float = 1.3
    srp_area_m2: float = 10.0
    sat_mass_kg: float = 500.0
    lunar_j2: bool = False
    albedo: bool = False
    albedo_coeff: float = 0.12
    earth_phase_deg: float = 0.0
    sun_phase_deg: float = 0.0

    def __post_init__(self):
        if self.srp or self.albedo:
            if not 1.0 <= self.srp_cr <= 2.0:
                raise ValueError(f"srp_cr {self.srp_cr} outside [1, 2]")
            if not self.srp_area_m2 > 0.0:
                raise ValueError("srp_area_m2 must be positive")
            if not self.sat_mass_kg > 0.0:
                raise ValueError("sat_mass_kg must be positive")

    @classmethod
    def perturbed(cls, **overrides) -> "ForceModelConfig":
        """Earth and Sun third bodies, SRP and albedo on; J2 off."""
        base = dict(earth_third_body=True, sun_third_body=True, srp=True, albedo=True)
        base.update(overrides)
        return cls(**base)

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def srp_accel_1au(self) -> float:
        """SRP acceleration magnitude at 1 AU, km/s^2."""
        pressure = SOLAR_FLUX_1AU / (C_LIGHT * 1e3)  # N/m^2
        return pressure * self.srp_cr * self.srp_area_m2 / self.sat_mass_kg * 1e-3

    def params(self) -> np.ndarray:
        return np.array(
            [
                float(self.earth_third_body),
                float(self.sun_third_body),
                float(self.srp),
                float(self.lunar_j2),
                float(self.albedo),
                self.srp_accel_1au,
                self.albedo_coeff,
                math.radians(self.earth_phase_deg),
                math.radians(self.sun_phase_deg),
            ]
        )


TWO_BODY = ForceModelConfig()


# --- analytic third-body positions --------------------------------------------


@numba.njit(cache=True, nogil=True)
def _earth_pos(t, phase0):
    th = phase0 + 2.0 * math.pi * t / MOON_SIDEREAL_PERIOD
    return EARTH_MOON_DIST * math.cos(th), EARTH_MOON_DIST * math.sin(th), 0.0


@numba.njit(cache=True, nogil=True)
def _sun_pos(t, phase0):
    th = phase0 + 2.0 * math.pi * t / YEAR
    return AU * math.cos(th), AU * math.sin(th), 0.0


def earth_position(t: float, phase_deg: float = 0.0) -> np.ndarray:
    return np.array(_earth_pos(float(t), math.radians(phase_deg)))


def sun_position(t: float, phase_deg: float = 0.0) -> np.ndarray:
    return np.array(_sun_pos(float(t), math.radians(phase_deg)))


def in_umbra(r, sun) -> bool:
    """Cylindrical shadow test behind the Moon."""
    return bool(_in_umbra(r[0], r[1], r[2], sun[0], sun[1], sun[2]))


@numba.njit(cache=True, nogil=True)
def _in_umbra(x, y, z, sx, sy, sz):
    sn = math.sqrt(sx * sx + sy * sy + sz * sz)
    ux, uy, uz = sx / sn, sy / sn, sz / sn
    proj = x * ux + y * uy + z * uz
    if proj >= 0.0:
        return False
    px, py, pz = x - proj * ux, y - proj * uy, z - proj * uz
    return px * px + py * py + pz * pz < R_MOON * R_MOON


@numba.njit(cache=True, nogil=True)
def _accel(t, y, p, out):
    x, yy, z = y[0], y[1], y[2]
    r2 = x * x + yy * yy + z * z
    r = math.sqrt(r2)
    k = -MU_MOON / (r2 * r)
    ax, ay, az = k * x, k * yy, k * z

    if p[3] != 0.0:
        z2 = z * z / r2
        c = -1.5 * LUNAR_J2 * MU_MOON * LUNAR_J2_RADIUS * LUNAR_J2_RADIUS / (r2 * r2 * r)
        ax += c * x * (1.0 - 5.0 * z2)
        ay += c * yy * (1.0 - 5.0 * z2)
        az += c * z * (3.0 - 5.0 * z2)

    if p[0] != 0.0:
        ex, ey, ez = _earth_pos(t, p[7])
        dx, dy, dz = ex - x, ey - yy, ez - z
        d3 = (dx * dx + dy * dy + dz * dz) ** 1.5
        s3 = (ex * ex + ey * ey + ez * ez) ** 1.5
        ax += MU_EARTH * (dx / d3 - ex / s3)
        ay += MU_EARTH * (dy / d3 - ey / s3)
        az += MU_EARTH * (dz / d3 - ez / s3)

    need_sun = p[1] != 0.0 or p[2] != 0.0 or p[4] != 0.0
    if need_sun:
        sx, sy, sz = _sun_pos(t, p[8])
        dx, dy, dz = sx - x, sy - yy, sz - z
        d2 = dx * dx + dy * dy + dz * dz
        d = math.sqrt(d2)
        if p[1] != 0.0:
            d3 = d2 * d
            s3 = (sx * sx + sy * sy + sz * sz) ** 1.5
            ax += MU_SUN * (dx / d3 - sx / s3)
            ay += MU_SUN * (dy / d3 - sy / s3)
            az += MU_SUN * (dz / d3 - sz / s3)
        if p[2] != 0.0 and not _in_umbra(x, yy, z, sx, sy, sz):
            # along the Sun -> satellite direction
            mag = p[5] * (AU * AU / d2) / d
            ax -= mag * dx
            ay -= mag * dy
            az -= mag * dz
        if p[4] != 0.0:
            sn2 = sx * sx + sy * sy + sz * sz
            mag = p[6] * p[5] * (AU * AU / sn2) * (R_MOON * R_MOON / r2) / r
            ax += mag * x
            ay += mag * yy
            az += mag * z

    out[0] = y[3]
    out[1] = y[4]
    out[2] = y[5]
    out[3] = ax
    out[4] = ay
    out[5] = az


def accel(state: StateVector, cfg: ForceModelConfig = TWO_BODY) -> np.ndarray:
    """Total acceleration on the satellite, km/s^2."""
    if np.linalg.norm(state.r) <= R_MOON:
        raise PropagationError(f"state at |r| = {np.linalg.norm(state.r):.3f} km is inside the Moon")
    out = np.empty(6)
    _accel(state.epoch.seconds, state.y, cfg.params(), out)
    return out[3:]


# --- Dormand-Prince 5(4) ------------------------------------------------------

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = np.array(
    [
        [0, 0, 0, 0, 0],
        [1 / 5, 0, 0, 0, 0],
        [3 / 40, 9 / 40, 0, 0, 0],
        [44 / 45, -56 / 15, 32 / 9, 0, 0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    ]
)
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# continuous extension, coefficients of theta^1..theta^4 per stage
_P = np.array(
    [
        [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
        [0, 0, 0, 0],
        [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
        [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
        [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
        [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
        [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
    ]
)

OK, IMPACT, UNDERFLOW, MAX_STEPS = 0, 1, 2, 3


@numba.njit(cache=True, nogil=True)
def _integrate(t0, y0, t_out, p, rtol, atol, h0, max_steps):
    n_out = t_out.shape[0]
    out = np.empty((n_out, 6))
    K = np.empty((7, 6))
    y = y0.copy()
    ynew = np.empty(6)
    ytmp = np.empty(6)
    t = t0
    h = h0
    iout = 0
    while iout < n_out and t_out[iout] <= t0:
        out[iout] = y0
        iout += 1
    if iout == n_out:
        return out, OK, 0
    t_end = t_out[n_out - 1]
    _accel(t, y, p, K[0])
    steps = 0
    while iout < n_out:
        if steps >= max_steps:
            return out, MAX_STEPS, steps
        if h < 1e-9 * max(1.0, abs(t)):
            return out, UNDERFLOW, steps
        if t + h > t_end:
            h = t_end - t
        for s in range(1, 6):
            for j in range(6):
                acc = 0.0
                for q in range(s):
                    acc += _A[s, q] * K[q, j]
                ytmp[j] = y[j] + h * acc
            _accel(t + _C[s] * h, ytmp, p, K[s])
        for j in range(6):
            acc = 0.0
            for q in range(6):
                acc += _B[q] * K[q, j]
            ynew[j] = y[j] + h * acc
        _accel(t + h, ynew, p, K[6])
        err = 0.0
        for j in range(6):
            e = 0.0
            for q in range(7):
                e += _E[q] * K[q, j]
            sc = atol[j] + rtol * max(abs(y[j]), abs(ynew[j]))
            err = max(err, abs(h * e / sc))
        if err <= 1.0:
            steps += 1
            t_new = t + h
            # sample the output grid inside (t, t_new]
            while iout < n_out and t_out[iout] <= t_new:
                if t_out[iout] == t_new:
                    out[iout] = ynew
                else:
                    th = (t_out[iout] - t) / h
                    th2 = th * th
                    for j in range(6):
                        acc = 0.0
                        for q in range(7):
                            acc += K[q, j] * (_P[q, 0] * th + _P[q, 1] * th2 + _P[q, 2] * th2 * th + _P[q, 3] * th2 * th2)
                        out[iout, j] = y[j] + h * acc
                iout += 1
            t = t_new
            y[:] = ynew
            K[0] = K[6]
            if y[0] * y[0] + y[1] * y[1] + y[2] * y[2] <= R_MOON * R_MOON:
                return out, IMPACT, steps
            fac = 10.0 if err == 0.0 else min(10.0, 0.9 * err**-0.2)
            h = h * fac
        else:
            h = h * max(0.2, 0.9 * err**-0.2)
    return out, OK, steps


@dataclass
class Ephemeris:
    """Fixed-cadence samples of one satellite. ``t`` is seconds from the start epoch."""

    sat_id: int | str
    t: np.ndarray
    r: np.ndarray
    v: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.r = np.asarray(self.r, dtype=float).reshape(-1, 3)
        self.v = np.asarray(self.v, dtype=float).reshape(-1, 3)
        if not (len(self.t) == len(self.r) == len(self.v)):
            raise ValueError("ephemeris arrays differ in length")
        if len(self.t) > 1 and np.any(np.diff(self.t) <= 0.0):
            raise ValueError("ephemeris epochs must be strictly increasing")

    def __len__(self) -> int:
        return len(self.t)

    @property
    def step(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0

    def state(self, i: int) -> StateVector:
        return StateVector(Epoch(self.t[i]), self.r[i], self.v[i])

    def interpolator(self) -> CubicHermiteSpline:
        """Cubic Hermite interpolant of position using the stored velocities."""
        return CubicHermiteSpline(self.t, self.r, self.v, axis=0)

    def write(self, path) -> None:
        write_ephemeris(self, path)


def propagate(
    initial: StateVector,
    cfg: ForceModelConfig = TWO_BODY,
    horizon_s: float = 39360 * 60.0,
    output_step_s: float = 60.0,
    rtol: float = 1e-12,
    atol: float = 1e-9,
    atol_v: float = 1e-12,
    sat_id: int | str = 0,
    max_steps: int = 50_000_000,
) -> Ephemeris:
    """Integrate one satellite and sample it every ``output_step_s`` seconds.

    The output grid is ``initial.epoch + k * output_step_s`` for
    k = 0 .. horizon_s / output_step_s - 1.
    """
    if horizon_s <= 0 or output_step_s <= 0:
        raise ValueError("horizon and output step must be positive")
    n = horizon_s / output_step_s
    if abs(n - round(n)) > 1e-9:
        raise ValueError(f"output step {output_step_s} s does not divide horizon {horizon_s} s")
    n = int(round(n))
    if np.linalg.norm(initial.r) <= R_MOON:
        raise PropagationError("initial state is inside the Moon")
    t0 = initial.epoch.seconds
    t_out = t0 + output_step_s * np.arange(n)
    atols = np.array([atol] * 3 + [atol_v] * 3)
    y, status, steps = _integrate(t0, initial.y, t_out, cfg.params(), rtol, atols, 10.0, max_steps)
    if status == IMPACT:
        raise PropagationError(f"satellite {sat_id} impacted the lunar surface")
    if status == UNDERFLOW:
        raise PropagationError(f"step size underflow while propagating satellite {sat_id}")
    if status == MAX_STEPS:
        raise PropagationError(f"satellite {sat_id} exceeded {max_steps} integrator steps")
    return Ephemeris(sat_id, t_out, y[:, :3], y[:, 3:], meta={"steps": int(steps)})


def propagate_many(
    initials: list[tuple[int | str, StateVector]],
    cfg: ForceModelConfig,
    horizon_s: float,
    output_step_s: float = 60.0,
    workers: int = 1,
    **kwargs,
) -> list[Ephemeris]:
    """Propagate satellites independently; output order follows ``initials``."""

    def one(item):
        sat_id, state = item
        return propagate(state, cfg, horizon_s, output_step_s, sat_id=sat_id, **kwargs)

    if workers <= 1 or len(initials) <= 1:
        return [one(item) for item in initials]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, initials))


# --- ephemeris text format ----------------------------------------------------

EPHEM_MAGIC = "# lunarbeam-ephem v1"
FRAME = "MOON_INERTIAL"


def format_ephemeris(eph: Ephemeris) -> str:
    lines = [EPHEM_MAGIC, f"# frame: {FRAME}", f"# satellite: {eph.sat_id}"]
    for t, r, v in zip(eph.t, eph.r, eph.v):
        nums = " ".join(f"{x:.17g}" for x in (*r, *v))
        lines.append(f"{format_iso(t)}  {nums}")
    return "\n".join(lines) + "\n"


def write_ephemeris(eph: Ephemeris, path) -> None:
    Path(path).write_text(format_ephemeris(eph))


_HEADER = re.compile(r"#\s*(\w+)\s*:\s*(.*?)\s*$")


def read_ephemeris(path) -> Ephemeris:
    """Parse an ephemeris file without resampling."""
    path = Path(path)
    sat_id = None
    frame = None
    ts, rows = [], []
    seen_magic = False
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if line == EPHEM_MAGIC:
                    seen_magic = True
                    continue
                m = _HEADER.match(line)
                if m and m.group(1).lower() == "frame":
                    frame = m.group(2)
                elif m and m.group(1).lower() == "satellite":
                    sat_id = m.group(2)
                continue
            parts = line.split()
            if len(parts) != 7:
                raise EphemerisFormatError(f"expected 7 fields, found {len(parts)}", lineno, path)
            try:
                t = parse_iso(parts[0])
                vals = [float(x) for x in parts[1:]]
            except ValueError as exc:
                raise EphemerisFormatError(str(exc), lineno, path) from None
            if not all(math.isfinite(x) for x in vals):
                raise EphemerisFormatError("non-finite value", lineno, path)
            if ts and t <= ts[-1]:
                raise EphemerisFormatError("epochs must be strictly increasing", lineno, path)
            ts.append(t)
            rows.append(vals)
    if not seen_magic:
        raise EphemerisFormatError(f"missing '{EPHEM_MAGIC}' header", None, path)
    if frame != FRAME:
        raise EphemerisFormatError(f"frame {frame!r} does not match {FRAME}", None, path)
    if not rows:
        raise EphemerisFormatError("no samples", None, path)
    data = np.array(rows)
    if sat_id is not None and sat_id.isdigit():
        sat_id = int(sat_id)
    return Ephemeris(sat_id if sat_id is not None else path.stem, np.array(ts), data[:, :3], data[:, 3:])


def resample(eph: Ephemeris, start_s: float, horizon_s: float | None = None, step_s: float = 60.0) -> Ephemeris:
    """Cubic Hermite resampling onto ``start_s + k * step_s``."""
    if len(eph.t) > 1:
        gaps = np.diff(eph.t)
        if gaps.max() > MAX_GAP_S:
            i = int(np.argmax(gaps))
            raise EphemerisFormatError(f"gap of {gaps[i]:.0f} s after {format_iso(eph.t[i])} exceeds {MAX_GAP_S:.0f} s")
    if horizon_s is None:
        n = int(math.floor((eph.t[-1] - start_s) / step_s + 1e-9)) + 1
    else:
        n = int(round(horizon_s / step_s))
    grid = start_s + step_s * np.arange(n)
    if n <= 0 or grid[0] < eph.t[0] - 1e-6 or grid[-1] > eph.t[-1] + 1e-6:
        raise EphemerisFormatError(
            f"satellite {eph.sat_id}: samples span [{format_iso(eph.t[0])}, {format_iso(eph.t[-1])}], "
            f"which does not cover the requested grid"
        )
    if len(eph.t) == 1:
        return Ephemeris(eph.sat_id, grid, np.repeat(eph.r, n, 0), np.repeat(eph.v, n, 0))
    grid = np.clip(grid, eph.t[0], eph.t[-1])
    rs = CubicHermiteSpline(eph.t, eph.r, eph.v, axis=0)
    # velocity from a second Hermite fit needs accelerations; use the position
    # interpolant's derivative instead
    r = rs(grid)
    v = rs.derivative()(grid)
    exact = np.searchsorted(eph.t, grid)
    hit = (exact < len(eph.t)) & (eph.t[np.minimum(exact, len(eph.t) - 1)] == grid)
    r[hit] = eph.r[exact[hit]]
    v[hit] = eph.v[exact[hit]]
    return Ephemeris(eph.sat_id, start_s + step_s * np.arange(n), r, v)


def ingest_ephemeris(path, start_s: float = 0.0, horizon_s: float | None = None, step_s: float = 60.0) -> Ephemeris:
    """Read an ephemeris file and resample it onto the simulation grid."""
    try:
        return resample(read_ephemeris(path), start_s, horizon_s, step_s)
    except EphemerisFormatError as exc:
        if exc.path is None:
            raise EphemerisFormatError(str(exc), None, path) from None
        raise
