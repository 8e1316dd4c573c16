"""Gravity-only free flight.

Closed-form landing map for a planar rigid body released with a pose and a
twist, plus a fixed-step integration oracle used to cross-check it. The
flight model is drag-free: constant horizontal and angular velocity,
constant downward acceleration GRAVITY. The landing plane sits at a fixed
height (0 by default) and the landing pose is the horizontal position and
unwrapped orientation when the CoM crosses it on the way down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .planar import PlanarPose, PlanarTwist

GRAVITY = 9.81

#: Column order used whenever a release state is packed into a 6-vector.
STATE_COLUMNS = ("x", "z", "theta", "vx", "vz", "omega")


class NoLandingSolution(ValueError):
    """The ballistic arc never reaches the landing height."""


@dataclass(frozen=True)
class ReleaseState:
    """Object pose and twist at the instant the gripper lets go."""

    pose: PlanarPose
    twist: PlanarTwist

    def as_array(self) -> np.ndarray:
        p, t = self.pose, self.twist
        return np.array([p.x, p.z, p.theta, t.vx, t.vz, t.omega], dtype=float)

    @staticmethod
    def from_array(a) -> "ReleaseState":
        x, z, th, vx, vz, om = (float(v) for v in a)
        return ReleaseState(PlanarPose(x, z, th), PlanarTwist(vx, vz, om))


@dataclass(frozen=True)
class LandingPose:
    """Horizontal position (m) and unwrapped orientation (rad) at the plane."""

    x: float
    theta: float


def fly_time(z0: float, vz: float, z_land: float = 0.0) -> float:
    """Time until the arc from height ``z0`` with vertical speed ``vz`` lands.

    Descending branch of the parabola:
        t = (vz + sqrt(vz^2 + 2*G*(z0 - z_land))) / G
    Raises NoLandingSolution when the arc never reaches ``z_land``, or only
    crossed it in the past (released below the plane while moving down).
    """
    disc = vz * vz + 2.0 * GRAVITY * (z0 - z_land)
    if disc < 0.0:
        raise NoLandingSolution(
            f"arc from z0={z0:.6g} with vz={vz:.6g} never reaches z={z_land:.6g}"
        )
    t = (vz + math.sqrt(disc)) / GRAVITY
    if t < 0.0:
        raise NoLandingSolution(
            f"release at z0={z0:.6g} is below z={z_land:.6g} and moving down"
        )
    return t


def landing_pose(release: ReleaseState, z_land: float = 0.0) -> LandingPose:
    """Closed-form landing pose: drift pose and orientation for the flying time."""
    t = fly_time(release.pose.z, release.twist.vz, z_land)
    return LandingPose(
        release.pose.x + release.twist.vx * t,
        release.pose.theta + release.twist.omega * t,
    )


def landing_from_arrays(states: np.ndarray, z_land: float = 0.0):
    """Vectorized landing map over release states packed as (N, 6) rows.

    Returns ``(x_land, theta_land, valid)``. Rows whose arc misses the plane
    are invalid and carry NaN instead of raising, because the cone search and
    dataset transfer must skip such candidates rather than abort.
    """
    states = np.asarray(states, dtype=float)
    z, vx, vz, om = states[:, 1], states[:, 3], states[:, 4], states[:, 5]
    disc = vz * vz + 2.0 * GRAVITY * (z - z_land)
    t = (vz + np.sqrt(np.maximum(disc, 0.0))) / GRAVITY
    valid = (disc >= 0.0) & (t >= 0.0)
    t = np.where(valid, t, np.nan)
    return states[:, 0] + vx * t, states[:, 2] + om * t, valid


def integrate_flight_oracle(
    release: ReleaseState, z_land: float = 0.0, dt: float = 1e-4
) -> LandingPose:
    """Landing pose by fixed-step integration, independent of `landing_pose`.

    Steps the free-flight dynamics with step ``dt``, detects the downward
    crossing of the landing plane, and refines the crossing time inside the
    bracketing step by interpolation. Intended as a test oracle; it never
    consults the closed-form flying-time formula.
    """
    out = integrate_flight_oracle_batch(release.as_array()[None, :], z_land, dt)
    return LandingPose(float(out[0, 0]), float(out[0, 1]))


def integrate_flight_oracle_batch(
    states: np.ndarray, z_land: float = 0.0, dt: float = 1e-4, t_max: float = 10.0
) -> np.ndarray:
    """Vectorized integration oracle over (N, 6) release-state rows.

    Returns an (N, 2) array of (x_land, theta_land). Raises NoLandingSolution
    if any state fails to cross the plane within ``t_max`` seconds.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    states = np.asarray(states, dtype=float)
    x = states[:, 0].copy()
    z = states[:, 1].copy()
    th = states[:, 2].copy()
    vx = states[:, 3].copy()
    vz = states[:, 4].copy()
    om = states[:, 5].copy()

    n = states.shape[0]
    landed = np.zeros(n, dtype=bool)
    bx = np.empty(n)
    bth = np.empty(n)
    bz0 = np.empty(n)
    bv0 = np.empty(n)
    bz1 = np.empty(n)
    bv1 = np.empty(n)

    # For this constant-acceleration field the four RK4 stages collapse to the
    # quadratic step below; tests check it against an explicit 4-stage step.
    curve = 0.5 * GRAVITY * dt * dt
    dv = GRAVITY * dt
    for _ in range(int(math.ceil(t_max / dt))):
        z_new = z + vz * dt - curve
        vz_new = vz - dv
        # downward crossing only; starting on the plane moving up is a launch
        hit = (z >= z_land) & (z_new < z_land) & ~landed
        hit &= ~((z == z_land) & (vz > 0.0))
        if hit.any():
            idx = np.nonzero(hit)[0]
            bx[idx] = x[idx]
            bth[idx] = th[idx]
            bz0[idx] = z[idx]
            bv0[idx] = vz[idx]
            bz1[idx] = z_new[idx]
            bv1[idx] = vz_new[idx]
            landed[idx] = True
        z = z_new
        vz = vz_new
        x = x + vx * dt
        th = th + om * dt
        if landed.all():
            break
    if not landed.all():
        raise NoLandingSolution(
            f"{int((~landed).sum())} state(s) did not cross z={z_land:.6g} within {t_max:g} s"
        )
    s = _hermite_crossing(bz0, bv0, bz1, bv1, z_land, dt)
    return np.column_stack((bx + vx * s, bth + om * s))


def _hermite_crossing(z0, v0, z1, v1, z_land, dt) -> np.ndarray:
    """Crossing time inside a bracketing step, by cubic Hermite interpolation.

    Bisection on the interpolant built from the step's endpoint heights and
    vertical speeds. Ballistic z(t) is a quadratic, which the cubic
    reproduces exactly, so the only error left is the bisection tolerance.
    """
    d0 = z0 - z_land
    d1 = z1 - z_land
    lo = np.zeros_like(z0)
    hi = np.full_like(z0, dt)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        u = mid / dt
        w = 1.0 - u
        f = (
            (1.0 + 2.0 * u) * w * w * d0
            + mid * w * w * v0
            + u * u * (3.0 - 2.0 * u) * d1
            + u * u * (mid - dt) * v1
        )
        pos = f >= 0.0
        lo = np.where(pos, mid, lo)
        hi = np.where(pos, hi, mid)
    return 0.5 * (lo + hi)
