"""Planar pose/twist algebra shared by the simulator and the learners.

Angles are radians and stay unwrapped everywhere: orientations may exceed
2*pi so that successive flips remain distinguishable. Nothing in this
module reduces an angle modulo 2*pi except `unwrap_angle`, whose whole job
is to pick the right unwrapped representative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PlanarPose:
    """Position (m) and unwrapped orientation (rad) in the vertical plane."""

    x: float
    z: float
    theta: float


@dataclass(frozen=True)
class PlanarTwist:
    """Linear velocity (m/s) and angular velocity (rad/s)."""

    vx: float
    vz: float
    omega: float


@dataclass(frozen=True)
class RelativeCoords:
    """Componentwise offset of one planar pose relative to another."""

    xr: float
    zr: float
    thetar: float


def relative_coords(obj: PlanarPose, hand: PlanarPose) -> RelativeCoords:
    """Offset of ``obj`` relative to ``hand``: plain componentwise difference."""
    return RelativeCoords(obj.x - hand.x, obj.z - hand.z, obj.theta - hand.theta)


def contact_twist(object_twist: PlanarTwist, rel: RelativeCoords) -> PlanarTwist:
    """Twist of the body point displaced by ``-rel`` from the body's CoM.

    Rigid-body velocity transport: (vx + omega*zr, vz - omega*xr, omega).
    With a zero lever arm the object twist comes back unchanged.
    """
    return PlanarTwist(
        object_twist.vx + object_twist.omega * rel.zr,
        object_twist.vz - object_twist.omega * rel.xr,
        object_twist.omega,
    )


def unwrap_angle(prev_theta: float, raw_theta: float) -> float:
    """Representative of ``raw_theta``'s 2*pi residue class nearest ``prev_theta``.

    ``raw_theta`` is expected in [0, 2*pi), e.g. straight from a pose sensor.
    The result differs from ``prev_theta`` by at most pi (difference taken
    in (-pi, pi]), so feeding consecutive wrapped samples through this keeps
    a continuous, flip-counting angle track.
    """
    delta = (raw_theta - prev_theta) % TWO_PI
    if delta > math.pi:
        delta -= TWO_PI
    return prev_theta + delta
