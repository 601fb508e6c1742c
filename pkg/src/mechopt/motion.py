"""Imposed end-effector motion and its transformation to the motor side.

One cycle is a point-to-point down-stroke followed by the mirrored
up-stroke, each following a cycloidal law so velocity and acceleration
vanish at the stroke ends.  The beam-side profile is analytic; the motor
side is obtained by the inverse position solve and differentiated on the
periodic time grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import geometry
from .errors import AssemblyError
from .geometry import LinkageDesign

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class MotionSpec:
    """Reciprocal point-to-point cycle of the beam angle."""

    delta_i: float                          # stroke start, rad (indentor clear)
    delta_e: float                          # stroke end, rad (bag compressed)
    clearance_margin: float = math.radians(2.0)
    period: float = 3.0                     # s, full down+up cycle
    n_samples: int = 400                    # even, uniform samples per cycle

    def __post_init__(self) -> None:
        if self.delta_i == self.delta_e:
            raise ValueError("stroke endpoints must differ")
        if self.period <= 0:
            raise ValueError("period must be positive")
        if self.n_samples < 8 or self.n_samples % 2:
            raise ValueError("n_samples must be even and at least 8")
        if self.clearance_margin < 0:
            raise ValueError("clearance_margin must be >= 0")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Time-sampled beam and motor motion over one period.

    The grid is uniform, includes t=0 and excludes t=period.  Motor-side
    fields are None until filled in by motor_trajectory().
    """

    t: np.ndarray
    delta: np.ndarray
    ddelta: np.ndarray
    dddelta: np.ndarray
    theta: np.ndarray | None = None
    dtheta: np.ndarray | None = None
    ddtheta: np.ndarray | None = None


def cycloidal_stroke(
    delta_a: float, delta_b: float, duration: float, n: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Sample one cycloidal point-to-point stroke on n points including both
    endpoints; returns (angle, velocity, acceleration)."""
    if duration <= 0:
        raise ValueError("duration must be positive")
    if n < 2:
        raise ValueError("need at least two samples")
    s = np.linspace(0.0, 1.0, n)
    span = delta_b - delta_a
    pos = delta_a + span * (s - np.sin(_TWO_PI * s) / _TWO_PI)
    vel = span * (1.0 - np.cos(_TWO_PI * s)) / duration
    acc = span * _TWO_PI * np.sin(_TWO_PI * s) / duration**2
    return pos, vel, acc


def build_cycle(spec: MotionSpec) -> Trajectory:
    """Beam-side trajectory: down-stroke then mirrored up-stroke."""
    half = spec.n_samples // 2
    half_t = spec.period / 2.0
    down = cycloidal_stroke(spec.delta_i, spec.delta_e, half_t, half + 1)
    up = cycloidal_stroke(spec.delta_e, spec.delta_i, half_t, half + 1)
    # The last sample of each stroke equals the first of the next, so drop it.
    delta = np.concatenate([down[0][:-1], up[0][:-1]])
    ddelta = np.concatenate([down[1][:-1], up[1][:-1]])
    dddelta = np.concatenate([down[2][:-1], up[2][:-1]])
    t = np.arange(spec.n_samples) * (spec.period / spec.n_samples)
    return Trajectory(t=t, delta=delta, ddelta=ddelta, dddelta=dddelta)


def motor_trajectory(design: LinkageDesign, traj: Trajectory) -> Trajectory:
    """Fill in the motor side of a beam trajectory.

    theta is the inverse position solve of each sample, unwrapped to a
    continuous sequence; its derivatives are central differences on the
    periodic grid.  Raises AssemblyError when a sample does not assemble,
    which means the feasibility gate was skipped.
    """
    theta, _, _, _, _ = geometry.solve_deltas(design, traj.delta)
    if np.isnan(theta).any():
        k = int(np.argmax(np.isnan(theta)))
        raise AssemblyError(
            f"trajectory sample {k} (delta={traj.delta[k]:.9g} rad) does not "
            "assemble; run check_feasibility before building the motor profile"
        )
    theta = np.unwrap(theta)
    dt = float(traj.t[1] - traj.t[0])
    dtheta = (np.roll(theta, -1) - np.roll(theta, 1)) / (2.0 * dt)
    ddtheta = (np.roll(theta, -1) - 2.0 * theta + np.roll(theta, 1)) / dt**2
    return replace(traj, theta=theta, dtheta=dtheta, ddtheta=ddtheta)
