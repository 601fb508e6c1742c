"""Closed-form planar four-bar kinematics.

The mechanism is a crank O-A driven by the motor, a coupler A-B, and a beam
pivoted at the fixed point P.  The beam carries the coupler joint B at radius
``pb`` and the indentor tip C further out on the same ray at ``pb + bc``.
The crank angle ``theta`` (about O) is the motor coordinate; the beam angle
``delta`` (about P) is the end-effector coordinate.

Lengths are millimetres, angles radians.  All functions are pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AssemblyError, DegenerateGeometryError, SingularityError

Vec2 = tuple[float, float]

# Failure kinds reported by check_feasibility.
UNREACHABLE = "unreachable"
BRANCH_FLIP = "branch_flip"
NO_FAILURE = "none"

_RATIO_STEP = 1e-6          # rad, central-difference step for dtheta/ddelta
_RATIO_LIMIT = 1e9          # |dtheta/ddelta| beyond this is a dead point
_FLIP_JUMP = math.pi / 2    # crank jump between feasibility samples => flip


@dataclass(frozen=True)
class LinkageDesign:
    """One candidate mechanism: three free lengths plus fixed context.

    ``branch`` selects the assembly circuit: the sign of the cross product
    (B-A) x (P-A), i.e. on which side of the coupler the beam pivot lies.
    Within that circuit the same sign also fixes the crank elbow, so the
    position solve is deterministic without history.
    """

    oa: float                   # crank length |OA|, mm
    ab: float                   # coupler length |AB|, mm
    bc: float                   # beam extension |BC| from joint B to tip C, mm
    ground_o: Vec2              # motor pivot O, mm
    ground_p: Vec2              # beam pivot P, mm
    pb: float                   # beam segment |PB|, mm
    branch: int = -1

    def __post_init__(self) -> None:
        if not (self.oa > 0 and self.ab > 0 and self.pb > 0):
            raise ValueError("link lengths oa, ab, pb must be positive")
        if self.bc < 0:
            raise ValueError("beam extension bc must be >= 0")
        if tuple(self.ground_o) == tuple(self.ground_p):
            raise ValueError("ground pivots O and P must be distinct")
        if self.branch not in (-1, 1):
            raise ValueError("branch must be +1 or -1")


@dataclass(frozen=True)
class Pose:
    """Joint positions of an assembled posture (mm, rad)."""

    theta: float
    delta: float
    a: Vec2
    b: Vec2
    c: Vec2


@dataclass(frozen=True)
class RangeOfMotion:
    """Beam-angle interval a design must cover, with the sample count used
    to verify it."""

    delta_lo: float
    delta_hi: float
    n_check: int = 101

    def __post_init__(self) -> None:
        if not self.delta_lo < self.delta_hi:
            raise ValueError("delta_lo must be below delta_hi")
        if self.n_check < 2:
            raise ValueError("n_check must be at least 2")


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of an assemblability sweep over a range of motion."""

    feasible: bool
    failure_angle: float | None
    failure_kind: str

    def __post_init__(self) -> None:
        if self.feasible != (self.failure_kind == NO_FAILURE):
            raise ValueError("feasible flag inconsistent with failure kind")


def _wrap_pi(angle: float) -> float:
    """Map an angle to (-pi, pi]."""
    return math.atan2(math.sin(angle), math.cos(angle))


def circle_intersection(c1: Vec2, r1: float, c2: Vec2, r2: float) -> list[Vec2]:
    """Intersect two circles.

    Returns zero, one (tangency) or two points.  Coincident circles raise
    DegenerateGeometryError because the solution set is a whole circle.
    """
    if r1 <= 0 or r2 <= 0:
        raise ValueError("circle radii must be positive")
    dx = c2[0] - c1[0]
    dy = c2[1] - c1[1]
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        if r1 == r2:
            raise DegenerateGeometryError("coincident circles intersect everywhere")
        return []
    d = math.sqrt(d2)
    along = (r1 * r1 - r2 * r2 + d2) / (2.0 * d)
    h2 = r1 * r1 - along * along
    tol = 1e-12 * (r1 * r1 + r2 * r2)
    if h2 < -tol:
        return []
    fx = c1[0] + along * dx / d
    fy = c1[1] + along * dy / d
    if h2 <= tol:
        return [(fx, fy)]
    h = math.sqrt(h2)
    nx = -dy / d
    ny = dx / d
    return [(fx + h * nx, fy + h * ny), (fx - h * nx, fy - h * ny)]


def forward_position(design: LinkageDesign, theta: float) -> Pose:
    """Assemble the linkage for a crank angle; raises AssemblyError when the
    coupler cannot reach the beam circle."""
    ox, oy = design.ground_o
    px, py = design.ground_p
    ax = ox + design.oa * math.cos(theta)
    ay = oy + design.oa * math.sin(theta)
    dx = px - ax
    dy = py - ay
    d2 = dx * dx + dy * dy
    if d2 == 0.0:
        raise AssemblyError("crank tip coincides with the beam pivot")
    d = math.sqrt(d2)
    along = (design.ab**2 - design.pb**2 + d2) / (2.0 * d)
    h2 = design.ab**2 - along * along
    tol = 1e-12 * (design.ab**2 + design.pb**2)
    if h2 < -tol:
        raise AssemblyError(
            f"no assembly at theta={theta:.9g} rad: coupler/beam circles "
            f"are {d:.6g} mm apart for reach [{abs(design.ab - design.pb):.6g}, "
            f"{design.ab + design.pb:.6g}]"
        )
    h = math.sqrt(max(h2, 0.0))
    ux = dx / d
    uy = dy / d
    # The candidate on the +(-uy, ux) side has cross((B-A),(P-A)) < 0.
    side = -design.branch
    bx = ax + along * ux - side * h * uy
    by = ay + along * uy + side * h * ux
    delta = math.atan2(by - py, bx - px)
    reach = design.pb + design.bc
    cx = px + reach * math.cos(delta)
    cy = py + reach * math.sin(delta)
    return Pose(theta=theta, delta=delta, a=(ax, ay), b=(bx, by), c=(cx, cy))


def solve_deltas(
    design: LinkageDesign, deltas: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised inverse position solve.

    For each beam angle returns the crank angle theta and the joint
    coordinates (ax, ay, bx, by).  Entries are NaN where the posture cannot
    be assembled on the design's branch.
    """
    deltas = np.asarray(deltas, dtype=float)
    ox, oy = design.ground_o
    px, py = design.ground_p
    bx = px + design.pb * np.cos(deltas)
    by = py + design.pb * np.sin(deltas)
    dx = bx - ox
    dy = by - oy
    d2 = dx * dx + dy * dy
    d = np.sqrt(d2)
    with np.errstate(divide="ignore", invalid="ignore"):
        along = (design.oa**2 - design.ab**2 + d2) / (2.0 * d)
        h2 = design.oa**2 - along * along
        tol = 1e-12 * (design.oa**2 + design.ab**2)
        closes = (h2 >= -tol) & (d > 0.0)
        h = np.sqrt(np.clip(h2, 0.0, None))
        ux = dx / d
        uy = dy / d
    fx = ox + along * ux
    fy = oy + along * uy
    # Crank elbow: the candidate on the +(-uy, ux) side has
    # cross((A-O),(B-O)) < 0, so branch=-1 prefers it and +1 the mirror.
    side = -design.branch
    ax1 = fx - side * h * uy
    ay1 = fy + side * h * ux
    ax2 = fx + side * h * uy
    ay2 = fy - side * h * ux

    def _on_branch(axc: np.ndarray, ayc: np.ndarray) -> np.ndarray:
        cross = (bx - axc) * (py - ayc) - (by - ayc) * (px - axc)
        return closes & (cross * design.branch >= 0.0)

    ok1 = _on_branch(ax1, ay1)
    ok2 = _on_branch(ax2, ay2)
    ax = np.where(ok1, ax1, np.where(ok2, ax2, np.nan))
    ay = np.where(ok1, ay1, np.where(ok2, ay2, np.nan))
    theta = np.arctan2(ay - oy, ax - ox)
    return theta, ax, ay, bx, by


def inverse_position(design: LinkageDesign, delta: float) -> float:
    """Crank angle that places the beam at ``delta``.

    Satisfies forward_position(design, inverse_position(design, delta)).delta
    == delta to 1e-9 rad.  Raises AssemblyError when |OB| is outside the
    dyad reach [|oa-ab|, oa+ab] or only the opposite branch assembles.
    """
    theta, _, _, bx, by = solve_deltas(design, np.array([delta]))
    t = float(theta[0])
    if math.isnan(t):
        ox, oy = design.ground_o
        d = math.hypot(float(bx[0]) - ox, float(by[0]) - oy)
        raise AssemblyError(
            f"no assembly at delta={delta:.9g} rad: |OB|={d:.6g} mm, dyad reach "
            f"[{abs(design.oa - design.ab):.6g}, {design.oa + design.ab:.6g}] "
            f"on branch {design.branch:+d}"
        )
    return t


def transmission_ratio(design: LinkageDesign, delta: float) -> float:
    """Local gearing dtheta/ddelta by central difference.

    Raises SingularityError at dead points or when either neighbouring
    posture fails to assemble (boundary of the motion range).
    """
    try:
        t_hi = inverse_position(design, delta + _RATIO_STEP)
        t_lo = inverse_position(design, delta - _RATIO_STEP)
    except AssemblyError as exc:
        raise SingularityError(
            f"motion boundary within {_RATIO_STEP:g} rad of delta={delta:.9g}"
        ) from exc
    ratio = _wrap_pi(t_hi - t_lo) / (2.0 * _RATIO_STEP)
    if abs(ratio) > _RATIO_LIMIT:
        raise SingularityError(f"dead point at delta={delta:.9g}: |dtheta/ddelta| > {_RATIO_LIMIT:g}")
    return ratio


def check_feasibility(design: LinkageDesign, rom: RangeOfMotion) -> FeasibilityReport:
    """Sweep the range of motion and report the first assembly failure.

    A design is feasible when every sampled beam angle assembles and the
    crank angle varies continuously (no branch flip: consecutive samples
    must differ by less than pi/2).
    """
    deltas = np.linspace(rom.delta_lo, rom.delta_hi, rom.n_check)
    theta, _, _, _, _ = solve_deltas(design, deltas)
    bad = np.isnan(theta)
    if bad.any():
        first_bad = int(np.argmax(bad))
    else:
        first_bad = rom.n_check
    step = np.arctan2(np.sin(np.diff(theta)), np.cos(np.diff(theta)))
    flips = np.abs(step) >= _FLIP_JUMP
    if flips.any():
        first_flip = int(np.argmax(flips)) + 1
    else:
        first_flip = rom.n_check
    if first_bad == rom.n_check and first_flip == rom.n_check:
        return FeasibilityReport(True, None, NO_FAILURE)
    if first_bad <= first_flip:
        return FeasibilityReport(False, float(deltas[first_bad]), UNREACHABLE)
    return FeasibilityReport(False, float(deltas[first_flip]), BRANCH_FLIP)
