"""Inverse dynamics of the linkage.

The beam angle delta is the generalized coordinate.  With the generalized
inertia M(delta) assembled from the links' translating and rotating parts,
the motor torque follows from virtual work:

    tau * (dtheta/ddelta) = M*ddelta'' + (1/2)*dM/ddelta*delta'^2 + G + T_bag

where G collects gravity on the resisting side and T_bag the bag reaction.
All kinematic sensitivities are central differences with a 1e-6 rad step,
so the formulation never needs mechanism-specific closed-form equations.

Dynamic quantities are SI (kg, m, N*m); design lengths arrive in mm and are
converted internally.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import AssemblyError, SingularityError
from .geometry import LinkageDesign
from .motion import Trajectory

_MM = 1e-3           # mm -> m
_H = 1e-6            # rad, sensitivity step
_DEAD_POINT = 1e-9   # |dtheta/ddelta| below this cannot be driven


@dataclass(frozen=True)
class MassModel:
    """Inertial data the CAD model would otherwise supply: uniform rod
    densities for crank OA, coupler AB and beam P->C, a point mass at the
    indentor tip, and the gravity vector."""

    rho_crank: float = 0.0       # kg/m
    rho_coupler: float = 0.0     # kg/m
    rho_beam: float = 0.0        # kg/m
    m_indentor: float = 0.0      # kg
    gravity: tuple[float, float] = (0.0, -9.81)   # m/s^2

    def __post_init__(self) -> None:
        if min(self.rho_crank, self.rho_coupler, self.rho_beam, self.m_indentor) < 0:
            raise ValueError("densities and the indentor mass must be >= 0")


@dataclass(frozen=True)
class BagLoad:
    """Linear-spring bag resistance at the indentor tip.

    Contact starts at beam angle ``delta_contact``; ``compression_sign``
    states on which side of it the bag is compressed (+1: delta below
    contact, -1: delta above contact).
    """

    k_bag: float = 0.0            # N/m of tip travel
    delta_contact: float = 0.0    # rad
    compression_sign: int = 1

    def __post_init__(self) -> None:
        if self.k_bag < 0:
            raise ValueError("bag stiffness must be >= 0")
        if self.compression_sign not in (-1, 1):
            raise ValueError("compression_sign must be +1 or -1")


@dataclass(frozen=True, eq=False)
class TorqueProfile:
    """Motor torque over one cycle with its summary metrics."""

    tau: np.ndarray        # N*m per time sample
    t_rms: float           # sqrt(mean(tau^2)), N*m
    t_max: float           # max |tau|, N*m
    speed_max: float       # max |dtheta/dt|, rad/s


def link_inertia(rho: float, length: float) -> tuple[float, float, float]:
    """Uniform-rod properties: (mass, com offset from the proximal joint,
    moment of inertia about the com)."""
    if rho < 0:
        raise ValueError("density must be >= 0")
    if length <= 0:
        raise ValueError("length must be positive")
    mass = rho * length
    return mass, length / 2.0, rho * length**3 / 12.0


def bag_load_torque(load: BagLoad, design: LinkageDesign, delta: float) -> float:
    """Torque the bag exerts on the beam at ``delta`` (N*m), signed to
    oppose the compression; zero out of contact."""
    sign = load.compression_sign
    penetration = max(0.0, sign * (load.delta_contact - delta))
    radius = (design.pb + design.bc) * _MM
    return sign * load.k_bag * radius * radius * penetration


def _bag_torque_array(load: BagLoad, design: LinkageDesign, deltas: np.ndarray) -> np.ndarray:
    sign = load.compression_sign
    penetration = np.maximum(0.0, sign * (load.delta_contact - deltas))
    radius = (design.pb + design.bc) * _MM
    return sign * load.k_bag * radius * radius * penetration


class _Bodies:
    """Mass properties and body frames evaluated on a delta stencil."""

    def __init__(self, design: LinkageDesign, mass: MassModel, deltas: np.ndarray):
        self.gravity = np.asarray(mass.gravity, dtype=float)
        oa_m = design.oa * _MM
        ab_m = design.ab * _MM
        beam_m = (design.pb + design.bc) * _MM
        self.masses = np.array([
            mass.rho_crank * oa_m,
            mass.rho_coupler * ab_m,
            mass.rho_beam * beam_m,
            mass.m_indentor,
        ])
        self.inertias = np.array([
            mass.rho_crank * oa_m**3 / 12.0,
            mass.rho_coupler * ab_m**3 / 12.0,
            mass.rho_beam * beam_m**3 / 12.0,
            0.0,
        ])

        theta, ax, ay, bx, by = geometry.solve_deltas(design, deltas)
        if np.isnan(theta).any():
            raise AssemblyError(
                "dynamic analysis hit an unassemblable posture; the design "
                "must pass the feasibility check first"
            )
        ox, oy = design.ground_o
        px, py = design.ground_p
        tip = (design.pb + design.bc) / design.pb
        # Body com positions in metres, shape (4, ..., 2).
        self.coms = np.stack([
            np.stack([(ox + ax) / 2.0, (oy + ay) / 2.0], axis=-1) * _MM,
            np.stack([(ax + bx) / 2.0, (ay + by) / 2.0], axis=-1) * _MM,
            np.stack([px + (bx - px) * (tip / 2.0),
                      py + (by - py) * (tip / 2.0)], axis=-1) * _MM,
            np.stack([px + (bx - px) * tip,
                      py + (by - py) * tip], axis=-1) * _MM,
        ])
        # Body orientations: crank, coupler, beam, and the tip mass (carried
        # by the beam; its inertia is zero so the angle only needs a shape).
        beam_angle = np.broadcast_to(deltas, theta.shape)
        self.angles = np.stack([
            theta,
            np.arctan2(by - ay, bx - ax),
            beam_angle,
            beam_angle,
        ])
        self.theta = theta

    def sensitivities(self, hi: int, lo: int, gap: float):
        """d(com)/ddelta and d(angle)/ddelta between two stencil rows."""
        dcom = (self.coms[:, hi, :, :] - self.coms[:, lo, :, :]) / gap
        dang = self.angles[:, hi, :] - self.angles[:, lo, :]
        dang = np.arctan2(np.sin(dang), np.cos(dang)) / gap
        return dcom, dang

    def inertia_between(self, hi: int, lo: int, gap: float) -> np.ndarray:
        dcom, dang = self.sensitivities(hi, lo, gap)
        trans = np.einsum("k,knd,knd->n", self.masses, dcom, dcom)
        rot = np.einsum("k,kn,kn->n", self.inertias, dang, dang)
        return trans + rot

    def potential(self, row: int) -> np.ndarray:
        """Gravitational potential energy of all bodies at one stencil row."""
        height_terms = np.einsum("knd,d->kn", self.coms[:, row, :, :], self.gravity)
        return -np.einsum("k,kn->n", self.masses, height_terms)


def _stencil(deltas: np.ndarray) -> np.ndarray:
    return np.stack([deltas - 2 * _H, deltas - _H, deltas, deltas + _H, deltas + 2 * _H])


def inverse_dynamics(
    design: LinkageDesign,
    mass: MassModel,
    load: BagLoad,
    traj: Trajectory,
) -> TorqueProfile:
    """Motor torque profile required to execute a trajectory.

    Raises SingularityError when a dead point (vanishing dtheta/ddelta)
    lies inside the stroke; such a design cannot be driven and must be
    rejected as dynamically infeasible.
    """
    if traj.theta is None or traj.dtheta is None:
        raise ValueError("trajectory lacks the motor side; run motor_trajectory first")
    bodies = _Bodies(design, mass, _stencil(traj.delta))

    m_mid = bodies.inertia_between(3, 1, 2 * _H)
    m_plus = bodies.inertia_between(4, 2, 2 * _H)
    m_minus = bodies.inertia_between(2, 0, 2 * _H)
    dm = (m_plus - m_minus) / (2 * _H)

    dcom, _ = bodies.sensitivities(3, 1, 2 * _H)
    gravity_term = -np.einsum("k,knd,d->n", bodies.masses, dcom, bodies.gravity)

    theta = bodies.theta
    dtheta_ddelta = theta[3, :] - theta[1, :]
    dtheta_ddelta = np.arctan2(np.sin(dtheta_ddelta), np.cos(dtheta_ddelta)) / (2 * _H)
    if np.min(np.abs(dtheta_ddelta)) < _DEAD_POINT:
        k = int(np.argmin(np.abs(dtheta_ddelta)))
        raise SingularityError(
            f"dead point inside the stroke at delta={traj.delta[k]:.9g} rad"
        )

    bag_reaction = -_bag_torque_array(load, design, traj.delta)
    generalized = (
        m_mid * traj.dddelta
        + 0.5 * dm * traj.ddelta**2
        + gravity_term
        + bag_reaction
    )
    tau = generalized / dtheta_ddelta
    if not np.all(np.isfinite(tau)):
        raise ArithmeticError("torque computation produced non-finite values")
    return TorqueProfile(
        tau=tau,
        t_rms=float(np.sqrt(np.mean(tau**2))),
        t_max=float(np.max(np.abs(tau))),
        speed_max=float(np.max(np.abs(traj.dtheta))),
    )


def energy_audit(
    design: LinkageDesign,
    mass: MassModel,
    load: BagLoad,
    traj: Trajectory,
    profile: TorqueProfile,
) -> float:
    """Relative energy-balance residual of a torque profile.

    Over each half-cycle the motor work integral must equal the change in
    kinetic, gravitational and bag-spring energy; the residual is the
    mismatch normalized by the integrated absolute motor power.  Returns
    the worse of the two half-cycles.
    """
    if traj.dtheta is None:
        raise ValueError("trajectory lacks the motor side; run motor_trajectory first")
    n = len(traj.delta)
    dt = float(traj.t[1] - traj.t[0])
    bodies = _Bodies(design, mass, _stencil(traj.delta))
    m_mid = bodies.inertia_between(3, 1, 2 * _H)

    e_kin = 0.5 * m_mid * traj.ddelta**2
    e_pot = bodies.potential(2)
    sign = load.compression_sign
    penetration = np.maximum(0.0, sign * (load.delta_contact - traj.delta))
    radius = (design.pb + design.bc) * _MM
    e_bag = 0.5 * load.k_bag * (radius * penetration) ** 2

    power = profile.tau * traj.dtheta
    # Close the cycle: sample n wraps around to sample 0.
    wrap = lambda arr: np.concatenate([arr, arr[:1]])
    power_w, e_kin_w, e_pot_w, e_bag_w = map(wrap, (power, e_kin, e_pot, e_bag))

    half = n // 2
    residual = 0.0
    for i0, i1 in ((0, half), (half, n)):
        sl = slice(i0, i1 + 1)
        work = float(np.trapezoid(power_w[sl], dx=dt))
        stored = float(
            (e_kin_w[i1] - e_kin_w[i0])
            + (e_pot_w[i1] - e_pot_w[i0])
            + (e_bag_w[i1] - e_bag_w[i0])
        )
        scale = float(np.trapezoid(np.abs(power_w[sl]), dx=dt))
        residual = max(residual, abs(work - stored) / max(1e-12, scale))
    return residual
