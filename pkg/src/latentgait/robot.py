"""Simplified quadruped model: state layout, kinematics, quasi-static forces.

The robot has four 3-DoF legs (abduction roll, hip pitch, knee pitch) with
massless links, so torques follow from contact forces alone.  Everything here
is a pure function of its inputs; :class:`RobotDescription` and
:class:`NormalizationStats` are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSupport, Unreachable

LEG_NAMES = ("LF", "RF", "LH", "RH")
LF, RF, LH, RH = range(4)

# Flattened 60-dim state layout: [q(12), ee(12), tau(12), lambda(12),
# base_twist(6), delta_pose(6)].
STATE_DIM = 60
STATE_GROUPS = {
    "q": slice(0, 12),
    "ee": slice(12, 24),
    "tau": slice(24, 36),
    "lambda": slice(36, 48),
    "twist": slice(48, 54),
    "delta_pose": slice(54, 60),
}


def _as_matrix(x, rows, cols, name):
    arr = np.asarray(x, dtype=float)
    if arr.shape != (rows, cols):
        raise ValueError(f"{name} must have shape ({rows}, {cols}), got {arr.shape}")
    return arr


@dataclass(frozen=True)
class RobotDescription:
    """Geometry and inertial constants of the simplified quadruped.

    ``link_lengths`` rows are (hip-abduction lateral offset, thigh, shank) per
    leg.  ``knee_signs`` fixes the knee-bend branch of each leg: front knees
    bend backward, hind knees forward by default.
    """

    body_mass: float = 35.0
    standing_height: float = 0.5
    hip_offsets: np.ndarray = field(
        default_factory=lambda: np.array(
            [
                [0.28, 0.12, 0.0],
                [0.28, -0.12, 0.0],
                [-0.28, 0.12, 0.0],
                [-0.28, -0.12, 0.0],
            ]
        )
    )
    link_lengths: np.ndarray = field(
        default_factory=lambda: np.tile(np.array([0.08, 0.34, 0.33]), (4, 1))
    )
    gravity: float = 9.81
    knee_signs: tuple = (-1, -1, 1, 1)

    def __post_init__(self):
        object.__setattr__(self, "hip_offsets", _as_matrix(self.hip_offsets, 4, 3, "hip_offsets"))
        object.__setattr__(self, "link_lengths", _as_matrix(self.link_lengths, 4, 3, "link_lengths"))
        self.hip_offsets.setflags(write=False)
        self.link_lengths.setflags(write=False)
        if self.body_mass <= 0:
            raise ValueError("body_mass must be positive")
        if np.any(self.link_lengths[:, 1:] <= 0) or np.any(self.link_lengths[:, 0] < 0):
            raise ValueError("link lengths must be positive (abduction offset >= 0)")
        # Standing height must be reachable: IK of the nominal stance succeeds.
        for leg in range(4):
            leg_inverse_kinematics(self, self.nominal_foothold(leg), leg)

    def abduction_side(self, leg: int) -> float:
        """Lateral direction of the abduction link: +1 for left legs."""
        return 1.0 if self.hip_offsets[leg, 1] >= 0 else -1.0

    def nominal_foothold(self, leg: int) -> np.ndarray:
        """Base-frame foot position of the nominal stance."""
        d = self.link_lengths[leg, 0]
        off = np.array([0.0, self.abduction_side(leg) * d, -self.standing_height])
        return self.hip_offsets[leg] + off


@dataclass
class RobotState:
    """One control tick of the 60-dim state vector."""

    q: np.ndarray  # 12 joint angles
    ee: np.ndarray  # 4x3 foot positions, base frame
    tau: np.ndarray  # 12 joint torques
    lam: np.ndarray  # 4x3 contact forces
    base_twist: np.ndarray  # (vx, vy, vz, wx, wy, wz), base frame
    delta_pose: np.ndarray  # pose offset from the control frame

    def to_vector(self) -> np.ndarray:
        return np.concatenate(
            [
                np.ravel(self.q),
                np.ravel(self.ee),
                np.ravel(self.tau),
                np.ravel(self.lam),
                np.ravel(self.base_twist),
                np.ravel(self.delta_pose),
            ]
        )

    @staticmethod
    def from_vector(x: np.ndarray) -> "RobotState":
        x = np.asarray(x, dtype=float)
        if x.shape != (STATE_DIM,):
            raise ValueError(f"state vector must have shape ({STATE_DIM},)")
        return RobotState(
            q=x[STATE_GROUPS["q"]].copy(),
            ee=x[STATE_GROUPS["ee"]].reshape(4, 3).copy(),
            tau=x[STATE_GROUPS["tau"]].copy(),
            lam=x[STATE_GROUPS["lambda"]].reshape(4, 3).copy(),
            base_twist=x[STATE_GROUPS["twist"]].copy(),
            delta_pose=x[STATE_GROUPS["delta_pose"]].copy(),
        )


def build_state(description, q, contacts, base_twist, delta_pose, com_accel=None):
    """Assemble a consistent RobotState from joints and contact flags.

    ``ee`` comes from forward kinematics of ``q``; contact forces are
    distributed quasi-statically and zeroed for swing feet, and torques follow
    from the Jacobian transpose.
    """
    q = np.asarray(q, dtype=float).reshape(12)
    contacts = np.asarray(contacts, dtype=bool).reshape(4)
    ee = np.vstack([leg_forward_kinematics(description, q[3 * i : 3 * i + 3], i) for i in range(4)])
    if com_accel is None:
        com_accel = np.zeros(3)
    lam = stance_force_distribution(contacts, ee, np.zeros(3), com_accel, description)
    tau = joint_torques_from_forces(description, q, lam)
    return RobotState(
        q=q,
        ee=ee,
        tau=tau,
        lam=lam,
        base_twist=np.asarray(base_twist, dtype=float).reshape(6).copy(),
        delta_pose=np.asarray(delta_pose, dtype=float).reshape(6).copy(),
    )


def standing_state(description) -> RobotState:
    """All-stance nominal pose with zero twist; the playback start pose."""
    q = np.concatenate(
        [
            leg_inverse_kinematics(description, description.nominal_foothold(leg), leg)
            for leg in range(4)
        ]
    )
    return build_state(description, q, np.ones(4, dtype=bool), np.zeros(6), np.zeros(6))


# ---------------------------------------------------------------------------
# Kinematics


def _rot_x(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def leg_forward_kinematics(description, q_leg, leg: int) -> np.ndarray:
    """Base-frame foot position of one leg.

    Chain: abduction roll about x, lateral offset d, then a planar 2R chain
    (hip, knee pitches about y) hanging in -z at zero configuration.
    """
    th1, th2, th3 = np.asarray(q_leg, dtype=float)
    d, l1, l2 = description.link_lengths[leg]
    sigma = description.abduction_side(leg)
    x = -l1 * np.sin(th2) - l2 * np.sin(th2 + th3)
    z = -l1 * np.cos(th2) - l2 * np.cos(th2 + th3)
    v = np.array([x, sigma * d, z])
    return description.hip_offsets[leg] + _rot_x(th1) @ v


def leg_jacobian(description, q_leg, leg: int) -> np.ndarray:
    """3x3 Jacobian of the foot position w.r.t. the leg's joint angles."""
    th1, th2, th3 = np.asarray(q_leg, dtype=float)
    d, l1, l2 = description.link_lengths[leg]
    sigma = description.abduction_side(leg)
    x = -l1 * np.sin(th2) - l2 * np.sin(th2 + th3)
    z = -l1 * np.cos(th2) - l2 * np.cos(th2 + th3)
    dx2 = -l1 * np.cos(th2) - l2 * np.cos(th2 + th3)
    dz2 = l1 * np.sin(th2) + l2 * np.sin(th2 + th3)
    dx3 = -l2 * np.cos(th2 + th3)
    dz3 = l2 * np.sin(th2 + th3)
    rot = _rot_x(th1)
    c, s = np.cos(th1), np.sin(th1)
    col1 = np.array([0.0, -s * sigma * d - c * z, c * sigma * d - s * z])
    col2 = rot @ np.array([dx2, 0.0, dz2])
    col3 = rot @ np.array([dx3, 0.0, dz3])
    return np.column_stack([col1, col2, col3])


def leg_inverse_kinematics(description, foot_pos, leg: int) -> np.ndarray:
    """Joint angles reaching ``foot_pos`` (base frame) with the fixed knee branch.

    Raises :class:`Unreachable` when the target lies outside the annulus the
    leg can span; the caller is expected to clamp step length first.
    """
    d, l1, l2 = description.link_lengths[leg]
    sigma = description.abduction_side(leg)
    u = np.asarray(foot_pos, dtype=float) - description.hip_offsets[leg]
    rho_sq = u[1] ** 2 + u[2] ** 2
    if rho_sq < d**2 - 1e-12:
        raise Unreachable(f"target too close to the abduction axis for leg {LEG_NAMES[leg]}")
    z_pl = -np.sqrt(max(rho_sq - d**2, 0.0))
    th1 = np.arctan2(u[2], u[1]) - np.arctan2(z_pl, sigma * d)
    th1 = np.arctan2(np.sin(th1), np.cos(th1))
    x_pl = u[0]
    r_sq = x_pl**2 + z_pl**2
    c3 = (r_sq - l1**2 - l2**2) / (2.0 * l1 * l2)
    if c3 > 1.0 + 1e-9 or c3 < -1.0 - 1e-9:
        raise Unreachable(f"target outside workspace annulus for leg {LEG_NAMES[leg]}")
    c3 = float(np.clip(c3, -1.0, 1.0))
    th3 = description.knee_signs[leg] * np.arccos(c3)
    a = l1 + l2 * np.cos(th3)
    b = l2 * np.sin(th3)
    th2 = np.arctan2(-x_pl, -z_pl) - np.arctan2(b, a)
    th2 = np.arctan2(np.sin(th2), np.cos(th2))
    return np.array([th1, th2, th3])


# ---------------------------------------------------------------------------
# Quasi-static forces and torques


def stance_force_distribution(contacts, feet_pos, com_pos, com_accel, description):
    """Distribute ground-reaction forces over the stance feet.

    Vertical components sum to m*(g + az) and balance the moment of the
    vertical forces about the CoM ground projection: exactly along the support
    line for two stance feet, in least squares (minimum norm) for more.
    Horizontal components split m*a_xy equally over the stance feet.  Swing
    rows are identically zero.
    """
    contacts = np.asarray(contacts, dtype=bool).reshape(4)
    feet_pos = _as_matrix(feet_pos, 4, 3, "feet_pos")
    com_pos = np.asarray(com_pos, dtype=float).reshape(3)
    com_accel = np.asarray(com_accel, dtype=float).reshape(3)
    stance = np.flatnonzero(contacts)
    if stance.size < 2:
        raise DegenerateSupport("force distribution needs at least two stance feet")
    m = description.body_mass
    f_total = m * (description.gravity + com_accel[2])
    lam = np.zeros((4, 3))
    rel = feet_pos[stance, :2] - com_pos[:2]
    if stance.size == 2:
        # Split by the lever arms of the CoM projection along the support line.
        p0, p1 = rel
        seg = p1 - p0
        denom = float(seg @ seg)
        t = 0.5 if denom < 1e-12 else float(np.clip((-p0 @ seg) / denom, 0.0, 1.0))
        fz = np.array([(1.0 - t) * f_total, t * f_total])
    else:
        # Minimum-norm solution of sum(fz) = F with zero vertical-force moment.
        a_mat = np.vstack([np.ones(stance.size), rel[:, 0], rel[:, 1]])
        rhs = np.array([f_total, 0.0, 0.0])
        fz, *_ = np.linalg.lstsq(a_mat, rhs, rcond=None)
    lam[stance, 2] = fz
    lam[stance, :2] = m * com_accel[:2] / stance.size
    return lam


def joint_torques_from_forces(description, q, lam) -> np.ndarray:
    """Quasi-static joint torques: per stance leg, tau = J^T * (-lambda)."""
    q = np.asarray(q, dtype=float).reshape(12)
    lam = _as_matrix(lam, 4, 3, "lam")
    tau = np.zeros(12)
    for leg in range(4):
        f = lam[leg]
        if not np.any(f):
            continue
        jac = leg_jacobian(description, q[3 * leg : 3 * leg + 3], leg)
        tau[3 * leg : 3 * leg + 3] = jac.T @ (-f)
    return tau


# ---------------------------------------------------------------------------
# Normalization


class NormalizationStats:
    """Per-dimension mean/std over a dataset; std floored at 1e-8."""

    def __init__(self, mean, std):
        self.mean = np.asarray(mean, dtype=float).reshape(-1)
        self.std = np.maximum(np.asarray(std, dtype=float).reshape(-1), 1e-8)
        if self.mean.shape != self.std.shape:
            raise ValueError("mean and std must have equal length")

    @staticmethod
    def from_data(states: np.ndarray) -> "NormalizationStats":
        states = np.asarray(states, dtype=float)
        return NormalizationStats(states.mean(axis=0), states.std(axis=0))

    def standardize(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.mean) / self.std

    def destandardize(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) * self.std + self.mean
