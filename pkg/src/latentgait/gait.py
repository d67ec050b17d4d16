"""Procedural trot synthesis: contact schedules, base motion, full trajectories.

The synthesizer produces the training corpus: fixed-parameter trot on flat
ground under piecewise-constant sampled base-twist commands.  Base motion is
kinematic (integrated twist at constant height), feet follow a smooth swing
profile between footholds chosen by a capture-point-flavoured heuristic, and
forces/torques come from the quasi-static model in :mod:`latentgait.robot`.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import CommandOutOfBounds, InvalidParams
from .robot import (
    RobotDescription,
    STATE_DIM,
    STATE_GROUPS,
    leg_inverse_kinematics,
    stance_force_distribution,
)

PHASE_NAMES = ("FULL_A", "SWING_LF_RH", "FULL_B", "SWING_RF_LH")
FULL_A, SWING_LF_RH, FULL_B, SWING_RF_LH = range(4)

# Contact pattern per phase, foot order (LF, RF, LH, RH).
PHASE_CONTACTS = np.array(
    [
        [True, True, True, True],
        [False, True, True, False],
        [True, True, True, True],
        [True, False, False, True],
    ]
)


def _ticks(duration: float, f_c: float, name: str, minimum: int) -> int:
    raw = duration * f_c
    ticks = int(round(raw))
    if abs(raw - ticks) > 1e-9:
        raise InvalidParams(f"{name} of {duration} s does not quantize at {f_c} Hz")
    if ticks < minimum:
        raise InvalidParams(f"{name} must span at least {minimum} tick(s)")
    return ticks


@dataclass(frozen=True)
class GaitParams:
    """Fixed trot parameters: swing/full-stance durations and step height."""

    swing_duration: float = 0.4
    stance_duration: float = 0.08
    step_height: float = 0.08
    control_frequency: float = 100.0

    def __post_init__(self):
        if self.step_height < 0:
            raise InvalidParams("step_height must be non-negative")
        self.swing_ticks  # noqa: B018 - validates quantization
        self.stance_ticks

    @property
    def swing_ticks(self) -> int:
        return _ticks(self.swing_duration, self.control_frequency, "swing_duration", 1)

    @property
    def stance_ticks(self) -> int:
        return _ticks(self.stance_duration, self.control_frequency, "stance_duration", 0)

    @property
    def cycle_ticks(self) -> int:
        """One gait cycle: FULL, SWING(LF+RH), FULL, SWING(RF+LH)."""
        return 2 * (self.swing_ticks + self.stance_ticks)


@dataclass
class ContactSchedule:
    """Tick-indexed contact plan with per-tick phase labels."""

    params: GaitParams
    phases: np.ndarray  # (T,) int8, values in range(4)
    contacts: np.ndarray  # (T, 4) bool

    def __len__(self):
        return len(self.phases)


def build_contact_schedule(params: GaitParams, n_cycles: int) -> ContactSchedule:
    """Exact-tick trot schedule over ``n_cycles`` gait cycles."""
    if n_cycles < 1:
        raise InvalidParams("n_cycles must be >= 1")
    sw, st = params.swing_ticks, params.stance_ticks
    cycle = np.concatenate(
        [
            np.full(st, FULL_A, dtype=np.int8),
            np.full(sw, SWING_LF_RH, dtype=np.int8),
            np.full(st, FULL_B, dtype=np.int8),
            np.full(sw, SWING_RF_LH, dtype=np.int8),
        ]
    )
    phases = np.tile(cycle, n_cycles)
    return ContactSchedule(params=params, phases=phases, contacts=PHASE_CONTACTS[phases])


def swing_foot_trajectory(s, step_length: float, step_height: float):
    """Swing offsets at phase ``s`` in [0, 1]: (horizontal, vertical).

    Horizontal follows a smoothed ramp with zero end-point velocity; vertical
    is a sin^2 arch peaking at ``step_height`` for s = 1/2 and flat at both
    lift-off and touch-down.
    """
    s = np.asarray(s, dtype=float)
    horizontal = step_length * (s - np.sin(2.0 * np.pi * s) / (2.0 * np.pi))
    vertical = step_height * np.sin(np.pi * s) ** 2
    return horizontal, vertical


@dataclass
class BaseMotion:
    """Kinematic base plan: world pose plus body-frame velocity/acceleration."""

    position: np.ndarray  # (T, 2) world xy
    yaw: np.ndarray  # (T,)
    velocity: np.ndarray  # (T, 3) body (vx, vy, wz)
    accel_body: np.ndarray  # (T, 3) body (ax, ay, 0)


def plan_base_motion(
    commands: np.ndarray,
    description: RobotDescription,
    f_c: float,
    smoothing_tau: float = 0.2,
    bounds=(0.5, 0.5, 0.5),
) -> BaseMotion:
    """Integrate commanded twist at constant height with exponential smoothing.

    ``commands`` holds one (vx, vy, yaw-rate) row per tick; the realized
    velocity tracks it first order with time constant ``smoothing_tau``.
    """
    commands = np.asarray(commands, dtype=float)
    if commands.ndim != 2 or commands.shape[1] != 3:
        raise ValueError("commands must have shape (T, 3)")
    bounds = np.asarray(bounds, dtype=float)
    if np.any(np.abs(commands) > bounds + 1e-12):
        raise CommandOutOfBounds(f"twist command exceeds bounds {bounds.tolist()}")
    n = len(commands)
    dt = 1.0 / f_c
    alpha = dt / smoothing_tau
    vel = np.zeros((n, 3))
    pos = np.zeros((n, 2))
    yaw = np.zeros(n)
    for k in range(n - 1):
        vel[k + 1] = vel[k] + alpha * (commands[k] - vel[k])
        yaw[k + 1] = yaw[k] + vel[k, 2] * dt
        c, s = np.cos(yaw[k]), np.sin(yaw[k])
        pos[k + 1] = pos[k] + dt * np.array([c * vel[k, 0] - s * vel[k, 1], s * vel[k, 0] + c * vel[k, 1]])
    # World-frame acceleration by first differences, rotated back to the body.
    c, s = np.cos(yaw), np.sin(yaw)
    vel_world = np.column_stack([c * vel[:, 0] - s * vel[:, 1], s * vel[:, 0] + c * vel[:, 1]])
    acc_world = np.zeros((n, 2))
    if n > 1:
        acc_world[:-1] = np.diff(vel_world, axis=0) * f_c
        acc_world[-1] = acc_world[-2]
    accel_body = np.column_stack(
        [c * acc_world[:, 0] + s * acc_world[:, 1], -s * acc_world[:, 0] + c * acc_world[:, 1], np.zeros(n)]
    )
    return BaseMotion(position=pos, yaw=yaw, velocity=vel, accel_body=accel_body)


# ---------------------------------------------------------------------------
# Trajectory synthesis


@dataclass
class Trajectory:
    """One synthesized run: states, contacts and the commanded twist."""

    states: np.ndarray  # (T, STATE_DIM)
    contacts: np.ndarray  # (T, 4) bool
    actions: np.ndarray  # (T, 3) commanded twist
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.states)


@dataclass
class DatasetConfig:
    gait: GaitParams = field(default_factory=GaitParams)
    n_trajectories: int = 20
    duration_s: float = 20.0
    twist_amplitudes: tuple = (0.3, 0.1, 0.3)
    resample_period_s: float = 2.0
    smoothing_tau: float = 0.2
    max_foot_offset: float = 0.3
    seed: int = 0


@dataclass
class Dataset:
    header: dict
    trajectories: list

    @property
    def control_frequency(self) -> float:
        return self.header["control_frequency"]


def robot_hash(description: RobotDescription) -> str:
    blob = json.dumps(
        {
            "body_mass": description.body_mass,
            "standing_height": description.standing_height,
            "hip_offsets": description.hip_offsets.tolist(),
            "link_lengths": description.link_lengths.tolist(),
            "gravity": description.gravity,
            "knee_signs": list(description.knee_signs),
        },
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _ik_batch(description, leg, targets):
    """Vectorized analytic IK for one leg over (T, 3) base-frame targets."""
    d, l1, l2 = description.link_lengths[leg]
    sigma = description.abduction_side(leg)
    u = targets - description.hip_offsets[leg]
    rho_sq = u[:, 1] ** 2 + u[:, 2] ** 2
    z_pl = -np.sqrt(np.maximum(rho_sq - d**2, 0.0))
    th1 = np.arctan2(u[:, 2], u[:, 1]) - np.arctan2(z_pl, sigma * d)
    th1 = np.arctan2(np.sin(th1), np.cos(th1))
    x_pl = u[:, 0]
    c3 = (x_pl**2 + z_pl**2 - l1**2 - l2**2) / (2.0 * l1 * l2)
    if np.any(rho_sq < d**2 - 1e-12) or np.any(np.abs(c3) > 1.0 + 1e-9):
        # Leg-level reporting is enough here; the scalar op pinpoints ticks.
        from .errors import Unreachable

        raise Unreachable(f"IK target out of workspace for leg {leg}")
    th3 = description.knee_signs[leg] * np.arccos(np.clip(c3, -1.0, 1.0))
    a = l1 + l2 * np.cos(th3)
    b = l2 * np.sin(th3)
    th2 = np.arctan2(-x_pl, -z_pl) - np.arctan2(b, a)
    th2 = np.arctan2(np.sin(th2), np.cos(th2))
    return np.column_stack([th1, th2, th3])


def _fk_batch(description, leg, q_leg):
    d, l1, l2 = description.link_lengths[leg]
    sigma = description.abduction_side(leg)
    th1, th2, th3 = q_leg[:, 0], q_leg[:, 1], q_leg[:, 2]
    x = -l1 * np.sin(th2) - l2 * np.sin(th2 + th3)
    z = -l1 * np.cos(th2) - l2 * np.cos(th2 + th3)
    c1, s1 = np.cos(th1), np.sin(th1)
    y_r = c1 * sigma * d - s1 * z
    z_r = s1 * sigma * d + c1 * z
    return description.hip_offsets[leg] + np.column_stack([x, y_r, z_r])


def _torques_batch(description, leg, q_leg, forces):
    """J^T * (-f) for one leg over time, using the analytic Jacobian."""
    d, l1, l2 = description.link_lengths[leg]
    sigma = description.abduction_side(leg)
    th1, th2, th3 = q_leg[:, 0], q_leg[:, 1], q_leg[:, 2]
    z = -l1 * np.cos(th2) - l2 * np.cos(th2 + th3)
    dx2 = -l1 * np.cos(th2) - l2 * np.cos(th2 + th3)
    dz2 = l1 * np.sin(th2) + l2 * np.sin(th2 + th3)
    dx3 = -l2 * np.cos(th2 + th3)
    dz3 = l2 * np.sin(th2 + th3)
    c1, s1 = np.cos(th1), np.sin(th1)
    zeros = np.zeros_like(th1)
    col1 = np.stack([zeros, -s1 * sigma * d - c1 * z, c1 * sigma * d - s1 * z], axis=1)
    col2 = np.stack([dx2, -s1 * dz2, c1 * dz2], axis=1)
    col3 = np.stack([dx3, -s1 * dz3, c1 * dz3], axis=1)
    jac = np.stack([col1, col2, col3], axis=2)  # (T, 3, 3) columns are joints
    return np.einsum("tij,ti->tj", jac, -forces)


def _sample_commands(rng, n_ticks, f_c, amplitudes, resample_ticks):
    """Piecewise-constant uniform twist commands, resampled every segment."""
    amplitudes = np.asarray(amplitudes, dtype=float)
    n_seg = int(np.ceil(n_ticks / resample_ticks))
    seg_cmd = rng.uniform(-amplitudes, amplitudes, size=(n_seg, 3))
    return np.repeat(seg_cmd, resample_ticks, axis=0)[:n_ticks]


def synthesize_trajectory(
    description: RobotDescription,
    params: GaitParams,
    commands: np.ndarray,
    smoothing_tau: float = 0.2,
    max_foot_offset: float = 0.3,
    meta: dict | None = None,
) -> Trajectory:
    """Synthesize one trot trajectory under per-tick twist commands."""
    f_c = params.control_frequency
    n_ticks = len(commands)
    cycle = params.cycle_ticks
    schedule = build_contact_schedule(params, int(np.ceil(n_ticks / cycle)) + 1)
    phases = schedule.phases[:n_ticks]
    contacts = schedule.contacts[:n_ticks]
    base = plan_base_motion(commands, description, f_c, smoothing_tau=smoothing_tau)
    pos, yaw = base.position, base.yaw
    cos_y, sin_y = np.cos(yaw), np.sin(yaw)

    # World-frame hip ground projections per tick.
    hips_xy = []
    feet_world = np.zeros((4, n_ticks, 3))
    for leg in range(4):
        off = description.hip_offsets[leg, :2].copy()
        off[1] += description.abduction_side(leg) * description.link_lengths[leg, 0]
        hx = pos[:, 0] + cos_y * off[0] - sin_y * off[1]
        hy = pos[:, 1] + sin_y * off[0] + cos_y * off[1]
        hips_xy.append(np.column_stack([hx, hy]))

    sw = params.swing_ticks
    for leg in range(4):
        in_swing = ~contacts[:, leg]
        hip = hips_xy[leg]
        foot = np.zeros((n_ticks, 3))
        current = np.array([hip[0, 0], hip[0, 1], 0.0])
        k = 0
        while k < n_ticks:
            if not in_swing[k]:
                foot[k] = current
                k += 1
                continue
            k0 = k
            while k < n_ticks and in_swing[k]:
                k += 1
            k1 = k  # first stance tick after the swing (may equal n_ticks)
            td = min(k1, n_ticks - 1)
            disp = pos[td] - pos[k0]
            target_xy = hip[td] + 0.5 * disp
            rel = target_xy - hip[td]
            span = float(np.hypot(*rel))
            if span > max_foot_offset:
                target_xy = hip[td] + rel * (max_foot_offset / span)
            target = np.array([target_xy[0], target_xy[1], 0.0])
            start = current.copy()
            n_run = k1 - k0
            full = max(n_run, sw)  # truncated final swings keep their pace
            for j in range(n_run):
                s = (j + 1) / (full + 1)
                frac, height = swing_foot_trajectory(s, 1.0, params.step_height)
                foot[k0 + j, :2] = start[:2] + (target[:2] - start[:2]) * frac
                foot[k0 + j, 2] = height
            current = target
        feet_world[leg] = foot

    # Base-frame foot positions and joint angles.
    q = np.zeros((n_ticks, 12))
    ee = np.zeros((n_ticks, 12))
    base_w = np.column_stack([pos, np.full(n_ticks, description.standing_height)])
    for leg in range(4):
        rel = feet_world[leg] - base_w
        ee_leg = np.column_stack(
            [
                cos_y * rel[:, 0] + sin_y * rel[:, 1],
                -sin_y * rel[:, 0] + cos_y * rel[:, 1],
                rel[:, 2],
            ]
        )
        q_leg = _ik_batch(description, leg, ee_leg)
        ee_leg = _fk_batch(description, leg, q_leg)  # store the exact FK image
        q[:, 3 * leg : 3 * leg + 3] = q_leg
        ee[:, 3 * leg : 3 * leg + 3] = ee_leg

    # Quasi-static contact forces and torques.
    lam = np.zeros((n_ticks, 12))
    for k in range(n_ticks):
        forces = stance_force_distribution(
            contacts[k], ee[k].reshape(4, 3), np.zeros(3), base.accel_body[k], description
        )
        lam[k] = forces.ravel()
    tau = np.zeros((n_ticks, 12))
    for leg in range(4):
        q_leg = q[:, 3 * leg : 3 * leg + 3]
        f_leg = lam[:, 3 * leg : 3 * leg + 3]
        tau[:, 3 * leg : 3 * leg + 3] = _torques_batch(description, leg, q_leg, f_leg)
        tau[~contacts[:, leg], 3 * leg : 3 * leg + 3] = 0.0

    twist = np.zeros((n_ticks, 6))
    twist[:, 0] = base.velocity[:, 0]
    twist[:, 1] = base.velocity[:, 1]
    twist[:, 5] = base.velocity[:, 2]

    # Pose delta relative to a control frame reset at each gait-cycle start.
    delta = np.zeros((n_ticks, 6))
    starts = (np.arange(n_ticks) // cycle) * cycle
    p0 = pos[starts]
    y0 = yaw[starts]
    rel = pos - p0
    c0, s0 = np.cos(y0), np.sin(y0)
    delta[:, 0] = c0 * rel[:, 0] + s0 * rel[:, 1]
    delta[:, 1] = -s0 * rel[:, 0] + c0 * rel[:, 1]
    delta[:, 5] = yaw - y0

    states = np.concatenate([q, ee, tau, lam, twist, delta], axis=1)
    assert states.shape[1] == STATE_DIM
    return Trajectory(
        states=states,
        contacts=contacts.copy(),
        actions=np.asarray(commands, dtype=float).copy(),
        meta=meta or {},
    )


def generate_trot_dataset(config: DatasetConfig, description: RobotDescription) -> Dataset:
    """Synthesize the training corpus; deterministic for a fixed seed."""
    f_c = config.gait.control_frequency
    n_ticks = _ticks(config.duration_s, f_c, "duration_s", 1)
    resample_ticks = _ticks(config.resample_period_s, f_c, "resample_period_s", 1)
    root = np.random.SeedSequence(config.seed)
    trajectories = []
    for i, child in enumerate(root.spawn(config.n_trajectories)):
        rng = np.random.default_rng(child)
        commands = _sample_commands(rng, n_ticks, f_c, config.twist_amplitudes, resample_ticks)
        trajectories.append(
            synthesize_trajectory(
                description,
                config.gait,
                commands,
                smoothing_tau=config.smoothing_tau,
                max_foot_offset=config.max_foot_offset,
                meta={"index": i},
            )
        )
    header = {
        "format": "latentgait-dataset",
        "version": 1,
        "robot_hash": robot_hash(description),
        "gait": asdict(config.gait),
        "state_dim": STATE_DIM,
        "control_frequency": f_c,
        "n_trajectories": config.n_trajectories,
        "duration_s": config.duration_s,
        "twist_amplitudes": list(config.twist_amplitudes),
        "resample_period_s": config.resample_period_s,
        "seed": config.seed,
    }
    return Dataset(header=header, trajectories=trajectories)


def validate_trajectory(traj: Trajectory, description: RobotDescription, step_bound=0.02):
    """Check the synthesizer invariants; raises AssertionError on violation."""
    lam = traj.states[:, STATE_GROUPS["lambda"]].reshape(-1, 4, 3)
    swing = ~traj.contacts
    assert np.all(lam[swing] == 0.0), "swing feet must carry zero force"
    ee = traj.states[:, STATE_GROUPS["ee"]]
    jumps = np.abs(np.diff(ee, axis=0)).max() if len(ee) > 1 else 0.0
    assert jumps < step_bound, f"end-effector jump {jumps} exceeds {step_bound}"
    q = traj.states[:, STATE_GROUPS["q"]]
    for leg in range(4):
        fk = _fk_batch(description, leg, q[:, 3 * leg : 3 * leg + 3])
        err = np.abs(fk - ee[:, 3 * leg : 3 * leg + 3].reshape(-1, 3)).max()
        assert err < 1e-9, f"FK(q) deviates from stored ee by {err}"
