"""Episode lifecycle: reset, step, success predicate, trajectory records.

World frame: x along the insertion direction, z up, table at z = 0.  The
receptacle slot opens toward -x; the cable approaches from -x with its base
link welded to the end-effector.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError, LifecycleError
from ..geometry import Pose6, quat_from_euler, quat_from_rotvec, quat_multiply, \
    quat_normalize, quat_rotate
from .cable import CableDynamics, CableState, straight_cable
from .cable_kernels import action_kernel
from .config import EpisodeConfig
from .receptacle import ReceptacleGeom

SUCCESS_REWARD = 10.0

_X = np.array([1.0, 0.0, 0.0])
_Y = np.array([0.0, 1.0, 0.0])


@dataclass
class Action6:
    """Pose increment: translation in world axes, rotation about EE axes."""

    d_translation: np.ndarray
    d_rotation: np.ndarray

    def __post_init__(self):
        self.d_translation = np.asarray(self.d_translation, dtype=float)
        self.d_rotation = np.asarray(self.d_rotation, dtype=float)

    @classmethod
    def from_vector(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(v[:3], v[3:6])

    def as_vector(self):
        return np.concatenate([self.d_translation, self.d_rotation])

    def clamped(self, cfg) -> "Action6":
        return Action6(np.clip(self.d_translation, -cfg.a_max_t, cfg.a_max_t),
                       np.clip(self.d_rotation, -cfg.a_max_r, cfg.a_max_r))


@dataclass
class SimState:
    config: EpisodeConfig
    receptacle: ReceptacleGeom
    ee_pose: Pose6
    cable: CableState
    step_count: int = 0
    done: bool = False
    last_action: Action6 | None = None
    _dynamics: CableDynamics = field(default=None, repr=False)

    @property
    def dynamics(self) -> CableDynamics:
        if self._dynamics is None:
            self._dynamics = CableDynamics(self.config, self.receptacle)
        return self._dynamics


def reset(config: EpisodeConfig, seed: int) -> SimState:
    """Build a fresh, seeded episode state."""
    config.validate()
    rng = np.random.default_rng(seed)

    pj = config.placement_jitter_xy
    center_xy = rng.uniform(-pj, pj, size=2)
    receptacle = ReceptacleGeom.from_config(config, center_xy=center_xy)

    tip_target = receptacle.slot_center + np.asarray(config.base_offset)
    jitter = rng.uniform(-1.0, 1.0, size=3) * np.asarray(config.position_jitter)
    oj = config.orientation_jitter
    angles = rng.uniform(-oj, oj, size=3)  # roll, pitch, yaw

    ee_pos = tip_target - config.cable_length * _X + jitter
    ee_quat = quat_from_euler(angles[2], angles[1], angles[0])
    ee_pose = Pose6(ee_pos, ee_quat)

    cable = straight_cable(ee_pose, config)
    return SimState(config=config, receptacle=receptacle, ee_pose=ee_pose,
                    cable=cable)


def tip_corners(state: SimState):
    """World positions of the two front corners of the tip link."""
    cfg = state.config
    cable = state.cable
    tip_quat = cable.link_orientations[-1]
    tip_end = cable.link_positions[-1] + quat_rotate(
        tip_quat, 0.5 * cfg.link_length * _X)
    half = 0.5 * cfg.cable_width * quat_rotate(tip_quat, _Y)
    return tip_end - half, tip_end + half


def tip_end_point(state: SimState):
    cfg = state.config
    cable = state.cable
    return cable.link_positions[-1] + quat_rotate(
        cable.link_orientations[-1], 0.5 * cfg.link_length * _X)


def check_success(state: SimState) -> bool:
    """Both tip corners within tolerance of their seats, tip engaged."""
    cfg = state.config
    seats = state.receptacle.seat_points(cfg.cable_width, cfg.engage_depth)
    corners = tip_corners(state)
    # Match by lateral order so a flipped tip frame still pairs correctly.
    if corners[0][1] > corners[1][1]:
        corners = (corners[1], corners[0])
    engaged = tip_end_point(state)[0] >= (
        state.receptacle.entrance_x + cfg.engage_depth)
    within = all(np.linalg.norm(c - s) <= cfg.success_corner_tol
                 for c, s in zip(corners, seats))
    return bool(engaged and within)


def step(state: SimState, action: Action6):
    """Advance one action step; returns (state, reward, done)."""
    if state.done:
        raise LifecycleError("step() called on a terminal episode")
    vec = action.as_vector()
    if not np.all(np.isfinite(vec)):
        raise InputError("action contains non-finite components")

    cfg = state.config
    applied = action.clamped(cfg)
    state.last_action = applied

    start_pos = state.ee_pose.position.copy()
    start_quat = state.ee_pose.orientation.copy()
    n_sub = cfg.substeps_per_action
    dyn = state.dynamics
    cable = state.cable
    # Precompute the interpolated end-effector path for all substeps.
    fracs = np.arange(1, n_sub + 1) / n_sub
    path_pos = start_pos[None, :] + fracs[:, None] * applied.d_translation
    path_quat = np.empty((n_sub, 4))
    for s in range(n_sub):
        path_quat[s] = quat_normalize(quat_multiply(
            start_quat, quat_from_rotvec(fracs[s] * applied.d_rotation)))
    action_kernel(cable.link_positions, cable.link_velocities,
                  cable.link_orientations, cable.link_angular_velocities,
                  path_pos, path_quat, dyn._box_array, dyn._radius,
                  cfg.link_length, cfg.link_mass, cfg.gravity,
                  cfg.joint_stiffness, cfg.joint_damping, cfg.linear_damping,
                  cfg.constraint_iterations, cfg.timestep)
    state.ee_pose = Pose6(path_pos[-1], path_quat[-1])

    state.step_count += 1
    success = check_success(state)
    done = success or state.step_count >= cfg.max_steps
    state.done = done
    reward = SUCCESS_REWARD if success else 0.0
    return state, reward, done
