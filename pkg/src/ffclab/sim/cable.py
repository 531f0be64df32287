"""Jointed-chain cable dynamics.

The cable is a chain of N rigid thin links.  Link centers carry the dynamics:
semi-implicit Euler on bending spring-damper forces, followed by a
position-based projection pass (contacts + inter-center distance
constraints) and a PBD velocity update.  Link 0 is welded to the
end-effector; its pose is interpolated across substeps when the end-effector
moves.  Link orientations are derived from the segment directions by
parallel transport of the end-effector frame.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import quat_rotate, quat_from_axis_angle
from .cable_kernels import substep_kernel
from .receptacle import push_out_of_box

_X = np.array([1.0, 0.0, 0.0])


@dataclass
class CableState:
    link_positions: np.ndarray          # (N, 3) centers
    link_orientations: np.ndarray       # (N, 4) unit quaternions
    link_velocities: np.ndarray         # (N, 3)
    link_angular_velocities: np.ndarray  # (N, 3)

    def copy(self):
        return CableState(self.link_positions.copy(),
                          self.link_orientations.copy(),
                          self.link_velocities.copy(),
                          self.link_angular_velocities.copy())


def straight_cable(ee_pose, cfg) -> CableState:
    """Cable at rest, extending from the end-effector along its +x axis."""
    n = cfg.link_count
    ll = cfg.link_length
    pos = np.zeros((n, 3))
    quat = np.zeros((n, 4))
    for i in range(n):
        pos[i] = ee_pose.transform((i + 0.5) * ll * _X)
        quat[i] = ee_pose.orientation
    return CableState(pos, quat, np.zeros((n, 3)), np.zeros((n, 3)))


def shortest_arc(u, v):
    """Quaternion rotating unit vector u onto unit vector v."""
    c = float(np.dot(u, v))
    axis = np.cross(u, v)
    s = np.linalg.norm(axis)
    if s < 1e-12:
        if c > 0:
            return np.array([1.0, 0.0, 0.0, 0.0])
        perp = np.cross(u, np.array([0.0, 0.0, 1.0]))
        if np.linalg.norm(perp) < 1e-9:
            perp = np.cross(u, np.array([0.0, 1.0, 0.0]))
        return quat_from_axis_angle(perp, np.pi)
    angle = np.arctan2(s, c)
    return quat_from_axis_angle(axis / s, angle)


def _quat_mul_batch(a, b):
    """(K,4) x (K,4) Hamilton products."""
    aw, ax, ay, az = a[:, 0], a[:, 1], a[:, 2], a[:, 3]
    bw, bx, by, bz = b[:, 0], b[:, 1], b[:, 2], b[:, 3]
    return np.stack([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ], axis=1)


def link_frames(positions, ee_quat):
    """Per-link orientations: segment direction with transported twist."""
    n = len(positions)
    d = positions[1:] - positions[:-1]
    norms = np.linalg.norm(d, axis=1, keepdims=True)
    dh = d / np.maximum(norms, 1e-12)
    u = quat_rotate(ee_quat, _X)

    axis = np.cross(np.broadcast_to(u, dh.shape), dh)
    s = np.linalg.norm(axis, axis=1)
    c = dh @ u
    angle = np.arctan2(s, c)
    safe = s > 1e-12
    axis_h = np.zeros_like(axis)
    axis_h[safe] = axis[safe] / s[safe, None]
    half = 0.5 * angle
    r = np.concatenate([np.cos(half)[:, None],
                        np.sin(half)[:, None] * axis_h], axis=1)
    quats = np.zeros((n, 4))
    quats[0] = ee_quat
    q = _quat_mul_batch(r, np.broadcast_to(ee_quat, (n - 1, 4)))
    q /= np.linalg.norm(q, axis=1, keepdims=True)
    quats[1:] = q
    return quats


def bend_angle_grads(a, b):
    """Angle between segment vectors a, b and gradients w.r.t. each (3-vec).

    Scalar reference version; the integrator uses the batched counterpart.
    Gradients vanish near theta = 0 where the bending force is zero anyway.
    """
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    ah, bh = a / na, b / nb
    s = np.linalg.norm(np.cross(ah, bh))
    c = float(np.dot(ah, bh))
    theta = np.arctan2(s, c)
    if s < 1e-10:
        z = np.zeros(3)
        return theta, z, z
    da = -(bh - c * ah) / (na * s)
    db = -(ah - c * bh) / (nb * s)
    return theta, da, db


def _bend_batch(a, b):
    """Batched bend_angle_grads over rows of (K,3) arrays."""
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    ah = a / na[:, None]
    bh = b / nb[:, None]
    s = np.linalg.norm(np.cross(ah, bh), axis=1)
    c = np.einsum("ij,ij->i", ah, bh)
    theta = np.arctan2(s, c)
    safe = np.maximum(s, 1e-10)
    da = -(bh - c[:, None] * ah) / (na * safe)[:, None]
    db = -(ah - c[:, None] * bh) / (nb * safe)[:, None]
    zero = s < 1e-10
    da[zero] = 0.0
    db[zero] = 0.0
    return theta, da, db


class CableDynamics:
    """Integrates a CableState under one configuration/receptacle pair."""

    def __init__(self, cfg, receptacle):
        self.cfg = cfg
        self.receptacle = receptacle
        self._boxes = receptacle.sub_boxes()
        self._box_array = np.array([[lo, hi] for lo, hi in self._boxes])
        self._radius = cfg.cable_thickness / 2.0

    # -- bending -----------------------------------------------------------

    def _bend_arrays(self, pos, ee_quat):
        """Joint angles and stacked gradients.

        Returns (theta[K], grads[K,3,3], idx[K,3]): per joint, gradients of
        the angle w.r.t. three link indices (index -1 marks "none").
        """
        n = len(pos)
        ll = self.cfg.link_length
        d = pos[1:] - pos[:-1]                       # (n-1, 3) segments
        root = quat_rotate(ee_quat, _X) * ll
        a = np.vstack([root[None, :], d[:-1]])       # (n-1, 3)
        b = d                                        # (n-1, 3)
        theta, da, db = _bend_batch(a, b)

        k = n - 1                                    # number of joints
        grads = np.zeros((k, 3, 3))
        idx = np.full((k, 3), -1, dtype=int)
        # Root joint: only p1 moves (p0 welded, the root direction is fixed).
        grads[0, 0] = db[0]
        idx[0, 0] = 1
        # Interior joint j (1..n-2) couples p_{j-1}, p_j, p_{j+1}.
        j = np.arange(1, k)
        grads[1:, 0] = -da[1:]
        grads[1:, 1] = da[1:] - db[1:]
        grads[1:, 2] = db[1:]
        idx[1:, 0] = j - 1
        idx[1:, 1] = j
        idx[1:, 2] = j + 1
        return theta, grads, idx

    def forces(self, pos, vel, ee_quat):
        """Bending spring-damper + gravity forces on link centers."""
        cfg = self.cfg
        f = np.zeros_like(pos)
        f[:, 2] -= cfg.link_mass * cfg.gravity
        theta, grads, idx = self._bend_arrays(pos, ee_quat)
        safe_idx = np.maximum(idx, 0)
        theta_dot = np.einsum("kij,kij->k", grads, vel[safe_idx])
        moment = cfg.joint_stiffness * theta + cfg.joint_damping * theta_dot
        contrib = -moment[:, None, None] * grads
        flat_idx = idx.ravel()
        keep = flat_idx >= 0
        np.add.at(f, flat_idx[keep], contrib.reshape(-1, 3)[keep])
        return f

    def bending_energy(self, pos, ee_quat):
        theta, _, _ = self._bend_arrays(pos, ee_quat)
        return 0.5 * self.cfg.joint_stiffness * float(np.sum(theta ** 2))

    def mechanical_energy(self, state, ee_quat):
        """Kinetic + bending + gravitational energy of the free links."""
        cfg = self.cfg
        v = state.link_velocities[1:]
        ke = 0.5 * cfg.link_mass * float(np.sum(v * v))
        pe_g = cfg.link_mass * cfg.gravity * float(
            np.sum(state.link_positions[1:, 2]))
        return ke + pe_g + self.bending_energy(state.link_positions, ee_quat)

    # -- projection --------------------------------------------------------

    def _project_distance(self, pos, order):
        ll = self.cfg.link_length
        for j in order:
            d = pos[j + 1] - pos[j]
            dist = np.sqrt(d @ d)
            if dist < 1e-12:
                continue
            corr = (dist - ll) / dist * d
            if j == 0:
                pos[1] -= corr           # link 0 is welded (infinite mass)
            else:
                pos[j] += 0.5 * corr
                pos[j + 1] -= 0.5 * corr

    def _project_contacts(self, pos):
        r = self._radius
        z = pos[1:, 2]
        np.maximum(z, r, out=z)
        for lo, hi in self._boxes:
            for i in range(1, len(pos)):
                pos[i] += push_out_of_box(pos[i], lo, hi, r)
        tip_dir = pos[-1] - pos[-2]
        norm = np.sqrt(tip_dir @ tip_dir)
        if norm > 1e-12:
            tip_end = pos[-1] + 0.5 * self.cfg.link_length * tip_dir / norm
            if tip_end[2] < r:
                pos[-1, 2] += r - tip_end[2]
            for lo, hi in self._boxes:
                pos[-1] += push_out_of_box(tip_end, lo, hi, r)

    def max_distance_error(self, pos):
        d = np.linalg.norm(np.diff(pos, axis=0), axis=1)
        return float(np.max(np.abs(d - self.cfg.link_length)))

    # -- integration -------------------------------------------------------

    def substep(self, state, ee_pose, dt):
        """One semi-implicit Euler + projection substep (in place)."""
        cfg = self.cfg
        substep_kernel(state.link_positions, state.link_velocities,
                       state.link_orientations,
                       state.link_angular_velocities,
                       ee_pose.position, ee_pose.orientation,
                       self._box_array, self._radius, cfg.link_length,
                       cfg.link_mass, cfg.gravity, cfg.joint_stiffness,
                       cfg.joint_damping, cfg.linear_damping,
                       cfg.constraint_iterations, dt)
