"""Quaternion and rigid-pose helpers.

Quaternions are stored as (w, x, y, z) float64 arrays and kept unit-norm.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

QUAT_NORM_TOL = 1e-9


def quat_identity() -> np.ndarray:
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_normalize(q: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(q)
    if n == 0.0 or not np.isfinite(n):
        raise ValueError("cannot normalize degenerate quaternion")
    return q / n


def quat_multiply(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    aw, ax, ay, az = a
    bw, bx, by, bz = b
    return np.array([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ])


def quat_conjugate(q: np.ndarray) -> np.ndarray:
    return np.array([q[0], -q[1], -q[2], -q[3]])


def quat_rotate(q: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Rotate vector v by unit quaternion q."""
    w, x, y, z = q
    u = np.array([x, y, z])
    return v + 2.0 * np.cross(u, np.cross(u, v) + w * v)


def quat_from_axis_angle(axis: np.ndarray, angle: float) -> np.ndarray:
    n = np.linalg.norm(axis)
    if n < 1e-15:
        return quat_identity()
    half = 0.5 * angle
    return np.concatenate(([np.cos(half)], np.sin(half) * axis / n))


def quat_from_rotvec(rotvec: np.ndarray) -> np.ndarray:
    """Quaternion for a rotation vector (axis * angle)."""
    angle = np.linalg.norm(rotvec)
    if angle < 1e-15:
        return quat_identity()
    return quat_from_axis_angle(rotvec / angle, angle)


def quat_to_matrix(q: np.ndarray) -> np.ndarray:
    w, x, y, z = q
    return np.array([
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ])


def quat_from_euler(yaw: float, pitch: float, roll: float) -> np.ndarray:
    """Intrinsic z-y-x (yaw, pitch, roll) composition."""
    qz = quat_from_axis_angle(np.array([0.0, 0.0, 1.0]), yaw)
    qy = quat_from_axis_angle(np.array([0.0, 1.0, 0.0]), pitch)
    qx = quat_from_axis_angle(np.array([1.0, 0.0, 0.0]), roll)
    return quat_multiply(quat_multiply(qz, qy), qx)


def quat_canonical(q: np.ndarray) -> np.ndarray:
    """Sign-canonicalize so the scalar part is non-negative."""
    if q[0] < 0.0:
        return -q
    return q


def quat_angle_between(a: np.ndarray, b: np.ndarray) -> float:
    """Geodesic angle between two unit quaternions."""
    d = abs(float(np.dot(a, b)))
    return 2.0 * np.arccos(min(1.0, d))


@dataclass
class Pose6:
    """End-effector pose: position in meters plus a unit quaternion."""

    position: np.ndarray = field(default_factory=lambda: np.zeros(3))
    orientation: np.ndarray = field(default_factory=quat_identity)

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.orientation = np.asarray(self.orientation, dtype=float)
        self.validate()

    def validate(self):
        if not np.all(np.isfinite(self.position)):
            raise ValueError("pose position must be finite")
        if abs(np.linalg.norm(self.orientation) - 1.0) > QUAT_NORM_TOL:
            raise ValueError("pose quaternion must be unit norm")

    def copy(self) -> "Pose6":
        return Pose6(self.position.copy(), self.orientation.copy())

    def rotate(self, v: np.ndarray) -> np.ndarray:
        return quat_rotate(self.orientation, v)

    def transform(self, v: np.ndarray) -> np.ndarray:
        return self.position + quat_rotate(self.orientation, v)
