"""Pinhole cameras and extrinsics randomization.

At zero yaw/pitch/roll a camera looks straight down (-z), with image "up"
along world +x and image "right" along world +y.  Yaw rotates about world z,
pitch tilts the view toward +x, roll spins about the optical axis.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..errors import ConfigError

DEG = np.pi / 180.0


@dataclass
class CameraParams:
    position: np.ndarray
    yaw: float = 0.0
    pitch: float = 0.0
    roll: float = 0.0
    vertical_fov: float = 35.0 * DEG
    image_width: int = 64
    image_height: int = 64

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        if not (0.0 < self.vertical_fov < np.pi):
            raise ConfigError("vertical_fov must lie in (0, pi)")
        if self.image_width < 16 or self.image_height < 16:
            raise ConfigError("image_width/image_height must be >= 16")

    def axes(self):
        """Camera right / up / forward unit vectors in world coordinates."""
        cy, sy = np.cos(self.yaw), np.sin(self.yaw)
        cp, sp = np.cos(self.pitch), np.sin(self.pitch)
        cr, sr = np.cos(self.roll), np.sin(self.roll)
        rz = np.array([[cy, -sy, 0], [sy, cy, 0], [0, 0, 1]])
        ry = np.array([[cp, 0, -sp], [0, 1, 0], [sp, 0, cp]])
        rx = np.array([[1, 0, 0], [0, cr, -sr], [0, sr, cr]])
        rot = rz @ ry @ rx
        right = rot @ np.array([0.0, 1.0, 0.0])
        up = rot @ np.array([1.0, 0.0, 0.0])
        forward = rot @ np.array([0.0, 0.0, -1.0])
        return right, up, forward

    def world_to_camera(self, points):
        """Map (K,3) world points to camera coords (x right, y up, z depth)."""
        right, up, forward = self.axes()
        rel = np.atleast_2d(points) - self.position
        return np.stack([rel @ right, rel @ up, rel @ forward], axis=1)

    def focal_pixels(self):
        return (self.image_height / 2.0) / np.tan(self.vertical_fov / 2.0)

    def project(self, points):
        """Project (K,3) camera-space points to pixel coordinates."""
        pc = np.atleast_2d(points)
        f = self.focal_pixels()
        u = self.image_width / 2.0 + f * pc[:, 0] / pc[:, 2]
        v = self.image_height / 2.0 - f * pc[:, 1] / pc[:, 2]
        return np.stack([u, v], axis=1)


@dataclass
class CameraRandomization:
    dx_half_range: float = 0.005
    dy_half_range: float = 0.005
    dz_half_range: float = 0.10
    yaw_half_range: float = 20.0 * DEG
    fov_min: float = 24.0 * DEG
    fov_max: float = 50.0 * DEG

    def __post_init__(self):
        if self.fov_min > self.fov_max:
            raise ConfigError("fov_min must be <= fov_max")
        for name in ("dx_half_range", "dy_half_range", "dz_half_range",
                     "yaw_half_range"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")


def default_base_cameras(center=(0.0, 0.0, 0.0), width=64, height=64):
    """Near-vertical and 30-degree slanted end-effector-mounted views.

    Positions are offsets from the end-effector; pass them through
    `mounted_cameras` with the current end-effector position to obtain
    world-frame cameras framing the cable tip and the receptacle.
    """
    cx, cy, cz = center
    near_vertical = CameraParams(
        position=np.array([cx + 0.10, cy, cz + 0.15]),
        pitch=3.0 * DEG, vertical_fov=35.0 * DEG,
        image_width=width, image_height=height)
    slanted = CameraParams(
        position=np.array([cx - 0.005, cy, cz + 0.20]),
        pitch=30.0 * DEG, vertical_fov=35.0 * DEG,
        image_width=width, image_height=height)
    return near_vertical, slanted


def mounted_cameras(cams, ee_position):
    """Translate end-effector-relative cameras to world coordinates."""
    offset = np.asarray(ee_position, dtype=float)
    return tuple(replace(cam, position=cam.position + offset)
                 for cam in cams)


def sample_cameras(base, rand: CameraRandomization, seed):
    """Independent uniform draws for each camera of the base pair."""
    rng = np.random.default_rng(seed)
    out = []
    for cam in base:
        dx = rng.uniform(-rand.dx_half_range, rand.dx_half_range)
        dy = rng.uniform(-rand.dy_half_range, rand.dy_half_range)
        dz = rng.uniform(-rand.dz_half_range, rand.dz_half_range)
        dyaw = rng.uniform(-rand.yaw_half_range, rand.yaw_half_range)
        fov = rng.uniform(rand.fov_min, rand.fov_max)
        out.append(replace(cam,
                           position=cam.position + np.array([dx, dy, dz]),
                           yaw=cam.yaw + dyaw,
                           vertical_fov=fov))
    return tuple(out)
