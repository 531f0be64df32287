"""Receptacle geometry: a solid block with a rectangular slot on its -x face.

The solid is decomposed into five axis-aligned sub-boxes (in the receptacle
frame) so that both collision resolution and rasterization can treat it as a
union of boxes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..geometry import Pose6


@dataclass
class ReceptacleGeom:
    """Slot-bearing receptacle; base_pose locates the body center."""

    slot_center: np.ndarray          # world coords of the slot entrance center
    slot_width: float
    slot_depth: float
    slot_height: float
    body_extent: np.ndarray          # full extents (x, y, z)
    base_pose: Pose6 = field(default_factory=Pose6)

    def __post_init__(self):
        self.slot_center = np.asarray(self.slot_center, dtype=float)
        self.body_extent = np.asarray(self.body_extent, dtype=float)
        if np.any(self.body_extent <= 0):
            raise ConfigError("body_extent components must be positive")
        for name in ("slot_width", "slot_depth", "slot_height"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")

    @classmethod
    def from_config(cls, cfg, center_xy=(0.0, 0.0)):
        ex, ey, ez = cfg.body_extent
        center = np.array([center_xy[0], center_xy[1], ez / 2.0])
        slot_center = np.array([center[0] - ex / 2.0, center[1],
                                cfg.slot_center_height])
        return cls(slot_center=slot_center, slot_width=cfg.slot_width,
                   slot_depth=cfg.slot_depth, slot_height=cfg.slot_height,
                   body_extent=np.array([ex, ey, ez]),
                   base_pose=Pose6(position=center))

    @property
    def entrance_x(self):
        return float(self.slot_center[0])

    def seat_points(self, cable_width, engage_depth):
        """World seat targets for the two front corners of the cable tip."""
        sx = self.entrance_x + engage_depth
        sy, sz = self.slot_center[1], self.slot_center[2]
        half = cable_width / 2.0
        return (np.array([sx, sy - half, sz]), np.array([sx, sy + half, sz]))

    def sub_boxes(self):
        """Solid decomposition as a list of (lo, hi) world AABBs.

        The receptacle is translation-only posed (no rotation support), so
        sub-boxes stay axis-aligned in world coordinates.
        """
        c = self.base_pose.position
        ex, ey, ez = self.body_extent
        lo = c - self.body_extent / 2.0
        hi = c + self.body_extent / 2.0
        sy, sz = self.slot_center[1], self.slot_center[2]
        w2, h2 = self.slot_width / 2.0, self.slot_height / 2.0
        front_x0, front_x1 = lo[0], lo[0] + self.slot_depth
        boxes = [
            (np.array([front_x1, lo[1], lo[2]]), hi.copy()),                  # back block
            (np.array([front_x0, lo[1], lo[2]]),
             np.array([front_x1, sy - w2, hi[2]])),                           # front-left
            (np.array([front_x0, sy + w2, lo[2]]),
             np.array([front_x1, hi[1], hi[2]])),                             # front-right
            (np.array([front_x0, sy - w2, lo[2]]),
             np.array([front_x1, sy + w2, sz - h2])),                         # below slot
            (np.array([front_x0, sy - w2, sz + h2]),
             np.array([front_x1, sy + w2, hi[2]])),                           # above slot
        ]
        return [(blo, bhi) for blo, bhi in boxes if np.all(bhi > blo)]


def push_out_of_box(point, lo, hi, radius=0.0):
    """Minimum translation moving a sphere (center, radius) out of an AABB.

    Returns the zero vector when there is no penetration.
    """
    lo = lo - radius
    hi = hi + radius
    if np.any(point <= lo) or np.any(point >= hi):
        return np.zeros(3)
    # Penetration depth toward each of the six faces; exit via the shallowest.
    d_lo = point - lo
    d_hi = hi - point
    axis = int(np.argmin(np.minimum(d_lo, d_hi)))
    shift = np.zeros(3)
    if d_lo[axis] < d_hi[axis]:
        shift[axis] = -d_lo[axis]
    else:
        shift[axis] = d_hi[axis]
    return shift
