"""Software rasterizer: oriented boxes -> label images with a z-buffer.

Labels: 0 background, 1 cable, 2 receptacle, 3 end-effector occluder.
Coverage rule: a pixel is covered when its center satisfies all three
inclusive half-space tests of the screen triangle; depth is interpolated
perspective-correctly and the nearest surface wins.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numba import njit

from ..geometry import quat_canonical, quat_to_matrix

LABEL_BACKGROUND = 0
LABEL_CABLE = 1
LABEL_RECEPTACLE = 2
LABEL_EE = 3

NEAR_PLANE = 1e-4

# End-effector proxy box, in the end-effector frame.
EE_PROXY_OFFSET = np.array([0.02, 0.0, 0.011])
EE_PROXY_HALF = np.array([0.03, 0.02, 0.01])

_BOX_CORNERS = np.array([[sx, sy, sz]
                         for sx in (-1.0, 1.0)
                         for sy in (-1.0, 1.0)
                         for sz in (-1.0, 1.0)])
# 12 triangles over the 8 corners (indexed by the order above).
_BOX_TRIS = np.array([
    [0, 1, 3], [0, 3, 2],   # -x face
    [4, 6, 7], [4, 7, 5],   # +x face
    [0, 4, 5], [0, 5, 1],   # -y face
    [2, 3, 7], [2, 7, 6],   # +y face
    [0, 2, 6], [0, 6, 4],   # -z face
    [1, 5, 7], [1, 7, 3],   # +z face
])


@dataclass
class MaskImage:
    width: int
    height: int
    labels: np.ndarray   # (height, width) uint8

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.uint8)
        assert self.labels.shape == (self.height, self.width)


@dataclass
class MaskObservation:
    mask_cam1: MaskImage
    mask_cam2: MaskImage
    ee_orientation: np.ndarray

    def __post_init__(self):
        self.ee_orientation = np.asarray(self.ee_orientation, dtype=float)


def box_corners(center, rotation, half_extents):
    """World corners of an oriented box; rotation is a 3x3 matrix."""
    return np.asarray(center) + (_BOX_CORNERS * half_extents) @ rotation.T


def scene_boxes(state):
    """All (corners, label) boxes of the current scene."""
    cfg = state.config
    out = []
    half = np.array([cfg.link_length / 2.0, cfg.cable_width / 2.0,
                     cfg.cable_thickness / 2.0])
    for pos, quat in zip(state.cable.link_positions,
                         state.cable.link_orientations):
        out.append((box_corners(pos, quat_to_matrix(quat), half), LABEL_CABLE))
    for lo, hi in state.receptacle.sub_boxes():
        center = (lo + hi) / 2.0
        out.append((box_corners(center, np.eye(3), (hi - lo) / 2.0),
                    LABEL_RECEPTACLE))
    rot = quat_to_matrix(state.ee_pose.orientation)
    ee_center = state.ee_pose.position + rot @ EE_PROXY_OFFSET
    out.append((box_corners(ee_center, rot, EE_PROXY_HALF), LABEL_EE))
    return out


def _clip_near(tri_cam):
    """Clip one camera-space triangle against z >= NEAR_PLANE."""
    inside = tri_cam[:, 2] >= NEAR_PLANE
    n_in = int(inside.sum())
    if n_in == 3:
        return [tri_cam]
    if n_in == 0:
        return []
    # Sutherland-Hodgman against the near plane.
    poly = []
    for i in range(3):
        a, b = tri_cam[i], tri_cam[(i + 1) % 3]
        ain, bin_ = a[2] >= NEAR_PLANE, b[2] >= NEAR_PLANE
        if ain:
            poly.append(a)
        if ain != bin_:
            t = (NEAR_PLANE - a[2]) / (b[2] - a[2])
            poly.append(a + t * (b - a))
    tris = []
    for i in range(1, len(poly) - 1):
        tris.append(np.stack([poly[0], poly[i], poly[i + 1]]))
    return tris


@njit(cache=True)
def _fill_triangles(labels, zbuf, pix, depth, tri_labels):
    """Fill screen triangles (inclusive half-space rule) into buffers."""
    h, w = labels.shape
    for t in range(pix.shape[0]):
        x0, y0 = pix[t, 0, 0], pix[t, 0, 1]
        x1, y1 = pix[t, 1, 0], pix[t, 1, 1]
        x2, y2 = pix[t, 2, 0], pix[t, 2, 1]
        z0, z1, z2 = depth[t, 0], depth[t, 1], depth[t, 2]
        area = (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0)
        if area == 0.0:
            continue
        if area < 0.0:
            x1, y1, x2, y2 = x2, y2, x1, y1
            z1, z2 = z2, z1
            area = -area
        lo_x = int(np.floor(min(x0, min(x1, x2)) - 0.5))
        hi_x = int(np.ceil(max(x0, max(x1, x2)) - 0.5)) + 1
        lo_y = int(np.floor(min(y0, min(y1, y2)) - 0.5))
        hi_y = int(np.ceil(max(y0, max(y1, y2)) - 0.5)) + 1
        lo_x = max(lo_x, 0)
        hi_x = min(hi_x, w)
        lo_y = max(lo_y, 0)
        hi_y = min(hi_y, h)
        for iy in range(lo_y, hi_y):
            py = iy + 0.5
            for ix in range(lo_x, hi_x):
                px = ix + 0.5
                e0 = (x2 - x1) * (py - y1) - (y2 - y1) * (px - x1)
                if e0 < 0.0:
                    continue
                e1 = (x0 - x2) * (py - y2) - (y0 - y2) * (px - x2)
                if e1 < 0.0:
                    continue
                e2 = (x1 - x0) * (py - y0) - (y1 - y0) * (px - x0)
                if e2 < 0.0:
                    continue
                inv_z = (e0 / area) / z0 + (e1 / area) / z1 \
                    + (e2 / area) / z2
                if inv_z <= 0.0:
                    continue
                z = 1.0 / inv_z
                if z < zbuf[iy, ix]:
                    zbuf[iy, ix] = z
                    labels[iy, ix] = tri_labels[t]


def rasterize_boxes(boxes, cam) -> MaskImage:
    """Rasterize (corners, label) boxes into one label image."""
    h, w = cam.image_height, cam.image_width
    labels = np.zeros((h, w), dtype=np.uint8)
    zbuf = np.full((h, w), np.inf)
    tri_pix = []
    tri_z = []
    tri_labels = []
    for corners, label in boxes:
        cam_pts = cam.world_to_camera(corners)
        if cam_pts[:, 2].min() >= NEAR_PLANE:
            pix = cam.project(cam_pts)
            tri_pix.append(pix[_BOX_TRIS])
            tri_z.append(cam_pts[_BOX_TRIS, 2])
            tri_labels.append(np.full(len(_BOX_TRIS), label, dtype=np.uint8))
            continue
        for tri_idx in _BOX_TRIS:
            for tri in _clip_near(cam_pts[tri_idx]):
                tri_pix.append(cam.project(tri)[None])
                tri_z.append(tri[None, :, 2])
                tri_labels.append(np.array([label], dtype=np.uint8))
    if tri_pix:
        _fill_triangles(labels, zbuf,
                        np.ascontiguousarray(np.concatenate(tri_pix)),
                        np.ascontiguousarray(np.concatenate(tri_z)),
                        np.concatenate(tri_labels))
    return MaskImage(width=w, height=h, labels=labels)


def render_labels(state, cam) -> MaskImage:
    """Rasterize the scene into one label image for one camera."""
    return rasterize_boxes(scene_boxes(state), cam)


def render_masks(state, cams) -> MaskObservation:
    """Two-camera mask observation plus the end-effector orientation."""
    m1 = render_labels(state, cams[0])
    m2 = render_labels(state, cams[1])
    quat = quat_canonical(state.ee_pose.orientation.copy())
    return MaskObservation(mask_cam1=m1, mask_cam2=m2, ee_orientation=quat)


def ground_truth_masks(state, cams):
    """Per-camera, per-class binary masks (classes 1, 2, 3)."""
    out = []
    for cam in cams:
        labels = render_labels(state, cam).labels
        out.append({c: labels == c
                    for c in (LABEL_CABLE, LABEL_RECEPTACLE, LABEL_EE)})
    return tuple(out)


def agent_channels(obs: MaskObservation) -> np.ndarray:
    """Stack both masks as float channels; the EE occluder reads as
    background, matching what a real segmentation pipeline would feed."""
    chans = []
    for mask in (obs.mask_cam1, obs.mask_cam2):
        lab = mask.labels.astype(np.float32)
        lab[lab == LABEL_EE] = 0.0
        chans.append(lab / 2.0)
    return np.stack(chans, axis=0)


def write_pgm(mask: MaskImage, path):
    """8-bit binary PGM, labels scaled x60 for visibility."""
    data = (mask.labels.astype(np.uint16) * 60).clip(0, 255).astype(np.uint8)
    header = f"P5\n{mask.width} {mask.height}\n255\n".encode("ascii")
    Path(path).write_bytes(header + data.tobytes())


def read_pgm(path):
    raw = Path(path).read_bytes()
    parts = raw.split(b"\n", 3)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM file")
    w, h = (int(v) for v in parts[1].split())
    data = np.frombuffer(parts[3], dtype=np.uint8, count=w * h)
    return data.reshape(h, w)
