"""Scripted demonstration controller with ground-truth access.

Proportional servo: align the tip laterally and angularly with the slot,
then advance along x.  Only valid at training time, where simulator state is
observable.
"""
from __future__ import annotations

import numpy as np

from ..geometry import quat_to_matrix
from .env import Action6, SimState, tip_end_point

ALIGN_TOL_POS = 4e-4     # m; lateral error below this allows advancing
ALIGN_TOL_ANG = 0.02     # rad
GAIN_POS = 0.8
GAIN_ANG = 0.8


def scripted_expert(state: SimState) -> Action6:
    """One proportional-servo action toward the slot."""
    cfg = state.config
    slot = state.receptacle.slot_center
    tip = tip_end_point(state)

    err = slot - tip  # y/z alignment; x handled separately
    # Orientation error toward the receptacle frame (identity): use the
    # rotation matrix columns as small-angle proxies.
    rot = quat_to_matrix(state.ee_pose.orientation)
    ang_err = np.array([
        -0.5 * (rot[2, 1] - rot[1, 2]),
        -0.5 * (rot[0, 2] - rot[2, 0]),
        -0.5 * (rot[1, 0] - rot[0, 1]),
    ])

    d_rot = np.clip(GAIN_ANG * ang_err, -cfg.a_max_r, cfg.a_max_r)
    dy = np.clip(GAIN_POS * err[1], -cfg.a_max_t, cfg.a_max_t)
    dz = np.clip(GAIN_POS * err[2], -cfg.a_max_t, cfg.a_max_t)

    aligned = (abs(err[1]) < ALIGN_TOL_POS and abs(err[2]) < ALIGN_TOL_POS
               and np.max(np.abs(ang_err)) < ALIGN_TOL_ANG)
    if aligned:
        target_x = state.receptacle.entrance_x + cfg.engage_depth + 5e-4
        dx = np.clip(GAIN_POS * (target_x - tip[0]), -cfg.a_max_t, cfg.a_max_t)
    else:
        dx = 0.0
    return Action6(np.array([dx, dy, dz]), d_rot)
