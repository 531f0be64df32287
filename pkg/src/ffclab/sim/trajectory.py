"""Newline-delimited trajectory records for replay tooling.

Each line: step index, end-effector pose (px py pz qw qx qy qz), reward,
done flag, comma-separated.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

HEADER = "step,px,py,pz,qw,qx,qy,qz,reward,done"


def format_record(step_index, pose, reward, done) -> str:
    vals = [str(step_index)]
    vals += [repr(float(v)) for v in pose.position]
    vals += [repr(float(v)) for v in pose.orientation]
    vals.append(repr(float(reward)))
    vals.append("1" if done else "0")
    return ",".join(vals)


def write_trajectory(path, records):
    """records: iterable of (step_index, Pose6, reward, done)."""
    lines = [HEADER]
    for step_index, pose, reward, done in records:
        lines.append(format_record(step_index, pose, reward, done))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_trajectory(path):
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line or line == HEADER:
            continue
        parts = line.split(",")
        rows.append({
            "step": int(parts[0]),
            "position": np.array([float(v) for v in parts[1:4]]),
            "orientation": np.array([float(v) for v in parts[4:8]]),
            "reward": float(parts[8]),
            "done": parts[9] == "1",
        })
    return rows
