"""Episode configuration and the plain-text scene description format.

Scene files are UTF-8 ``key = value`` lines with ``#`` comments.  Vector
values are comma-separated.  The same file carries the camera setup used by
the renderer (``cam1_*``, ``cam2_*``, ``rand_*`` keys).
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, asdict
from pathlib import Path

import numpy as np

from ..errors import ConfigError

DEG = np.pi / 180.0


@dataclass
class EpisodeConfig:
    """Everything the simulator needs to build and run one episode."""

    link_count: int = 8
    cable_width: float = 0.015
    cable_thickness: float = 0.0003
    cable_length: float = 0.10
    joint_stiffness: float = 0.09      # N*m/rad
    joint_damping: float = 1e-5        # N*m*s/rad
    linear_damping: float = 80.0       # 1/s drag rate on link velocities
    timestep: float = 1e-4
    substeps_per_action: int = 200
    max_steps: int = 200
    # Tip base pose relative to the slot entrance (meters); the paper-style
    # default puts the tip 1.5 cm out along -x, aligned in y and z.
    base_offset: tuple = (-0.015, 0.0, 0.0)
    position_jitter: tuple = (0.005, 0.0025, 0.0075)  # half-ranges, m
    orientation_jitter: float = 7.0 * DEG             # half-range, rad
    placement_jitter_xy: float = 0.02                 # half-range, m

    # Receptacle geometry (meters).
    slot_width: float = 0.017
    slot_depth: float = 0.006
    slot_height: float = 0.0012
    body_extent: tuple = (0.02, 0.03, 0.02)
    slot_center_height: float = 0.010   # slot center above the table

    # Dynamics extras.
    link_mass: float = 1e-4
    gravity: float = 9.81
    constraint_iterations: int = 4

    # Action limits and success predicate.
    a_max_t: float = 0.002              # m per step, per axis
    a_max_r: float = 1.0 * DEG          # rad per step, per axis
    engage_depth: float = 0.002         # tip must be this far inside the slot
    success_corner_tol: float = 0.001   # "within 1 mm", inclusive

    def __post_init__(self):
        self.base_offset = tuple(float(v) for v in self.base_offset)
        self.position_jitter = tuple(float(v) for v in self.position_jitter)
        self.body_extent = tuple(float(v) for v in self.body_extent)

    def validate(self):
        if self.link_count < 2:
            raise ConfigError("link_count must be >= 2")
        for name in ("cable_width", "cable_thickness", "cable_length",
                     "timestep", "link_mass", "slot_width", "slot_depth",
                     "slot_height", "slot_center_height", "a_max_t", "a_max_r",
                     "engage_depth", "success_corner_tol"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.max_steps <= 0:
            raise ConfigError("max_steps must be positive")
        if self.substeps_per_action <= 0:
            raise ConfigError("substeps_per_action must be positive")
        if self.constraint_iterations < 1:
            raise ConfigError("constraint_iterations must be >= 1")
        if self.joint_stiffness < 0:
            raise ConfigError("joint_stiffness must be >= 0")
        if self.joint_damping < 0:
            raise ConfigError("joint_damping must be >= 0")
        if self.linear_damping < 0:
            raise ConfigError("linear_damping must be >= 0")
        if any(v < 0 for v in self.position_jitter):
            raise ConfigError("position_jitter half-ranges must be >= 0")
        if self.orientation_jitter < 0:
            raise ConfigError("orientation_jitter must be >= 0")
        if self.placement_jitter_xy < 0:
            raise ConfigError("placement_jitter_xy must be >= 0")
        if any(v <= 0 for v in self.body_extent):
            raise ConfigError("body_extent components must be positive")
        return self

    @property
    def link_length(self):
        return self.cable_length / self.link_count


def narrow_cable_config(**overrides) -> EpisodeConfig:
    """The narrow FFC/receptacle variant (0.5 cm cable)."""
    base = dict(cable_width=0.005, slot_width=0.007,
                body_extent=(0.02, 0.02, 0.02))
    base.update(overrides)
    return EpisodeConfig(**base)


def _format_value(v):
    if isinstance(v, (tuple, list, np.ndarray)):
        return ", ".join(repr(float(x)) for x in v)
    return repr(v)


def _parse_value(text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) > 1:
        return tuple(float(p) for p in parts)
    t = parts[0]
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        return t


def parse_scene_text(text: str) -> dict:
    """Parse scene-file text into a flat {key: value} dict."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"scene line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = _parse_value(value)
    return out


def episode_config_from_dict(entries: dict) -> EpisodeConfig:
    names = {f.name for f in fields(EpisodeConfig)}
    kwargs = {k: v for k, v in entries.items() if k in names}
    cfg = EpisodeConfig(**kwargs)
    cfg.validate()
    return cfg


def load_scene(path) -> dict:
    return parse_scene_text(Path(path).read_text(encoding="utf-8"))


def save_scene(path, episode: EpisodeConfig, extra: dict | None = None):
    """Write an EpisodeConfig (plus extra camera keys) as a scene file."""
    lines = ["# ffclab scene description"]
    for f in fields(EpisodeConfig):
        lines.append(f"{f.name} = {_format_value(getattr(episode, f.name))}")
    for k, v in (extra or {}).items():
        lines.append(f"{k} = {_format_value(v)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
