"""Evaluation protocol: per-view, per-cable-size success and takt-time
statistics from deterministic policy rollouts."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError
from ..render import default_base_cameras
from ..rl import observe, to_action
from ..sim import reset, step
from ..sim.expert import scripted_expert

VIEWS = ("near-vertical", "slanted", "both")


@dataclass
class EpisodeRecord:
    view: str
    size: str
    seed: int
    success: bool
    steps: int


@dataclass
class EvalReport:
    rows: list = field(default_factory=list)       # per (view, size) dicts
    episodes: list = field(default_factory=list)   # EpisodeRecord

    def to_csv(self):
        lines = ["view,size,episodes,success_rate,mean_steps,sd_steps,"
                 "mean_sim_seconds"]
        for r in self.rows:
            lines.append("%s,%s,%d,%.6g,%s,%s,%s" % (
                r["view"], r["size"], r["episodes"], r["success_rate"],
                _fmt(r["mean_steps"]), _fmt(r["sd_steps"]),
                _fmt(r["mean_sim_seconds"])))
        return "\n".join(lines) + "\n"

    def episodes_csv(self):
        lines = ["view,size,seed,success,steps"]
        for e in self.episodes:
            lines.append("%s,%s,%d,%d,%d" % (e.view, e.size, e.seed,
                                             int(e.success), e.steps))
        return "\n".join(lines) + "\n"


def _fmt(value):
    return "" if value is None else "%.6g" % value


def view_cameras(view, image_size=64):
    """Camera pair for a named view.

    The policy always consumes two camera channels; single-view settings
    feed that view into both channels.
    """
    near, slant = default_base_cameras(width=image_size, height=image_size)
    if view == "near-vertical":
        return near, near
    if view == "slanted":
        return slant, slant
    if view == "both":
        return near, slant
    raise InputError(f"unknown view {view!r}")


def expert_policy(state, masks, quat):
    """The scripted expert wrapped under the policy interface."""
    cfg = state.config
    action = scripted_expert(state).clamped(cfg)
    scale = np.array([cfg.a_max_t] * 3 + [cfg.a_max_r] * 3)
    return np.clip(action.as_vector() / scale, -1.0, 1.0)


def agent_policy(agent):
    def policy(state, masks, quat):
        return agent.act(masks, quat, deterministic=True)
    return policy


def run_episodes(policy, episode_cfg, cams, episodes, seed_base,
                 max_steps=None):
    records = []
    limit = max_steps or episode_cfg.max_steps
    for i in range(episodes):
        seed = seed_base + i
        state = reset(episode_cfg, seed=seed)
        reward = 0.0
        while not state.done and state.step_count < limit:
            masks, quat = observe(state, cams)
            normalized = policy(state, masks, quat)
            state, reward, _ = step(state, to_action(normalized, episode_cfg))
        records.append((seed, reward > 0, state.step_count))
    return records


def evaluate(policy, episode_configs, views=("near-vertical", "slanted"),
             episodes_per_setting=10, seed_base=500_000, image_size=64,
             max_steps=None) -> EvalReport:
    """Per-(view, size) success and steps-to-success statistics.

    `episode_configs` maps a size label (e.g. "wide", "narrow") to an
    EpisodeConfig.  Step statistics cover successful episodes only; when
    every episode fails they are reported as absent.
    """
    if episodes_per_setting < 1:
        raise InputError("episodes_per_setting must be >= 1")
    report = EvalReport()
    for view in views:
        cams = view_cameras(view, image_size=image_size)
        for size, cfg in episode_configs.items():
            records = run_episodes(policy, cfg, cams, episodes_per_setting,
                                   seed_base, max_steps=max_steps)
            wins = [steps for _, ok, steps in records if ok]
            for seed, ok, steps in records:
                report.episodes.append(EpisodeRecord(view, size, seed, ok,
                                                     steps))
            sim_dt = cfg.timestep * cfg.substeps_per_action
            report.rows.append({
                "view": view,
                "size": size,
                "episodes": episodes_per_setting,
                "success_rate": len(wins) / episodes_per_setting,
                "mean_steps": float(np.mean(wins)) if wins else None,
                "sd_steps": (float(np.std(wins, ddof=1))
                             if len(wins) > 1 else None),
                "mean_sim_seconds": (float(np.mean(wins)) * sim_dt
                                     if wins else None),
            })
    return report
