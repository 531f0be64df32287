"""SAC training with demonstration seeding and contrastive pretraining.

The loop is strictly sequential and fully seeded: demo collection, encoder
pretraining, then 1:1 interleaved environment steps and gradient updates
with soft target updates every `target_interval` steps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from ..errors import ConfigError, PipelineError
from ..nets import (Actor, AdamState, ContrastiveHead, MaskEncoder,
                    TwinCritic, adam_step, backward, save_checkpoint,
                    soft_update)
from ..render import (LABEL_EE, CameraRandomization, default_base_cameras,
                      mounted_cameras, render_masks, sample_cameras)
from ..sim import Action6, reset, step
from ..sim.expert import scripted_expert
from .augment import random_shift_batch
from .losses import alpha_loss, q_loss, regularized_target
from .pretrain import contrastive_pretrain
from .replay import ReplayBuffer, Transition

METRICS_HEADER = ("step,episode_return,eval_success_rate,"
                  "actor_loss,critic_loss,alpha")


@dataclass
class TrainerConfig:
    gamma: float = 0.99
    alpha_init: float = 0.1
    auto_tune_alpha: bool = True
    target_entropy: float = -6.0
    tau: float = 0.001
    target_interval: int = 2
    batch_size: int = 128
    pretrain_iters: int = 1600
    total_steps: int = 20_000
    pad: int = 4
    demo_episodes: int = 50
    lr_actor: float = 1e-4
    lr_other: float = 1e-3
    buffer_capacity: int = 100_000
    eval_interval: int = 2500
    eval_episodes: int = 20
    eval_max_steps: int = 50
    image_size: int = 64
    hidden: int = 256

    def validate(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError("gamma must lie in [0, 1]")
        if not 0.0 < self.tau <= 1.0:
            raise ConfigError("tau must lie in (0, 1]")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if self.total_steps < 0 or self.pretrain_iters < 0:
            raise ConfigError("step counts must be >= 0")
        if self.target_interval < 1:
            raise ConfigError("target_interval must be >= 1")
        if self.alpha_init <= 0:
            raise ConfigError("alpha_init must be positive")
        return self


class Agent:
    """Online and target networks plus the temperature parameter."""

    def __init__(self, image_size=64, hidden=256, alpha_init=0.1,
                 dtype=torch.float32):
        self.encoder = MaskEncoder(image_size=image_size, dtype=dtype)
        self.encoder_target = MaskEncoder(image_size=image_size, dtype=dtype)
        self.actor = Actor(hidden=hidden, dtype=dtype)
        self.critic = TwinCritic(hidden=hidden, dtype=dtype)
        self.critic_target = TwinCritic(hidden=hidden, dtype=dtype)
        self.head = ContrastiveHead(dtype=dtype)
        self.log_alpha = torch.tensor([math.log(alpha_init)], dtype=dtype,
                                      requires_grad=True)
        self.dtype = dtype
        self.sync_targets()

    @property
    def alpha(self):
        return self.log_alpha.detach().exp().item()

    def sync_targets(self):
        self.encoder_target.load_state_dict(self.encoder.state_dict())
        self.critic_target.load_state_dict(self.critic.state_dict())

    def act(self, masks, quat, deterministic=False):
        """Normalized action in [-1, 1]^6 from a single observation."""
        with torch.no_grad():
            m = torch.as_tensor(masks, dtype=self.dtype).unsqueeze(0) / 2.0
            q = torch.as_tensor(quat, dtype=self.dtype).unsqueeze(0)
            z = self.encoder(m, q)
            if deterministic:
                a = self.actor.deterministic(z)
            else:
                a, _ = self.actor.sample(z)
        return a.squeeze(0).numpy().astype(np.float64)

    def named_tensors(self):
        out = {"log_alpha": self.log_alpha}
        for prefix, module in (("encoder", self.encoder),
                               ("encoder_target", self.encoder_target),
                               ("actor", self.actor),
                               ("critic", self.critic),
                               ("critic_target", self.critic_target),
                               ("head", self.head)):
            for n, p in module.state_dict().items():
                out[f"{prefix}.{n}"] = p
        return out

    def load_tensors(self, tensors):
        with torch.no_grad():
            for name, value in self.named_tensors().items():
                if name not in tensors:
                    raise PipelineError(f"checkpoint missing tensor {name}")
                value.copy_(torch.as_tensor(tensors[name], dtype=self.dtype))


def action_scale(cfg):
    return np.array([cfg.a_max_t] * 3 + [cfg.a_max_r] * 3)


def to_action(normalized, cfg) -> Action6:
    return Action6.from_vector(np.asarray(normalized) * action_scale(cfg))


def observe(state, cams):
    """Agent-visible observation: label masks with the EE occluder hidden.

    Cameras are end-effector-mounted: `cams` hold offsets relative to the
    end-effector and are translated to world coordinates every step.
    """
    obs = render_masks(state, mounted_cameras(cams,
                                              state.ee_pose.position))
    masks = np.stack([obs.mask_cam1.labels, obs.mask_cam2.labels])
    masks[masks == LABEL_EE] = 0
    quat = obs.ee_orientation.astype(np.float32)
    return masks, quat


def collect_demos(buffer, episode_cfg, base_cams, cam_rand, count, rng):
    """Seed the buffer with scripted-expert episodes; returns success count."""
    scale = action_scale(episode_cfg)
    wins = 0
    for _ in range(count):
        ep_seed = int(rng.integers(2 ** 31))
        cams = sample_cameras(base_cams, cam_rand,
                              seed=int(rng.integers(2 ** 31)))
        state = reset(episode_cfg, seed=ep_seed)
        masks, quat = observe(state, cams)
        reward = 0.0
        while not state.done:
            action = scripted_expert(state).clamped(episode_cfg)
            normalized = np.clip(action.as_vector() / scale, -1.0, 1.0)
            state, reward, done = step(state, action)
            next_masks, next_quat = observe(state, cams)
            buffer.add(Transition(masks, quat, normalized.astype(np.float32),
                                  float(reward), next_masks, next_quat,
                                  done, is_demo=True))
            masks, quat = next_masks, next_quat
        if reward > 0:
            wins += 1
    return wins


def evaluate_policy(agent, episode_cfg, cams, episodes=20, seed_base=10 ** 6,
                    max_steps=None, deterministic=True):
    """Success rate and step statistics under a frozen policy."""
    successes = 0
    success_steps = []
    limit = max_steps or episode_cfg.max_steps
    for i in range(episodes):
        state = reset(episode_cfg, seed=seed_base + i)
        reward = 0.0
        while not state.done and state.step_count < limit:
            masks, quat = observe(state, cams)
            normalized = agent.act(masks, quat, deterministic=deterministic)
            state, reward, _ = step(state, to_action(normalized, episode_cfg))
        if reward > 0:
            successes += 1
            success_steps.append(state.step_count)
    rate = successes / episodes
    mean_steps = float(np.mean(success_steps)) if success_steps else float("nan")
    sd_steps = (float(np.std(success_steps, ddof=1))
                if len(success_steps) > 1 else float("nan"))
    return {"success_rate": rate, "episodes": episodes,
            "mean_steps": mean_steps, "sd_steps": sd_steps}


@dataclass
class _UpdateState:
    opt_actor: AdamState
    opt_critic: AdamState
    opt_alpha: AdamState
    updates: int = 0


def sac_update(agent, batch, cfg: TrainerConfig, opt: _UpdateState, rng):
    """One gradient update on all components; returns loss scalars."""
    dt = agent.dtype
    obs = batch["obs"]
    obs_aug = random_shift_batch(obs, rng, pad=cfg.pad)
    obs_t = torch.as_tensor(obs, dtype=dt)
    aug_t = torch.as_tensor(obs_aug, dtype=dt)
    quat_t = torch.as_tensor(batch["obs_quat"], dtype=dt)
    act_t = torch.as_tensor(batch["action"], dtype=dt)
    rew_t = torch.as_tensor(batch["reward"], dtype=dt).unsqueeze(1)
    done_t = torch.as_tensor(batch["done"], dtype=dt).unsqueeze(1)
    next_t = torch.as_tensor(batch["next_obs"], dtype=dt)
    nquat_t = torch.as_tensor(batch["next_quat"], dtype=dt)
    alpha = agent.log_alpha.detach().exp()

    with torch.no_grad():
        next_z = agent.encoder_target(next_t, nquat_t)
    y = regularized_target(rew_t, done_t, next_z, agent.actor,
                           agent.critic_target, alpha, cfg.gamma)

    critic_params = {f"encoder.{n}": p
                     for n, p in agent.encoder.named_parameters()}
    critic_params.update({f"critic.{n}": p
                          for n, p in agent.critic.named_parameters()})
    z = agent.encoder(obs_t, quat_t)
    z_aug = agent.encoder(aug_t, quat_t)
    c_loss = q_loss(agent.critic, z, z_aug, act_t, y)
    c_grads = backward(c_loss, critic_params)
    adam_step(critic_params, c_grads, opt.opt_critic, lr=cfg.lr_other)

    actor_params = dict(agent.actor.named_parameters())
    z_detached = z.detach()
    action, log_prob = agent.actor.sample(z_detached)
    q1, q2 = agent.critic(z_detached, action)
    a_loss = (alpha * log_prob - torch.min(q1, q2)).mean()
    a_grads = backward(a_loss, actor_params)
    adam_step(actor_params, a_grads, opt.opt_actor, lr=cfg.lr_actor)

    alpha_value = agent.alpha
    if cfg.auto_tune_alpha:
        al_loss = alpha_loss(agent.log_alpha, log_prob.detach(),
                             cfg.target_entropy)
        al_grads = backward(al_loss, {"log_alpha": agent.log_alpha})
        adam_step({"log_alpha": agent.log_alpha}, al_grads, opt.opt_alpha,
                  lr=cfg.lr_other)
        alpha_value = agent.alpha

    opt.updates += 1
    return float(a_loss.detach()), float(c_loss.detach()), alpha_value


def _optimizer_tensors(opt: _UpdateState):
    out = {}
    for name, state in (("actor", opt.opt_actor), ("critic", opt.opt_critic),
                        ("alpha", opt.opt_alpha)):
        out[f"opt.{name}.step"] = np.float32(state.step)
        for pname, m in state.m.items():
            out[f"opt.{name}.m.{pname}"] = m
        for pname, v in state.v.items():
            out[f"opt.{name}.v.{pname}"] = v
    out["opt.updates"] = np.float32(opt.updates)
    return out


def train(cfg: TrainerConfig, episode_cfg, seed, out_dir,
          cam_rand: CameraRandomization | None = None, progress=None):
    """Full training run; writes metrics.csv and checkpoint.bin to out_dir.

    Returns a summary dict with the final evaluation results.
    """
    cfg.validate()
    episode_cfg.validate()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.manual_seed(seed)
    rng = np.random.default_rng(seed)
    demo_rng = np.random.default_rng(rng.integers(2 ** 31))
    batch_rng = np.random.default_rng(rng.integers(2 ** 31))
    aug_rng = np.random.default_rng(rng.integers(2 ** 31))
    pretrain_seed = int(rng.integers(2 ** 31))

    cam_rand = cam_rand or CameraRandomization()
    base_cams = default_base_cameras(width=cfg.image_size,
                                     height=cfg.image_size)
    buffer = ReplayBuffer(cfg.buffer_capacity, image_size=cfg.image_size)
    agent = Agent(image_size=cfg.image_size, hidden=cfg.hidden,
                  alpha_init=cfg.alpha_init)

    demo_wins = collect_demos(buffer, episode_cfg, base_cams, cam_rand,
                              cfg.demo_episodes, demo_rng)
    pretrain_history = []
    if cfg.pretrain_iters > 0 and buffer.size > 0:
        pretrain_history = contrastive_pretrain(
            agent.encoder, agent.head, buffer, iters=cfg.pretrain_iters,
            batch_size=min(cfg.batch_size, buffer.size), lr=cfg.lr_other,
            seed=pretrain_seed, pad=cfg.pad)
    agent.sync_targets()

    opt = _UpdateState(
        opt_actor=AdamState.for_params(dict(agent.actor.named_parameters())),
        opt_critic=AdamState(), opt_alpha=AdamState())

    rows = []
    last_eval = float("nan")
    last_a_loss = float("nan")
    last_c_loss = float("nan")
    global_step = 0

    def run_eval():
        result = evaluate_policy(agent, episode_cfg, base_cams,
                                 episodes=cfg.eval_episodes,
                                 max_steps=cfg.eval_max_steps)
        return result["success_rate"]

    def fail(message):
        snapshot = dict(agent.named_tensors())
        snapshot.update(_optimizer_tensors(opt))
        snapshot["global_step"] = np.float32(global_step)
        save_checkpoint(out_dir / "diagnostic.bin", snapshot)
        raise PipelineError(
            message, causes=[f"diagnostic snapshot: {out_dir}/diagnostic.bin"])

    while global_step < cfg.total_steps:
        ep_seed = int(rng.integers(2 ** 31))
        cams = sample_cameras(base_cams, cam_rand,
                              seed=int(rng.integers(2 ** 31)))
        state = reset(episode_cfg, seed=ep_seed)
        masks, quat = observe(state, cams)
        ep_return = 0.0
        while not state.done and global_step < cfg.total_steps:
            normalized = agent.act(masks, quat)
            state, reward, done = step(state,
                                       to_action(normalized, episode_cfg))
            next_masks, next_quat = observe(state, cams)
            buffer.add(Transition(masks, quat,
                                  normalized.astype(np.float32),
                                  float(reward), next_masks, next_quat,
                                  done))
            masks, quat = next_masks, next_quat
            ep_return += reward
            global_step += 1
            if buffer.size >= cfg.batch_size:
                batch = buffer.sample(cfg.batch_size, batch_rng)
                a_loss, c_loss, _ = sac_update(agent, batch, cfg, opt,
                                               aug_rng)
                if not (np.isfinite(a_loss) and np.isfinite(c_loss)):
                    fail(f"non-finite loss at step {global_step}: "
                         f"actor {a_loss}, critic {c_loss}")
                last_a_loss, last_c_loss = a_loss, c_loss
            if global_step % cfg.target_interval == 0:
                soft_update(dict(agent.critic_target.named_parameters()),
                            dict(agent.critic.named_parameters()), cfg.tau)
                soft_update(dict(agent.encoder_target.named_parameters()),
                            dict(agent.encoder.named_parameters()), cfg.tau)
            if cfg.eval_interval and global_step % cfg.eval_interval == 0 \
                    and global_step < cfg.total_steps:
                last_eval = run_eval()
                if progress:
                    progress(global_step, last_eval)
        rows.append((global_step, ep_return, last_eval, last_a_loss,
                     last_c_loss, agent.alpha))

    final_eval = evaluate_policy(agent, episode_cfg, base_cams,
                                 episodes=cfg.eval_episodes,
                                 max_steps=cfg.eval_max_steps)
    rows.append((global_step, float("nan"), final_eval["success_rate"],
                 last_a_loss, last_c_loss, agent.alpha))

    lines = [METRICS_HEADER]
    for row in rows:
        lines.append(",".join("%.6g" % v if isinstance(v, float) else str(v)
                              for v in row))
    (out_dir / "metrics.csv").write_text("\n".join(lines) + "\n",
                                         encoding="utf-8")

    tensors = dict(agent.named_tensors())
    tensors.update(_optimizer_tensors(opt))
    tensors["global_step"] = np.float32(global_step)
    save_checkpoint(out_dir / "checkpoint.bin", tensors)

    return {"final_eval": final_eval, "global_step": global_step,
            "demo_successes": demo_wins,
            "pretrain_final_loss": (pretrain_history[-1]
                                    if pretrain_history else float("nan")),
            "checkpoint": str(out_dir / "checkpoint.bin"),
            "metrics": str(out_dir / "metrics.csv")}
