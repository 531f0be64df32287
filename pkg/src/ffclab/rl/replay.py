"""Replay buffer with a protected demonstration region.

Mask observations carry labels in {0,1,2} (the end-effector occluder is
already mapped to background), so frames are packed four pixels per byte;
a 100k-capacity buffer then fits comfortably in memory.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, InputError, LifecycleError


@dataclass
class Transition:
    obs_masks: np.ndarray        # (C, H, W) uint8 labels
    obs_quat: np.ndarray         # (4,)
    action: np.ndarray           # (6,) normalized to [-1, 1]
    reward: float
    next_masks: np.ndarray
    next_quat: np.ndarray
    done: bool
    is_demo: bool = False

    def __post_init__(self):
        if self.reward not in (0.0, 10.0):
            raise InputError("reward must be 0 or 10 (sparse reward)")


def pack_labels(labels):
    """Pack label arrays with values < 4 four pixels to a byte."""
    flat = np.ascontiguousarray(labels, dtype=np.uint8).reshape(-1)
    if flat.size % 4:
        raise InputError("label count must be divisible by 4")
    quads = flat.reshape(-1, 4)
    return (quads[:, 0] | (quads[:, 1] << 2) | (quads[:, 2] << 4)
            | (quads[:, 3] << 6))


def unpack_labels(packed, shape):
    out = np.empty(packed.shape[:-1] + (packed.shape[-1], 4), dtype=np.uint8)
    out[..., 0] = packed & 3
    out[..., 1] = (packed >> 2) & 3
    out[..., 2] = (packed >> 4) & 3
    out[..., 3] = packed >> 6
    return out.reshape(packed.shape[:-1] + tuple(shape))


class ReplayBuffer:
    """Ring buffer over non-demo slots; demos are never evicted.

    All demonstration transitions must be added before the first regular
    transition, which fixes the protected region size.
    """

    def __init__(self, capacity=100_000, image_size=64, channels=2):
        if capacity < 1:
            raise ConfigError("capacity must be >= 1")
        self.capacity = capacity
        self.image_shape = (channels, image_size, image_size)
        packed = channels * image_size * image_size // 4
        self._obs = np.zeros((capacity, packed), dtype=np.uint8)
        self._next_obs = np.zeros((capacity, packed), dtype=np.uint8)
        self._quat = np.zeros((capacity, 4), dtype=np.float32)
        self._next_quat = np.zeros((capacity, 4), dtype=np.float32)
        self._action = np.zeros((capacity, 6), dtype=np.float32)
        self._reward = np.zeros(capacity, dtype=np.float32)
        self._done = np.zeros(capacity, dtype=bool)
        self._is_demo = np.zeros(capacity, dtype=bool)
        self.demo_count = 0
        self.size = 0
        self._cursor = 0
        self._sealed = False   # set once the first regular transition lands

    def _write(self, idx, tr: Transition):
        self._obs[idx] = pack_labels(tr.obs_masks)
        self._next_obs[idx] = pack_labels(tr.next_masks)
        self._quat[idx] = tr.obs_quat
        self._next_quat[idx] = tr.next_quat
        self._action[idx] = tr.action
        self._reward[idx] = tr.reward
        self._done[idx] = tr.done
        self._is_demo[idx] = tr.is_demo

    def add(self, tr: Transition):
        if tr.is_demo:
            if self._sealed:
                raise LifecycleError(
                    "demo transitions must precede regular ones")
            if self.demo_count >= self.capacity:
                raise LifecycleError("buffer full of demonstrations")
            self._write(self.demo_count, tr)
            self.demo_count += 1
            self.size = self.demo_count
            return
        self._sealed = True
        if self.demo_count >= self.capacity:
            raise LifecycleError("no room for regular transitions")
        idx = self.demo_count + self._cursor
        self._write(idx, tr)
        self._cursor = (self._cursor + 1) % (self.capacity - self.demo_count)
        self.size = max(self.size, idx + 1)

    def sample(self, batch_size, rng):
        """Uniform sample over current contents, as float arrays.

        Masks come back as float32 scaled to {0, 0.5, 1}.
        """
        if self.size == 0:
            raise LifecycleError("cannot sample from an empty buffer")
        idx = rng.integers(0, self.size, size=batch_size)
        obs = unpack_labels(self._obs[idx], self.image_shape)
        nxt = unpack_labels(self._next_obs[idx], self.image_shape)
        return {
            "obs": obs.astype(np.float32) / 2.0,
            "obs_quat": self._quat[idx].copy(),
            "action": self._action[idx].copy(),
            "reward": self._reward[idx].copy(),
            "next_obs": nxt.astype(np.float32) / 2.0,
            "next_quat": self._next_quat[idx].copy(),
            "done": self._done[idx].astype(np.float32),
            "is_demo": self._is_demo[idx].copy(),
            "indices": idx,
        }

    def sample_observations(self, batch_size, rng, demos_only=False):
        """Observation frames only (for contrastive pretraining)."""
        hi = self.demo_count if demos_only else self.size
        if hi == 0:
            raise LifecycleError("no transitions available")
        idx = rng.integers(0, hi, size=batch_size)
        obs = unpack_labels(self._obs[idx], self.image_shape)
        return obs.astype(np.float32) / 2.0, self._quat[idx].copy()
