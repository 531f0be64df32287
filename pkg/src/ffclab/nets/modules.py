"""Network architectures: mask encoder, squashed-Gaussian actor, twin
critics, and the bilinear contrastive head.

Conventions: masks arrive as (B, C, H, W) float tensors, the end-effector
quaternion as a (B, 4) tensor with nonnegative scalar part.  Actions are
normalized to [-1, 1]^6; the environment applies the physical scale.
"""
from __future__ import annotations

import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..errors import ConfigError

ENCODING_DIM = 50
ACTION_DIM = 6
LOG_STD_MIN = -10.0
LOG_STD_MAX = 2.0


class MaskEncoder(nn.Module):
    """Three stride-2 convolutions (16/32/32 channels, 3x3 kernels), then a
    linear map of the flattened features concatenated with the quaternion."""

    def __init__(self, image_size=64, in_channels=2,
                 encoding_dim=ENCODING_DIM, dtype=torch.float32):
        super().__init__()
        if image_size % 8 != 0:
            raise ConfigError("image_size must be divisible by 8")
        self.image_size = image_size
        self.encoding_dim = encoding_dim
        self.conv1 = nn.Conv2d(in_channels, 16, 3, stride=2, padding=1,
                               dtype=dtype)
        self.conv2 = nn.Conv2d(16, 32, 3, stride=2, padding=1, dtype=dtype)
        self.conv3 = nn.Conv2d(32, 32, 3, stride=2, padding=1, dtype=dtype)
        flat = 32 * (image_size // 8) ** 2
        self.head = nn.Linear(flat + 4, encoding_dim, dtype=dtype)

    def forward(self, masks, quat):
        x = F.relu(self.conv1(masks))
        x = F.relu(self.conv2(x))
        x = F.relu(self.conv3(x))
        x = x.flatten(start_dim=1)
        return self.head(torch.cat([x, quat], dim=1))


class Actor(nn.Module):
    """Squashed-Gaussian policy head over the encoding vector."""

    def __init__(self, encoding_dim=ENCODING_DIM, action_dim=ACTION_DIM,
                 hidden=256, dtype=torch.float32):
        super().__init__()
        self.action_dim = action_dim
        self.net = nn.Sequential(
            nn.Linear(encoding_dim, hidden, dtype=dtype), nn.ReLU(),
            nn.Linear(hidden, hidden, dtype=dtype), nn.ReLU(),
            nn.Linear(hidden, 2 * action_dim, dtype=dtype))

    def forward(self, encoding):
        out = self.net(encoding)
        mean, log_std = out.chunk(2, dim=-1)
        return mean, log_std.clamp(LOG_STD_MIN, LOG_STD_MAX)

    def sample(self, encoding, noise=None):
        """Reparameterized action and its log-probability.

        The log-probability carries the tanh change-of-variables term.
        `noise` allows injecting fixed standard-normal draws for tests.
        """
        mean, log_std = self(encoding)
        std = log_std.exp()
        if noise is None:
            noise = torch.randn_like(mean)
        pre_tanh = mean + std * noise
        action = torch.tanh(pre_tanh)
        gauss = -0.5 * (noise ** 2 + 2 * log_std + math.log(2 * math.pi))
        correction = torch.log(1.0 - action ** 2 + 1e-6)
        log_prob = (gauss - correction).sum(dim=-1, keepdim=True)
        return action, log_prob

    def deterministic(self, encoding):
        mean, _ = self(encoding)
        return torch.tanh(mean)


class Critic(nn.Module):
    """One Q head over (encoding, action)."""

    def __init__(self, encoding_dim=ENCODING_DIM, action_dim=ACTION_DIM,
                 hidden=256, dtype=torch.float32):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(encoding_dim + action_dim, hidden, dtype=dtype),
            nn.ReLU(),
            nn.Linear(hidden, hidden, dtype=dtype), nn.ReLU(),
            nn.Linear(hidden, 1, dtype=dtype))

    def forward(self, encoding, action):
        return self.net(torch.cat([encoding, action], dim=-1))


class TwinCritic(nn.Module):
    def __init__(self, encoding_dim=ENCODING_DIM, action_dim=ACTION_DIM,
                 hidden=256, dtype=torch.float32):
        super().__init__()
        self.q1 = Critic(encoding_dim, action_dim, hidden, dtype)
        self.q2 = Critic(encoding_dim, action_dim, hidden, dtype)

    def forward(self, encoding, action):
        return self.q1(encoding, action), self.q2(encoding, action)


class ContrastiveHead(nn.Module):
    """Bilinear similarity for InfoNCE: logits = z_q W z_k^T."""

    def __init__(self, encoding_dim=ENCODING_DIM, dtype=torch.float32):
        super().__init__()
        self.weight = nn.Parameter(torch.eye(encoding_dim, dtype=dtype))

    def forward(self, queries, keys):
        logits = queries @ self.weight @ keys.t()
        # Subtract the row max for numerical stability; softmax-invariant.
        return logits - logits.max(dim=1, keepdim=True).values.detach()


def forward_encode(encoder: MaskEncoder, masks, quat):
    """Encode one observation or a batch; returns the encoding tensor."""
    masks = torch.as_tensor(masks)
    quat = torch.as_tensor(quat)
    single = masks.dim() == 3
    if single:
        masks = masks.unsqueeze(0)
        quat = quat.unsqueeze(0)
    p = next(encoder.parameters())
    out = encoder(masks.to(p.dtype), quat.to(p.dtype))
    return out.squeeze(0) if single else out
