"""Contrastive encoder pretraining on demonstration frames.

InfoNCE with bilinear similarity: two independent random-shift augmentations
of the same frame form a positive pair; the rest of the batch are negatives.
"""
from __future__ import annotations

import numpy as np
import torch

from ..errors import PipelineError
from ..nets import AdamState, adam_step, backward
from .augment import random_shift_batch
from .losses import infonce_loss


def contrastive_pretrain(encoder, head, buffer, iters=1600, batch_size=128,
                         lr=1e-3, seed=0, demos_only=True, pad=4):
    """Run InfoNCE steps; returns the per-iteration loss history."""
    rng = np.random.default_rng(seed)
    params = {f"encoder.{n}": p for n, p in encoder.named_parameters()}
    params.update({f"head.{n}": p for n, p in head.named_parameters()})
    state = AdamState.for_params(params)
    dtype = next(encoder.parameters()).dtype
    history = []
    for it in range(iters):
        frames, quats = buffer.sample_observations(batch_size, rng,
                                                   demos_only=demos_only)
        aug_a = random_shift_batch(frames, rng, pad=pad)
        aug_b = random_shift_batch(frames, rng, pad=pad)
        quat_t = torch.as_tensor(quats, dtype=dtype)
        queries = encoder(torch.as_tensor(aug_a, dtype=dtype), quat_t)
        keys = encoder(torch.as_tensor(aug_b, dtype=dtype), quat_t)
        loss = infonce_loss(head, queries, keys)
        value = float(loss.detach())
        if not np.isfinite(value):
            raise PipelineError(
                f"non-finite contrastive loss at iteration {it}")
        grads = backward(loss, params)
        adam_step(params, grads, state, lr=lr)
        history.append(value)
    return history
