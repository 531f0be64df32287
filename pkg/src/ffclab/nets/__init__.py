"""Numerical substrate: architectures, autodiff surface, Adam, checkpoints."""
from .checkpoint import MAGIC, load_checkpoint, save_checkpoint
from .modules import (ACTION_DIM, ENCODING_DIM, LOG_STD_MAX, LOG_STD_MIN,
                      Actor, ContrastiveHead, Critic, MaskEncoder, TwinCritic,
                      forward_encode)
from .optim import AdamState, adam_step, backward, soft_update

__all__ = [
    "MAGIC", "load_checkpoint", "save_checkpoint", "ACTION_DIM",
    "ENCODING_DIM", "LOG_STD_MAX", "LOG_STD_MIN", "Actor", "ContrastiveHead",
    "Critic", "MaskEncoder", "TwinCritic", "forward_encode", "AdamState",
    "adam_step", "backward", "soft_update",
]
