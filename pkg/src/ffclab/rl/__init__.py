"""SAC with demonstration seeding, DrQ-style regularization, and
contrastive pretraining."""
from .augment import PAD, augment, random_shift_batch, shift_image
from .losses import (actor_loss, alpha_loss, infonce_loss, q_loss,
                     regularized_target)
from .pretrain import contrastive_pretrain
from .replay import ReplayBuffer, Transition, pack_labels, unpack_labels
from .trainer import (METRICS_HEADER, Agent, TrainerConfig, action_scale,
                      collect_demos, evaluate_policy, observe, sac_update,
                      to_action, train)

__all__ = [
    "PAD", "augment", "random_shift_batch", "shift_image", "actor_loss",
    "alpha_loss", "infonce_loss", "q_loss", "regularized_target",
    "contrastive_pretrain", "ReplayBuffer", "Transition", "pack_labels",
    "unpack_labels", "METRICS_HEADER", "Agent", "TrainerConfig",
    "action_scale", "collect_demos", "evaluate_policy", "observe",
    "sac_update", "to_action", "train",
]
