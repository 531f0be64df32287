"""SAC objectives with the augmentation-regularized critic loss and the
InfoNCE contrastive loss."""
from __future__ import annotations

import torch
import torch.nn.functional as F


def actor_loss(actor, critic, encoding, alpha, noise=None):
    """Mean of alpha * log pi(a|s) - min_i Q_i(s, a), reparameterized."""
    action, log_prob = actor.sample(encoding, noise=noise)
    q1, q2 = critic(encoding, action)
    return (alpha * log_prob - torch.min(q1, q2)).mean()


def regularized_target(reward, done, next_encoding, actor, target_critic,
                       alpha, gamma, noise=None):
    """y = r + gamma * (min_j Qhat_j(s', a') - alpha * log pi(a'|s')).

    The bootstrap term is zeroed on terminal transitions.
    """
    with torch.no_grad():
        next_action, log_prob = actor.sample(next_encoding, noise=noise)
        q1, q2 = target_critic(next_encoding, next_action)
        bootstrap = torch.min(q1, q2) - alpha * log_prob
        return reward + gamma * bootstrap * (1.0 - done)


def q_loss(critic, encoding, aug_encoding, action, target):
    """Mean over the batch, summed over both critics, of
    (Q(s,a) - y)^2 + (Q(s~,a) - y)^2."""
    q1, q2 = critic(encoding, action)
    q1a, q2a = critic(aug_encoding, action)
    loss1 = ((q1 - target).square() + (q1a - target).square()).mean()
    loss2 = ((q2 - target).square() + (q2a - target).square()).mean()
    return loss1 + loss2


def infonce_loss(head, queries, keys):
    """Cross-entropy over bilinear similarities; positives on the diagonal."""
    logits = head(queries, keys.detach())
    labels = torch.arange(queries.shape[0], device=queries.device)
    return F.cross_entropy(logits, labels)


def alpha_loss(log_alpha, log_prob, target_entropy):
    """Temperature objective pushing policy entropy toward the target."""
    return -(log_alpha * (log_prob + target_entropy).detach()).mean()
