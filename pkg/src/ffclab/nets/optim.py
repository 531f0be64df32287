"""Gradient evaluation and a plain bias-corrected Adam step.

Adam state is held as explicit moment dictionaries so it can travel through
the binary checkpoint format together with the parameters.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import torch


def backward(loss, params):
    """Reverse-mode gradients of a scalar loss w.r.t. named parameters.

    `params` is a dict name -> tensor; unused parameters get zero grads.
    """
    names = list(params)
    tensors = [params[n] for n in names]
    grads = torch.autograd.grad(loss, tensors, allow_unused=True,
                                retain_graph=False)
    return {n: (g if g is not None else torch.zeros_like(t))
            for n, t, g in zip(names, tensors, grads)}


@dataclass
class AdamState:
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)
    step: int = 0

    @classmethod
    def for_params(cls, params):
        return cls(m={n: torch.zeros_like(p) for n, p in params.items()},
                   v={n: torch.zeros_like(p) for n, p in params.items()})


@torch.no_grad()
def adam_step(params, grads, state: AdamState, lr,
              beta1=0.9, beta2=0.999, eps=1e-8):
    """Standard bias-corrected Adam update, in place on `params`."""
    state.step += 1
    t = state.step
    bc1 = 1.0 - beta1 ** t
    bc2 = 1.0 - beta2 ** t
    for name, p in params.items():
        g = grads[name]
        m = state.m.setdefault(name, torch.zeros_like(p))
        v = state.v.setdefault(name, torch.zeros_like(p))
        m.mul_(beta1).add_(g, alpha=1.0 - beta1)
        v.mul_(beta2).addcmul_(g, g, value=1.0 - beta2)
        p.addcdiv_(m / bc1, (v / bc2).sqrt().add_(eps), value=-lr)
    return params


def soft_update(target_params, online_params, tau):
    """Polyak averaging: target <- (1 - tau) * target + tau * online."""
    with torch.no_grad():
        for name, tp in target_params.items():
            tp.mul_(1.0 - tau).add_(online_params[name], alpha=tau)
