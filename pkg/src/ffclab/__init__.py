"""ffclab: simulated flexible-flat-cable insertion lab.

Chain-cable physics, mask rendering, a small tensor/network stack, SAC
training with demonstration seeding, a prompt-proposal perception pipeline,
and a CLI harness for training and evaluation.
"""
__version__ = "0.1.0"
