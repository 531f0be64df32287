"""Run manifests: every artifact directory records the exact configuration
hash, seed, and code version that produced it, so results can be traced and
stale checkpoints rejected."""
from __future__ import annotations

import hashlib
import json
from dataclasses import fields
from pathlib import Path

from .. import __version__
from ..errors import InputError

MANIFEST_NAME = "manifest.json"


def config_fingerprint(episode_cfg) -> str:
    """Stable hash over every episode-configuration field."""
    payload = {}
    for f in fields(episode_cfg):
        value = getattr(episode_cfg, f.name)
        if isinstance(value, tuple):
            value = list(value)
        payload[f.name] = value
    text = json.dumps(payload, sort_keys=True)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def write_manifest(out_dir, command, episode_cfg, seed, image_size,
                   extra=None):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "command": command,
        "version": __version__,
        "seed": int(seed),
        "image_size": int(image_size),
        "config_hash": config_fingerprint(episode_cfg),
    }
    if extra:
        manifest.update(extra)
    path = out_dir / MANIFEST_NAME
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    return manifest


def read_manifest(run_dir):
    path = Path(run_dir) / MANIFEST_NAME
    if not path.is_file():
        return None
    return json.loads(path.read_text(encoding="utf-8"))


def checkpoint_image_size(tensors) -> int:
    """Observation resolution a checkpoint was trained at.

    Recovered from the encoder head input width: conv stack flattens to
    32*(s/8)^2 features plus the 4 orientation inputs.
    """
    weight = tensors.get("encoder.head.weight")
    if weight is None:
        raise InputError("checkpoint has no encoder head tensor")
    flat = weight.shape[1] - 4
    side = 8 * round((flat / 32) ** 0.5)
    if 32 * (side // 8) ** 2 != flat:
        raise InputError("checkpoint encoder shape is not recognised")
    return int(side)


def require_resolution(tensors, image_size):
    """Refuse checkpoints recorded at a different observation resolution."""
    found = checkpoint_image_size(tensors)
    if found != image_size:
        raise InputError(
            f"checkpoint was trained at {found}x{found} observations but "
            f"the requested scene renders {image_size}x{image_size}")
