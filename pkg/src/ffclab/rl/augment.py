"""Random-shift data augmentation: pad 4 with edge replication, crop back
at a uniformly random offset."""
from __future__ import annotations

import numpy as np

from ..render import MaskImage, MaskObservation

PAD = 4


def shift_image(img, off_y, off_x, pad=PAD):
    """Shift one (H, W) array by cropping its edge-replicated padding."""
    h, w = img.shape
    padded = np.pad(img, pad, mode="edge")
    return padded[off_y:off_y + h, off_x:off_x + w]


def augment(obs: MaskObservation, seed, pad=PAD) -> MaskObservation:
    """Independently shifted copies of both camera masks; quat untouched."""
    rng = np.random.default_rng(seed)
    masks = []
    for mask in (obs.mask_cam1, obs.mask_cam2):
        off_y, off_x = rng.integers(0, 2 * pad + 1, size=2)
        masks.append(MaskImage(width=mask.width, height=mask.height,
                               labels=shift_image(mask.labels, off_y, off_x,
                                                  pad)))
    return MaskObservation(mask_cam1=masks[0], mask_cam2=masks[1],
                           ee_orientation=obs.ee_orientation.copy())


def random_shift_batch(frames, rng, pad=PAD):
    """Shift a (B, C, H, W) batch; independent offsets per sample/channel."""
    b, c, h, w = frames.shape
    padded = np.pad(frames, ((0, 0), (0, 0), (pad, pad), (pad, pad)),
                    mode="edge")
    offsets = rng.integers(0, 2 * pad + 1, size=(b, c, 2))
    out = np.empty_like(frames)
    for i in range(b):
        for j in range(c):
            oy, ox = offsets[i, j]
            out[i, j] = padded[i, j, oy:oy + h, ox:ox + w]
    return out
