"""Point-promptable segmenters.

The baseline performs seeded region growing: each prompt point selects the
connected component of its (quantized) value, and per-class masks are the
union over that class's prompts.  Background prompts contribute nothing.
"""
from __future__ import annotations

import numpy as np
from scipy import ndimage


class BaselineSegmenter:
    """Region growing on a label image, or on an intensity image after
    quantization into `levels` bins.

    A prompt that lands on background snaps to the nearest non-background
    pixel within `snap_radius` (point prompts are region hints, not exact
    pixels); beyond that radius the prompt contributes nothing.  The prompt
    set is assumed to describe one object, so only the component(s) with the
    highest weighted hit count are kept; direct hits outweigh snapped ones.
    """

    def __init__(self, background=0, levels=None, snap_radius=3,
                 direct_weight=2):
        self.background = background
        self.levels = levels
        self.snap_radius = snap_radius
        self.direct_weight = direct_weight

    def _quantize(self, image):
        if self.levels is None:
            return np.asarray(image)
        img = np.asarray(image, dtype=float)
        span = img.max() - img.min()
        if span == 0:
            return np.zeros(img.shape, dtype=np.int64)
        q = ((img - img.min()) / span * (self.levels - 1)).round()
        return q.astype(np.int64)

    def segment_points(self, image, points):
        """Majority component(s) under the prompt points."""
        labels = self._quantize(image)
        comp_cache = {}
        hits = {}
        for x, y in points:
            ix = int(np.clip(round(x), 0, labels.shape[1] - 1))
            iy = int(np.clip(round(y), 0, labels.shape[0] - 1))
            direct = labels[iy, ix] != self.background
            if not direct:
                snapped = self._snap(labels, ix, iy)
                if snapped is None:
                    continue
                ix, iy = snapped
            value = int(labels[iy, ix])
            if value not in comp_cache:
                comp_cache[value], _ = ndimage.label(labels == value)
            comp = comp_cache[value]
            weight = self.direct_weight if direct else 1
            hits[(value, comp[iy, ix])] = \
                hits.get((value, comp[iy, ix]), 0) + weight
        out = np.zeros(labels.shape, dtype=bool)
        if hits:
            best = max(hits.values())
            for (value, cid), count in hits.items():
                if count == best:
                    out |= comp_cache[value] == cid
        return out

    def _snap(self, labels, ix, iy):
        r = self.snap_radius
        if r <= 0:
            return None
        h, w = labels.shape
        x0, x1 = max(ix - r, 0), min(ix + r + 1, w)
        y0, y1 = max(iy - r, 0), min(iy + r + 1, h)
        window = labels[y0:y1, x0:x1]
        ys, xs = np.nonzero(window != self.background)
        if len(xs) == 0:
            return None
        d2 = (xs + x0 - ix) ** 2 + (ys + y0 - iy) ** 2
        best = int(np.argmin(d2))
        if d2[best] > r * r:
            return None
        return int(xs[best] + x0), int(ys[best] + y0)


class CoarseSegmenter:
    """Deliberately degraded segmenter: runs the baseline on a downsampled
    image and upsamples the result (blocky masks, for transfer studies)."""

    def __init__(self, factor=4, background=0, levels=None):
        self.factor = factor
        self.base = BaselineSegmenter(background=background, levels=levels)

    def segment_points(self, image, points):
        f = self.factor
        image = np.asarray(image)
        h, w = image.shape
        small = image[::f, ::f]
        small_points = [(x / f, y / f) for x, y in points]
        mask = self.base.segment_points(small, small_points)
        return np.kron(mask, np.ones((f, f), dtype=bool))[:h, :w]
