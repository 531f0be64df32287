"""The prompt-proposal pipeline: multi-temperature grid voting, importance
sampling of point prompts, segmentation, prompt transfer, and mIoU."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InputError, NoDetectionError, PipelineError
from .client import PROMPT_TEXT, VlmQuery
from .grid import CLASSES, CellVoteGrid, GridSpec

DEFAULT_GRID = (8, 8)
DEFAULT_PATHS = 6
DEFAULT_POINTS = 5


@dataclass
class PromptPointSet:
    points: dict        # class name -> list of (x, y) pixel coordinates

    def validate(self, width, height):
        for cls, pts in self.points.items():
            for x, y in pts:
                if not (0 <= x < width and 0 <= y < height):
                    raise InputError(f"{cls}: point ({x}, {y}) out of bounds")
        return self


@dataclass
class QueryDiagnostics:
    paths_run: int = 0
    paths_failed: int = 0
    indices_dropped: int = 0
    failures: list = field(default_factory=list)


def query_paths(image, grid: GridSpec, paths, client, prompt=PROMPT_TEXT,
                diagnostics: QueryDiagnostics | None = None) -> CellVoteGrid:
    """Accumulate per-cell votes over evenly spaced temperatures on [0,1]."""
    if paths < 1:
        raise InputError("paths must be >= 1")
    temps = np.linspace(0.0, 1.0, paths) if paths > 1 else np.array([0.0])
    votes = CellVoteGrid(grid=grid)
    diag = diagnostics if diagnostics is not None else QueryDiagnostics()
    ok = 0
    for temp in temps:
        diag.paths_run += 1
        try:
            answer = client.answer(VlmQuery(image=image, grid=grid,
                                            prompt=prompt,
                                            temperature=float(temp)))
        except Exception as exc:   # noqa: BLE001 - per-path cause collection
            diag.paths_failed += 1
            diag.failures.append(f"temperature {temp:.3f}: {exc}")
            continue
        ok += 1
        for cls in CLASSES:
            valid = []
            for idx in answer.cells.get(cls, []):
                if isinstance(idx, (int, np.integer)) \
                        and 0 <= idx < grid.num_cells:
                    valid.append(int(idx))
                else:
                    diag.indices_dropped += 1
            votes.add_answer(cls, valid)
    if ok == 0:
        raise PipelineError("all inference paths failed",
                            causes=diag.failures)
    votes.paths = ok
    return votes


def cell_probabilities(votes: CellVoteGrid, cls):
    counts = votes.counts[cls].astype(float)
    total = counts.sum()
    if total == 0:
        raise NoDetectionError(f"no votes for class {cls!r}")
    return counts / total


def sample_prompts(votes: CellVoteGrid, k=DEFAULT_POINTS, seed=0,
                   classes=CLASSES) -> PromptPointSet:
    """K points per class: cells ~ vote counts, point uniform in the cell."""
    rng = np.random.default_rng(seed)
    grid = votes.grid
    points = {}
    for cls in classes:
        probs = cell_probabilities(votes, cls)
        cells = rng.choice(grid.num_cells, size=k, p=probs)
        pts = []
        for cell in cells:
            x0, y0, x1, y1 = grid.cell_bounds(int(cell))
            pts.append((float(rng.uniform(x0, x1)),
                        float(rng.uniform(y0, y1))))
        points[cls] = pts
    return PromptPointSet(points=points).validate(grid.image_width,
                                                  grid.image_height)


def segment(image, prompts: PromptPointSet, segmenter):
    """One binary mask per prompted class."""
    return {cls: segmenter.segment_points(image, pts)
            for cls, pts in prompts.points.items()}


def mask_interior_points(mask, k, rng):
    ys, xs = np.nonzero(mask)
    if len(xs) == 0:
        raise NoDetectionError("empty mask: no points to transfer")
    idx = rng.integers(0, len(xs), size=k)
    return [(float(xs[i]), float(ys[i])) for i in idx]


def prompt_transfer(image, prompts: PromptPointSet, big_segmenter,
                    small_segmenter, k=DEFAULT_POINTS, seed=0):
    """Segment with the big model, re-prompt the small model from its masks.

    Classes whose big mask comes back empty are skipped and reported in the
    result as None (no detection propagated).
    """
    rng = np.random.default_rng(seed)
    big_masks = segment(image, prompts, big_segmenter)
    out = {}
    for cls, mask in big_masks.items():
        if not mask.any():
            out[cls] = None
            continue
        pts = mask_interior_points(mask, k, rng)
        out[cls] = small_segmenter.segment_points(image, pts)
    return out


def miou(pred, truth):
    """Intersection over union; 1.0 when both masks are empty."""
    pred = np.asarray(pred, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if pred.shape != truth.shape:
        raise InputError("mask shapes differ")
    union = np.logical_or(pred, truth).sum()
    if union == 0:
        return 1.0
    return float(np.logical_and(pred, truth).sum() / union)
