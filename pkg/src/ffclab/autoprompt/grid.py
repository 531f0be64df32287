"""Spatial grid discretization and per-cell vote accumulation."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, InputError

CLASSES = ("ffc", "receptacle")


@dataclass
class GridSpec:
    rows: int
    cols: int
    image_width: int
    image_height: int

    def __post_init__(self):
        if self.rows * self.cols < 4:
            raise ConfigError("grid must have at least 4 cells")
        if self.rows < 1 or self.cols < 1:
            raise ConfigError("rows and cols must be >= 1")
        if self.image_width < self.cols or self.image_height < self.rows:
            raise ConfigError("image smaller than the grid")

    @property
    def num_cells(self):
        return self.rows * self.cols

    def cell_bounds(self, index):
        """Pixel bounds (x0, y0, x1, y1), exclusive on the high side.

        The last row and column absorb any remainder so cells tile the
        image exactly.
        """
        if not 0 <= index < self.num_cells:
            raise InputError(f"cell index {index} out of range")
        r, c = divmod(index, self.cols)
        cw = self.image_width // self.cols
        ch = self.image_height // self.rows
        x0 = c * cw
        y0 = r * ch
        x1 = self.image_width if c == self.cols - 1 else x0 + cw
        y1 = self.image_height if r == self.rows - 1 else y0 + ch
        return x0, y0, x1, y1

    def cell_of_point(self, x, y):
        if not (0 <= x < self.image_width and 0 <= y < self.image_height):
            raise InputError(f"point ({x}, {y}) outside the image")
        cw = self.image_width // self.cols
        ch = self.image_height // self.rows
        c = min(int(x) // cw, self.cols - 1)
        r = min(int(y) // ch, self.rows - 1)
        return r * self.cols + c


@dataclass
class CellVoteGrid:
    grid: GridSpec
    counts: dict = field(default=None)
    paths: int = 0

    def __post_init__(self):
        if self.counts is None:
            self.counts = {c: np.zeros(self.grid.num_cells, dtype=np.int64)
                           for c in CLASSES}

    def add_answer(self, cls, cell_indices):
        """Count one inference path's cells for one class (deduplicated)."""
        for idx in set(cell_indices):
            self.counts[cls][idx] += 1

    def validate(self):
        for cls, counts in self.counts.items():
            if counts.min() < 0 or (self.paths and counts.max() > self.paths):
                raise InputError(f"{cls}: counts outside [0, paths]")
        return self
