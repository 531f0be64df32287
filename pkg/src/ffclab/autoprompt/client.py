"""VLM clients: the wire protocol, a deterministic oracle mock backed by
ground-truth masks, and simple scripted mocks for tests.

A client is anything with ``answer(query) -> VlmAnswer``.
"""
from __future__ import annotations

import base64
import os
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, PipelineError
from .grid import CLASSES, GridSpec

PROMPT_TEXT = ("The image is divided into a numbered grid. "
               "Answer with the cell numbers containing the flat cable "
               "and the receptacle.")


@dataclass
class VlmQuery:
    image: np.ndarray        # (H, W) label or intensity image
    grid: GridSpec
    prompt: str
    temperature: float

    def __post_init__(self):
        if not 0.0 <= self.temperature <= 1.0:
            raise ConfigError("temperature must lie in [0, 1]")


@dataclass
class VlmAnswer:
    cells: dict              # class name -> list of cell indices
    raw: object = None


@dataclass
class ScriptedClient:
    """Returns fixed per-class cells on every path (for tests)."""
    cells: dict

    def answer(self, query: VlmQuery) -> VlmAnswer:
        return VlmAnswer(cells={c: list(self.cells.get(c, []))
                                for c in CLASSES})


class OracleClient:
    """Mock whose answers come from ground-truth masks.

    For each class it reports the cells with the largest overlap with the
    true mask; at higher temperatures it occasionally swaps in a random
    cell, imitating a sampling-temperature-driven error rate.
    """

    def __init__(self, truth_masks: dict, seed=0, max_cells=3,
                 noise_rate=0.1):
        self.truth_masks = truth_masks
        self.rng = np.random.default_rng(seed)
        self.max_cells = max_cells
        self.noise_rate = noise_rate

    def answer(self, query: VlmQuery) -> VlmAnswer:
        grid = query.grid
        cells = {}
        for cls in CLASSES:
            mask = self.truth_masks.get(cls)
            if mask is None:
                cells[cls] = []
                continue
            overlaps = np.zeros(grid.num_cells, dtype=np.int64)
            for idx in range(grid.num_cells):
                x0, y0, x1, y1 = grid.cell_bounds(idx)
                overlaps[idx] = int(mask[y0:y1, x0:x1].sum())
            hit = np.flatnonzero(overlaps)
            order = hit[np.argsort(overlaps[hit])[::-1]]
            chosen = list(order[:self.max_cells])
            if chosen and self.rng.random() < self.noise_rate * \
                    query.temperature:
                chosen[-1] = int(self.rng.integers(grid.num_cells))
            cells[cls] = [int(c) for c in chosen]
        return VlmAnswer(cells=cells)


class HttpClient:
    """Live VLM endpoint speaking the JSON wire schema.

    POST body: {"image": base64 bytes, "prompt": text, "temperature": float,
    "rows": int, "cols": int}; reply: {"cells": {"ffc": [...],
    "receptacle": [...]}}.  Endpoint and credentials come from the
    FFCLAB_VLM_URL / FFCLAB_VLM_TOKEN environment variables.
    """

    def __init__(self, url=None, token=None, timeout=30.0, retries=2):
        self.url = url or os.environ.get("FFCLAB_VLM_URL")
        self.token = token or os.environ.get("FFCLAB_VLM_TOKEN")
        self.timeout = timeout
        self.retries = retries
        if not self.url:
            raise ConfigError("no VLM endpoint configured "
                              "(set FFCLAB_VLM_URL)")

    def answer(self, query: VlmQuery) -> VlmAnswer:
        import requests
        payload = {
            "image": base64.b64encode(
                np.ascontiguousarray(query.image).tobytes()).decode("ascii"),
            "prompt": query.prompt,
            "temperature": query.temperature,
            "rows": query.grid.rows,
            "cols": query.grid.cols,
        }
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        causes = []
        for _ in range(self.retries + 1):
            try:
                resp = requests.post(self.url, json=payload, headers=headers,
                                     timeout=self.timeout)
                resp.raise_for_status()
                body = resp.json()
                return VlmAnswer(cells=body["cells"], raw=body)
            except Exception as exc:   # noqa: BLE001 - collected as causes
                causes.append(str(exc))
        raise PipelineError("VLM request failed after retries", causes=causes)
