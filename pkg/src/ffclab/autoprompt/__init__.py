"""Grid-vote prompt proposal and point-promptable segmentation."""
from .client import (PROMPT_TEXT, HttpClient, OracleClient, ScriptedClient,
                     VlmAnswer, VlmQuery)
from .grid import CLASSES, CellVoteGrid, GridSpec
from .pipeline import (DEFAULT_GRID, DEFAULT_PATHS, DEFAULT_POINTS,
                       PromptPointSet, QueryDiagnostics, cell_probabilities,
                       mask_interior_points, miou, prompt_transfer,
                       query_paths, sample_prompts, segment)
from .segmenter import BaselineSegmenter, CoarseSegmenter

__all__ = [
    "PROMPT_TEXT", "HttpClient", "OracleClient", "ScriptedClient",
    "VlmAnswer", "VlmQuery", "CLASSES", "CellVoteGrid", "GridSpec",
    "DEFAULT_GRID", "DEFAULT_PATHS", "DEFAULT_POINTS", "PromptPointSet",
    "QueryDiagnostics", "cell_probabilities", "mask_interior_points", "miou",
    "prompt_transfer", "query_paths", "sample_prompts", "segment",
    "BaselineSegmenter", "CoarseSegmenter",
]
