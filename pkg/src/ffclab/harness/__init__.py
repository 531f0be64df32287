"""Command-line harness: training, evaluation, rendering, benchmarking."""
from .evaluation import (VIEWS, EpisodeRecord, EvalReport, agent_policy,
                         evaluate, expert_policy, run_episodes, view_cameras)
from .manifest import (checkpoint_image_size, config_fingerprint,
                       read_manifest, require_resolution, write_manifest)

__all__ = [
    "VIEWS", "EpisodeRecord", "EvalReport", "agent_policy", "evaluate",
    "expert_policy", "run_episodes", "view_cameras",
    "checkpoint_image_size", "config_fingerprint", "read_manifest",
    "require_resolution", "write_manifest",
]
