"""Mask rendering: pinhole cameras, randomization, box rasterizer."""
from .camera import (CameraParams, CameraRandomization, default_base_cameras,
                     mounted_cameras,
                     sample_cameras)
from .raster import (LABEL_BACKGROUND, LABEL_CABLE, LABEL_EE,
                     LABEL_RECEPTACLE, MaskImage, MaskObservation,
                     agent_channels, box_corners, ground_truth_masks,
                     rasterize_boxes, read_pgm, render_labels, render_masks,
                     scene_boxes, write_pgm)

__all__ = [
    "CameraParams", "CameraRandomization", "default_base_cameras",
    "mounted_cameras",
    "sample_cameras", "LABEL_BACKGROUND", "LABEL_CABLE", "LABEL_EE",
    "LABEL_RECEPTACLE", "MaskImage", "MaskObservation", "agent_channels",
    "box_corners", "ground_truth_masks", "rasterize_boxes", "read_pgm",
    "render_labels", "render_masks", "scene_boxes", "write_pgm",
]
