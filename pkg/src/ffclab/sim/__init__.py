from .config import EpisodeConfig, narrow_cable_config, load_scene, save_scene, \
    parse_scene_text, episode_config_from_dict
from .receptacle import ReceptacleGeom
from .cable import CableState, CableDynamics, straight_cable
from .env import Action6, SimState, reset, step, check_success, tip_corners, \
    tip_end_point, SUCCESS_REWARD
from .expert import scripted_expert
from .trajectory import write_trajectory, read_trajectory

__all__ = [
    "EpisodeConfig", "narrow_cable_config", "load_scene", "save_scene",
    "parse_scene_text", "episode_config_from_dict", "ReceptacleGeom",
    "CableState", "CableDynamics", "straight_cable", "Action6", "SimState",
    "reset", "step", "check_success", "tip_corners", "tip_end_point",
    "SUCCESS_REWARD", "scripted_expert", "write_trajectory", "read_trajectory",
]
