"""Python access to the teleoperated-driving cell simulator."""

import json

from . import _core
from ._core import (
    ContractViolation,
    InputError,
    chamfer_distance,
    mcs_for_snr,
    prp,
    qoe,
    qos,
    quantile,
    replay_check,
    reward,
    summarize,
)

__all__ = [
    "ContractViolation",
    "InputError",
    "chamfer_distance",
    "config",
    "mcs_for_snr",
    "prp",
    "qoe",
    "qos",
    "quantile",
    "replay_check",
    "reward",
    "run_campaign",
    "run_episode",
    "summarize",
]


def config(preset="default", **overrides):
    """Resolved config dict. Overrides use dotted keys with '__' for '.',
    e.g. experiment__num_vehicles=1."""
    cfg = json.loads(_core.preset_config(preset))
    for key, value in overrides.items():
        node = cfg
        parts = key.split("__")
        for part in parts[:-1]:
            node = node[part]
        node[parts[-1]] = value
    return json.loads(_core.resolve_config(json.dumps(cfg)))


def run_episode(cfg, episode_seed):
    return _core.run_episode(json.dumps(cfg), episode_seed)


def run_campaign(cfg, out_dir):
    return _core.run_campaign(json.dumps(cfg), str(out_dir))
