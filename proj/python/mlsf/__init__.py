"""Learning dynamics and correlated Stackelberg equilibrium gaps in repeated
multi-leader single-follower games."""

import json
import os

from . import _core
from ._core import (
    CapError,
    CommitError,
    ConfigError,
    DomainError,
    Error,
    Game,
    GenerationError,
    ScheduleError,
    ValidationError,
    build_id,
    cse_gap,
    enumerate_swap_gap,
    exp3_update,
    expected_loss_vector,
    gap_profile,
    generate_game,
    hedge_update,
    importance_estimate,
    mix_exploration,
    schedule,
)

__all__ = [
    "CapError",
    "CommitError",
    "ConfigError",
    "DomainError",
    "Error",
    "Game",
    "GenerationError",
    "ScheduleError",
    "ValidationError",
    "build_id",
    "cse_gap",
    "enumerate_swap_gap",
    "exp3_update",
    "expected_loss_vector",
    "gap_profile",
    "generate_game",
    "hedge_update",
    "importance_estimate",
    "mix_exploration",
    "run_experiment",
    "run_protocol",
    "schedule",
]


def run_protocol(game, protocol, seed=0, checkpoints=None):
    """Run one repeated game.

    `protocol` uses the keys of the experiment file's "protocol" section,
    e.g. {"setting": "alpha-exp3-ucb", "T": 10000, "beta": 3}.
    """
    return _core._run_protocol(game, json.dumps(protocol), seed, list(checkpoints or []))


def run_experiment(config, out=None, threads=1):
    """Run an experiment given as a dict or a path to a JSON file.

    Writes seed<k>.csv and summary.json under the output directory and
    returns the parsed summary.
    """
    if isinstance(config, (str, os.PathLike)):
        with open(config, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = json.dumps(config)
    path = _core._run_experiment(text, os.fspath(out) if out is not None else "", threads)
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
