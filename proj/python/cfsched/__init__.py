# SPDX-License-Identifier: Apache-2.0
"""User scheduling and robust beamforming for user-centric cell-free MIMO."""

import json as _json

import numpy as _np

from . import _core
from ._core import ConfigError, ContractError, SolverError, noise_power, pilot_reuse_factor, pre_log, schemes

__all__ = [
    "ConfigError",
    "ContractError",
    "SolverError",
    "config",
    "network",
    "noise_power",
    "pilot_reuse_factor",
    "pre_log",
    "run_campaign",
    "schemes",
    "solve_slot",
]


def _dump(cfg):
    return _json.dumps(cfg or {})


def config(overrides=None):
    """Defaults merged with ``overrides`` and validated, as a dict."""
    return _json.loads(_core.normalize_config(_dump(overrides)))


def network(cfg=None, realization=0):
    return _core.network(_dump(cfg), realization)


def solve_slot(cfg=None, realization=0, slot=0, weights=None):
    w = None if weights is None else _np.asarray(weights, dtype=float)
    return _core.solve_slot(_dump(cfg), realization, slot, w)


def run_campaign(cfg=None):
    return _core.run_campaign(_dump(cfg))
