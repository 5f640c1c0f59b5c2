# -*- coding: utf-8 -*-
"""Shared fixtures for the simulator test suite."""
import numpy as np
import pytest

from src.acoustics import AcousticWorld
from src.config import SINGLE_AGENT_POSITIONS, build_config


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def square_positions():
    """The four-agent start square, agents 1..4 in rows 0..3."""
    return np.array(SINGLE_AGENT_POSITIONS, dtype=float)


@pytest.fixture
def single_world():
    return AcousticWorld.from_positions([(30.0, 40.0)], 1e8)


@pytest.fixture
def short_single_config():
    """Default formation scenario cut to a few simulated seconds."""
    return build_config({'scenario': 'single', 'duration_s': 5.0})


@pytest.fixture
def near_source_config():
    """Noise-free formation a few metres from the source, so whole cycles fit in a fast test."""
    return build_config({
        'scenario': 'single',
        'duration_s': 60.0,
        'source_positions': [[2.0, 2.5]],
        'sigma_d2': 1e-8,
        'k_theta': 1e8,
        'stop_after_converged_s': 0.0,
    })


@pytest.fixture
def short_multi_config():
    return build_config({'scenario': 'multi', 'duration_s': 2.0,
                         'source_positions': [[0.0, 0.0], [10.0, -5.0], [-12.0, 8.0]]})
