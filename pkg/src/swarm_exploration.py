# -*- coding: utf-8 -*-
"""
Multi-source scenario: each agent estimates DoA and step from its own
six-channel array, steers by a decaying virtual velocity, and all agents
share a registry of explored disks around detected targets. An agent that
finds itself inside an explored disk is kicked out along one of eight
random headings with a virtual velocity longer than the disk radius.
"""
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from src.errors import NoSignalError
from src.utils import heading

logger = logging.getLogger(__name__)

ESCAPE_HEADINGS = np.pi / 4.0 * np.arange(8)


@dataclass(frozen=True)
class ExplorationParams:
    beta: float
    gamma: float
    k_v: float
    k_r_escape: float
    k_r_growth: float
    r0: float
    mu_s_thresh: float
    r_tt: float

    def __post_init__(self):
        if not 0.0 < self.k_v < 1.0:
            raise ValueError(f"k_v must lie in (0, 1), got {self.k_v!r}")
        if not self.k_r_escape >= 1.0:
            raise ValueError(f"k_r_escape must be >= 1, got {self.k_r_escape!r}")
        if not self.k_r_growth > 1.0:
            raise ValueError(f"k_r_growth must be > 1, got {self.k_r_growth!r}")
        for name in ("beta", "gamma", "r0", "mu_s_thresh", "r_tt"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class ExploredArea:
    center: tuple
    radius: float

    def contains(self, point):
        return math.hypot(point[0] - self.center[0], point[1] - self.center[1]) <= self.radius

    def margin(self, point):
        """Distance from `point` to the boundary, positive inside."""
        return self.radius - math.hypot(point[0] - self.center[0], point[1] - self.center[1])


@dataclass(frozen=True)
class ExploredAreaRegistry:
    """Append/grow-only set of explored disks shared by every agent."""
    areas: tuple = ()

    def containing_area(self, point):
        """
        Index of the area holding `point`, or None. With several candidates
        the one whose boundary is nearest wins, then the earliest created.
        """
        best, best_margin = None, math.inf
        for index, area in enumerate(self.areas):
            if area.contains(point):
                margin = area.margin(point)
                if margin < best_margin:
                    best, best_margin = index, margin
        return best

    def __len__(self):
        return len(self.areas)


def array_doa(channel_intensities, channel_positions):
    """Direction from the quietest to the loudest microphone (lowest index on ties)."""
    intensities = np.asarray(channel_intensities, dtype=float)
    loudest, quietest = int(np.argmax(intensities)), int(np.argmin(intensities))
    if intensities[loudest] == intensities[quietest]:
        raise NoSignalError("all array channels read the same intensity")
    nu = np.asarray(channel_positions[loudest], dtype=float) - np.asarray(channel_positions[quietest], dtype=float)
    return math.atan2(nu[1], nu[0])


def array_step(channel_intensities, beta):
    """s = beta (1/I_min - 1/I_max)."""
    intensities = np.asarray(channel_intensities, dtype=float)
    return beta * (1.0 / intensities.min() - 1.0 / intensities.max())


def update_virtual_velocity(v_bar, agent_position, registry, mu_s, mu_theta, params, rng):
    """
    Escape along a random multiple of pi/4 with norm k_r' * r_t when inside an
    explored area; otherwise decay and add the latest step estimate.
    """
    index = registry.containing_area(agent_position)
    if index is not None:
        radius = registry.areas[index].radius
        theta_rd = float(ESCAPE_HEADINGS[rng.integers(len(ESCAPE_HEADINGS))])
        return params.k_r_escape * radius * heading(theta_rd)
    return params.k_v * np.asarray(v_bar, dtype=float) + mu_s * heading(mu_theta)


def register_detection(registry, agent_position, params):
    """Grows the containing area by k_r, or appends a new one of radius r0."""
    index = registry.containing_area(agent_position)
    if index is not None:
        areas = list(registry.areas)
        areas[index] = replace(areas[index], radius=areas[index].radius * params.k_r_growth)
        logger.debug("detection inside area %d, radius now %.3f m", index, areas[index].radius)
        return ExploredAreaRegistry(tuple(areas))
    center = (float(agent_position[0]), float(agent_position[1]))
    logger.debug("new explored area %d at (%.3f, %.3f)", len(registry.areas), *center)
    return ExploredAreaRegistry(registry.areas + (ExploredArea(center, params.r0),))


def exploration_reference(v_bar, c, dt, current_ref):
    """
    Constant-speed reference along v_bar; a zero v_bar holds position.
    Accepts one agent, shape (2,), or a stack of agents, shape (k, 2).
    """
    position, _ = current_ref
    position = np.asarray(position, dtype=float)
    v_bar = np.asarray(v_bar, dtype=float)
    norm = np.linalg.norm(v_bar, axis=-1, keepdims=True)
    direction = np.divide(v_bar, norm, out=np.zeros_like(v_bar), where=norm > 0.0)
    velocity = c * direction
    return position + velocity * dt, velocity


def score_detections(detection_points, true_sources, r_tt):
    """Number of true sources with at least one detection point within r_tt."""
    points = np.asarray(detection_points, dtype=float).reshape(-1, 2)
    sources = np.asarray(true_sources, dtype=float).reshape(-1, 2)
    if len(points) == 0 or len(sources) == 0:
        return 0
    distances = np.linalg.norm(sources[:, None, :] - points[None, :, :], axis=2)
    return int(np.count_nonzero((distances <= r_tt).any(axis=1)))
