# -*- coding: utf-8 -*-
"""
Single-source scenario: a bearing-rigid formation that estimates the DoA
and step length from its members' intensity readings, with PD-tracking
leaders and bearing-maintaining followers.

Agent indices are 0-based here; configuration and reports use the 1-based
numbering of the formation figure (agents 1..4).
"""
import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from src.errors import DegenerateGeometryError, NoSignalError
from src.utils import heading

# A bearing is a unit 2D vector b_ij = (p_j - p_i) / |p_j - p_i|.
BearingVector = np.ndarray

_BEARING_TOL = 1e-9


@dataclass(frozen=True)
class GainSet:
    leader_kp: float
    leader_kd: float
    follower_kp: float
    follower_kd: float
    cruise_speed: float
    step_scale: float

    def __post_init__(self):
        for name, value in vars(self).items():
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be > 0, got {value!r}")


def bearing(p_i, p_j):
    """Unit vector from p_i towards p_j."""
    delta = np.asarray(p_j, dtype=float) - np.asarray(p_i, dtype=float)
    norm = math.hypot(delta[0], delta[1])
    if norm == 0.0:
        raise DegenerateGeometryError(f"coincident agents at {tuple(np.asarray(p_i, dtype=float))}")
    return delta / norm


def orthogonal_projector(b):
    """P_b = I - b b^T, the projector onto the complement of unit vector b."""
    b = np.asarray(b, dtype=float)
    return np.eye(2) - np.outer(b, b)


@dataclass(frozen=True)
class FormationGraph:
    node_count: int
    edges: frozenset
    desired_bearings: dict
    leaders: frozenset
    projectors: np.ndarray = field(init=False, repr=False, compare=False)
    adjacency: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(self.leaders) < 2:
            raise ValueError("a bearing formation needs at least two leaders")
        if not all(0 <= i < self.node_count for i in self.leaders):
            raise ValueError(f"leader index out of range: {sorted(self.leaders)}")

        projectors = np.zeros((self.node_count, self.node_count, 2, 2))
        adjacency = np.zeros((self.node_count, self.node_count), dtype=bool)
        for i, j in self.edges:
            b_ij = np.asarray(self.desired_bearings[(i, j)], dtype=float)
            b_ji = np.asarray(self.desired_bearings[(j, i)], dtype=float)
            if abs(np.linalg.norm(b_ij) - 1.0) > _BEARING_TOL:
                raise ValueError(f"desired bearing {(i + 1, j + 1)} is not unit-norm")
            if not np.allclose(b_ji, -b_ij, atol=_BEARING_TOL):
                raise ValueError(f"desired bearings {(i + 1, j + 1)} and {(j + 1, i + 1)} are not opposite")
            # P_b is identical for b and -b.
            projectors[i, j] = projectors[j, i] = orthogonal_projector(b_ij)
            adjacency[i, j] = adjacency[j, i] = True
        object.__setattr__(self, "projectors", projectors)
        object.__setattr__(self, "adjacency", adjacency)

    @classmethod
    def complete(cls, positions, leaders):
        """Complete graph whose desired bearings are those of `positions`."""
        positions = np.asarray(positions, dtype=float)
        n = len(positions)
        edges = frozenset(combinations(range(n), 2))
        desired = {}
        for i, j in edges:
            desired[(i, j)] = bearing(positions[i], positions[j])
            desired[(j, i)] = -desired[(i, j)]
        return cls(node_count=n, edges=edges, desired_bearings=desired, leaders=frozenset(leaders))

    @property
    def followers(self):
        return tuple(i for i in range(self.node_count) if i not in self.leaders)

    def neighbors(self, i):
        return tuple(np.flatnonzero(self.adjacency[i]))

    def bearing_errors(self, positions):
        """Max |b_ij(p) - b_ij^d| over all edges."""
        return max(
            float(np.linalg.norm(bearing(positions[i], positions[j]) - self.desired_bearings[(i, j)]))
            for i, j in self.edges
        )


def check_spanning(positions, edges):
    """Raises DegenerateGeometryError unless the bearings of `edges` span the plane."""
    bearings = np.array([bearing(positions[i], positions[j]) for i, j in edges])
    if len(bearings) < 2 or np.linalg.matrix_rank(bearings, tol=1e-9) < 2:
        raise DegenerateGeometryError("the DoA edge set does not span the plane")


def formation_doa(intensities, positions, edges):
    """
    Approximate ascent direction of the field: sum over ordered pairs (i, j)
    of (I_j - I_i) * b_ij, returned as an angle.
    """
    positions = np.asarray(positions, dtype=float)
    check_spanning(positions, edges)
    nu = np.zeros(2)
    for i, j in edges:
        nu += (intensities[j] - intensities[i]) * bearing(positions[i], positions[j])
    if not np.any(nu):
        raise NoSignalError("intensity differences along the DoA edges all vanish")
    return math.atan2(nu[1], nu[0])


def formation_step(intensities, alpha):
    """max(alpha |1/I_1 - 1/I_3|, alpha |1/I_2 - 1/I_4|) for the four-agent square."""
    inv = 1.0 / np.asarray(intensities, dtype=float)
    return max(alpha * abs(inv[0] - inv[2]), alpha * abs(inv[1] - inv[3]))


def leader_reference(mu_theta, c, dt, current_ref):
    """Advances a constant-speed reference heading along mu_theta by one step."""
    position, _ = current_ref
    velocity = c * heading(mu_theta)
    return np.asarray(position, dtype=float) + velocity * dt, velocity


def leader_control(p, p_dot, p_d, p_d_dot, gains):
    """PD law u = K_d (p_d_dot - p_dot) + K_p (p_d - p); broadcasts over agents."""
    return gains.leader_kd * (np.asarray(p_d_dot) - p_dot) + gains.leader_kp * (np.asarray(p_d) - p)


def follower_control(i, positions, velocities, graph, gains):
    """u_i = -sum_j P_{b_ij^d} (k_d (v_i - v_j) + k_p (p_i - p_j)) over neighbours j."""
    u = np.zeros(2)
    for j in graph.neighbors(i):
        relative = gains.follower_kd * (velocities[i] - velocities[j]) + gains.follower_kp * (positions[i] - positions[j])
        u -= graph.projectors[i, j] @ relative
    return u


def follower_controls(positions, velocities, graph, gains):
    """The follower law evaluated for every agent at once, shape (n, 2)."""
    relative = (gains.follower_kd * (velocities[:, None, :] - velocities[None, :, :])
                + gains.follower_kp * (positions[:, None, :] - positions[None, :, :]))
    # Non-edges carry a zero projector, so they drop out of the sum.
    return -np.einsum("ijab,ijb->ia", graph.projectors, relative)
