# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from src.acoustics import AcousticWorld, intensity_at
from src.errors import DegenerateGeometryError, NoSignalError
from src.formation_control import (
    FormationGraph,
    GainSet,
    bearing,
    check_spanning,
    follower_control,
    follower_controls,
    formation_doa,
    formation_step,
    leader_control,
    leader_reference,
    orthogonal_projector,
)
from src.utils import wrap_angle

GAINS = GainSet(10.0, 10.0, 10.0, 10.0, 0.2, 1e6)
DOA_EDGES = [(1, 0), (3, 0)]


def _readings(source, positions):
    world = AcousticWorld.from_positions([source], 1e8)
    return np.array([intensity_at(world, p) for p in positions])


# --- Bearings and projectors ---

def test_projector_identities(rng):
    for _ in range(100):
        b = bearing((0.0, 0.0), rng.normal(size=2))
        P = orthogonal_projector(b)
        np.testing.assert_allclose(P @ P, P, atol=1e-12)
        np.testing.assert_allclose(P, P.T, atol=1e-12)
        np.testing.assert_allclose(P @ b, np.zeros(2), atol=1e-12)
        np.testing.assert_allclose(orthogonal_projector(-b), P, atol=1e-12)


def test_coincident_agents_have_no_bearing():
    with pytest.raises(DegenerateGeometryError):
        bearing((1.0, 2.0), (1.0, 2.0))


def test_collinear_edges_do_not_span(square_positions):
    with pytest.raises(DegenerateGeometryError):
        check_spanning(square_positions, [(0, 2), (2, 0)])
    check_spanning(square_positions, DOA_EDGES)


# --- Formation graph ---

def test_complete_graph_from_the_start_square(square_positions):
    graph = FormationGraph.complete(square_positions, [0, 2])
    assert len(graph.edges) == 6
    assert graph.followers == (1, 3)
    assert graph.neighbors(1) == (0, 2, 3)
    np.testing.assert_allclose(graph.desired_bearings[(1, 0)], (0.0, 1.0))
    assert graph.bearing_errors(square_positions) == pytest.approx(0.0, abs=1e-15)


def test_graph_needs_two_leaders(square_positions):
    with pytest.raises(ValueError):
        FormationGraph.complete(square_positions, [0])


def test_graph_rejects_non_unit_bearings():
    desired = {(0, 1): np.array([2.0, 0.0]), (1, 0): np.array([-2.0, 0.0])}
    with pytest.raises(ValueError):
        FormationGraph(2, frozenset({(0, 1)}), desired, frozenset({0, 1}))


def test_graph_rejects_non_opposite_bearings():
    desired = {(0, 1): np.array([1.0, 0.0]), (1, 0): np.array([1.0, 0.0])}
    with pytest.raises(ValueError):
        FormationGraph(2, frozenset({(0, 1)}), desired, frozenset({0, 1}))


# --- Formation estimates ---

def test_doa_on_the_x_axis(square_positions):
    assert formation_doa(_readings((100.0, 0.0), square_positions), square_positions, DOA_EDGES) == pytest.approx(0.0, abs=1e-12)


def test_doa_on_the_y_axis(square_positions):
    theta = formation_doa(_readings((0.0, 100.0), square_positions), square_positions, DOA_EDGES)
    assert theta == pytest.approx(math.pi / 2, abs=1e-12)


def test_doa_towards_the_reference_source(square_positions):
    theta = formation_doa(_readings((30.0, 40.0), square_positions), square_positions, DOA_EDGES)
    assert abs(theta - math.atan2(40.0, 30.0)) < 0.1


def test_doa_ignores_a_common_translation(square_positions, rng):
    for _ in range(50):
        source, shift = rng.uniform(-60.0, 60.0, size=2), rng.normal(scale=20.0, size=2)
        theta = formation_doa(_readings(source, square_positions), square_positions, DOA_EDGES)
        moved = square_positions + shift
        shifted = formation_doa(_readings(source + shift, moved), moved, DOA_EDGES)
        assert shifted == pytest.approx(theta, abs=1e-9)


def test_doa_turns_with_the_scene(square_positions, rng):
    for phi in rng.uniform(-math.pi, math.pi, size=50):
        source = np.array([30.0, 40.0])
        c, s = math.cos(phi), math.sin(phi)
        rotation = np.array([[c, -s], [s, c]])
        theta = formation_doa(_readings(source, square_positions), square_positions, DOA_EDGES)
        turned = square_positions @ rotation.T
        rotated = formation_doa(_readings(rotation @ source, turned), turned, DOA_EDGES)
        assert wrap_angle(rotated - theta - phi) == pytest.approx(0.0, abs=1e-9)


def test_doa_without_signal(square_positions):
    with pytest.raises(NoSignalError):
        formation_doa(np.ones(4), square_positions, DOA_EDGES)


def test_step_at_the_start_square(square_positions):
    step = formation_step(_readings((30.0, 40.0), square_positions), 1e6)
    assert step == pytest.approx(1e6 * 4 * math.pi * 280 / 1e8, abs=1e-6)
    assert step == pytest.approx(35.19, abs=5e-3)


def test_step_vanishes_for_equal_readings():
    assert formation_step(np.full(4, 3.0), 1e6) == 0.0


def test_step_stays_below_the_centroid_distance(square_positions, rng):
    for _ in range(200):
        distance, direction = rng.uniform(3.0, 100.0), rng.uniform(-math.pi, math.pi)
        source = distance * np.array([math.cos(direction), math.sin(direction)])
        step = formation_step(_readings(source, square_positions), 1e6)
        assert 0.5 * distance < step < 0.72 * distance


def test_steps_shrink_along_the_approach(square_positions):
    source = np.array([30.0, 40.0])
    centroid, steps = np.zeros(2), []
    while np.linalg.norm(source - centroid) > 3.0:
        step = formation_step(_readings(source, square_positions + centroid), 1e6)
        steps.append(step)
        centroid = centroid + step * (source - centroid) / np.linalg.norm(source - centroid)
    assert len(steps) >= 3
    assert all(later < earlier for earlier, later in zip(steps, steps[1:]))


# --- Control laws ---

@pytest.mark.parametrize("mu_theta, advance", [(0.0, (2e-4, 0.0)), (math.pi / 2, (0.0, 2e-4))])
def test_leader_reference_advance(mu_theta, advance):
    position, velocity = leader_reference(mu_theta, 0.2, 1e-3, (np.array([1.0, 1.0]), None))
    np.testing.assert_allclose(position - (1.0, 1.0), advance, atol=1e-15)
    np.testing.assert_allclose(np.linalg.norm(velocity), 0.2)


def test_leader_control_examples():
    zero = np.zeros(2)
    np.testing.assert_allclose(leader_control(zero, zero, zero, zero, GAINS), zero)
    np.testing.assert_allclose(leader_control(zero, zero, np.array([1.0, 0.0]), zero, GAINS), (10.0, 0.0))


def test_follower_control_projects_out_the_bearing():
    desired = {(0, 1): np.array([1.0, 0.0]), (1, 0): np.array([-1.0, 0.0])}
    graph = FormationGraph(3, frozenset({(0, 1)}), desired, frozenset({1, 2}))
    positions = np.array([[2.0, 1.0], [0.0, 0.0], [5.0, 5.0]])
    velocities = np.zeros((3, 2))
    np.testing.assert_allclose(follower_control(0, positions, velocities, graph, GAINS), (0.0, -10.0))


def test_follower_equilibrium_under_scaling_and_translation(square_positions):
    graph = FormationGraph.complete(square_positions, [0, 2])
    moved = 2.5 * square_positions + np.array([7.0, -3.0])
    velocities = np.tile([0.1, 0.2], (4, 1))
    np.testing.assert_allclose(follower_controls(moved, velocities, graph, GAINS), np.zeros((4, 2)), atol=1e-12)


def test_vectorized_followers_match_the_loop(square_positions, rng):
    graph = FormationGraph.complete(square_positions, [0, 2])
    positions = square_positions + rng.normal(scale=0.3, size=(4, 2))
    velocities = rng.normal(size=(4, 2))
    loop = np.array([follower_control(i, positions, velocities, graph, GAINS) for i in range(4)])
    np.testing.assert_allclose(follower_controls(positions, velocities, graph, GAINS), loop, atol=1e-12)


def test_gains_must_be_positive():
    with pytest.raises(ValueError):
        GainSet(10.0, 0.0, 10.0, 10.0, 0.2, 1e6)
