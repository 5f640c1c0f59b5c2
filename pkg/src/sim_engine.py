# -*- coding: utf-8 -*-
"""
This is the core simulation engine. It integrates the agents' double
integrator dynamics at a fixed sample time, drives each unit's hybrid
supervisor, injects measurement noise from seeded per-purpose streams, and
collects the trajectories, events and metrics of a run.

Random streams: every (purpose, unit) pair owns its own generator derived
from the run seed, so draws for one agent never shift another agent's
sequence and adding diagnostics never perturbs a trajectory.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import Enum
from itertools import product

import numpy as np
import pandas as pd

from src.acoustics import AcousticWorld, MicrophoneArray, array_intensities_many, channel_positions_many, omni_intensity
from src.analysis_engine import convergence_time
from src.config import build_config, validate_config
from src.errors import NoSignalError, SimulationError
from src.estimation import MeasurementNoise, NoiseModel, StepMeanRule
from src.formation_control import (
    FormationGraph,
    GainSet,
    follower_controls,
    formation_doa,
    formation_step,
    leader_control,
    leader_reference,
)
from src.hybrid_supervisor import (
    OperatingMode,
    SwitchThresholds,
    begin_settling,
    listening_step,
    new_supervisor,
    should_start_listening,
    should_start_moving,
    transition,
)
from src.swarm_exploration import (
    ExplorationParams,
    ExploredAreaRegistry,
    array_doa,
    array_step,
    exploration_reference,
    register_detection,
    score_detections,
    update_virtual_velocity,
)

logger = logging.getLogger(__name__)

# Stream purposes for the per-run seed tree.
_STEP_NOISE, _DOA_NOISE, _ESCAPE, _SPAWN = range(4)

FORMATION_UNIT_ID = 0

TABLE1_SIGMA_D2 = (0.01, 0.1, 1.0, 10.0, 100.0)
TABLE1_K_THETA = (100.0, 10.0, 1.0)
TABLE2_TARGETS = (3, 4, 5, 6, 7, 8)


class AgentRole(str, Enum):
    LEADER = "leader"
    FOLLOWER = "follower"


@dataclass
class SimClock:
    """Integer step counter; time is always step_index * dt."""
    dt: float
    step_index: int = 0

    @property
    def time(self):
        return self.step_index * self.dt

    def tick(self, steps=1):
        self.step_index += steps


@dataclass
class AgentState:
    position: np.ndarray
    velocity: np.ndarray
    supervisor: object = None
    virtual_velocity: np.ndarray = None
    role: AgentRole = None


@dataclass(frozen=True)
class SimEvent:
    time_s: float
    agent_id: int
    kind: str
    x_m: float
    y_m: float
    payload: dict = field(default_factory=dict)


@dataclass
class RunMetrics:
    scenario: str
    seed: int
    simulated_time_s: float
    sources: np.ndarray
    events: list
    convergence_time_s: float = None
    listening_time_s: float = None
    settle_time_s: float = None
    phase_count: int = None
    first_move_time_s: float = None
    final_distance_m: float = None
    stopped_early: bool = False
    detection_count: int = None
    detection_log: list = field(default_factory=list)
    explored_areas: list = field(default_factory=list)
    centroid_distance: pd.DataFrame = None
    trajectory: pd.DataFrame = None
    final_agents: list = field(default_factory=list)

    @property
    def converged(self):
        return self.convergence_time_s is not None

    @property
    def mode_switch_log(self):
        return [e for e in self.events if e.kind in ("listen_start", "move_start", "settle_start")]

    def summary(self):
        """JSON-ready digest of the scalar metrics."""
        digest = {
            "scenario": self.scenario,
            "seed": self.seed,
            "simulated_time_s": self.simulated_time_s,
            "sources": [list(map(float, p)) for p in self.sources],
            "first_move_time_s": self.first_move_time_s,
            "mode_switches": len(self.mode_switch_log),
        }
        if self.scenario == "single":
            digest.update({
                "converged": self.converged,
                "convergence_time_s": self.convergence_time_s,
                "listening_time_s": self.listening_time_s,
                "settle_time_s": self.settle_time_s,
                "convergence_time_listening_only_s": (
                    None if self.convergence_time_s is None else self.convergence_time_s - self.settle_time_s),
                "phase_count": self.phase_count,
                "final_distance_m": self.final_distance_m,
                "stopped_early": self.stopped_early,
            })
        else:
            digest.update({
                "detection_count": self.detection_count,
                "detections": len(self.detection_log),
                "explored_areas": [{"center": list(a.center), "radius": a.radius} for a in self.explored_areas],
            })
        return digest


def integrate_step(positions, velocities, accelerations, dt):
    """Semi-implicit Euler: v' = v + u dt, p' = p + v' dt."""
    if not np.all(np.isfinite(accelerations)):
        bad = np.argwhere(~np.isfinite(np.asarray(accelerations).reshape(-1, 2)).all(axis=1)).ravel()
        raise SimulationError(f"non-finite acceleration command for agent(s) {[int(i) + 1 for i in bad]}")
    velocities = velocities + accelerations * dt
    positions = positions + velocities * dt
    return positions, velocities


def hold_propagator(kp, kd, dt):
    """
    One-step map of the per-axis (position error, velocity) pair under PD
    position hold, matching integrate_step exactly.
    """
    return np.array([
        [1.0 - dt * dt * kp, dt * (1.0 - dt * kd)],
        [-dt * kp, 1.0 - dt * kd],
    ])


def cell_seed(base_seed, cell_index, run_index):
    """Deterministic seed for one run of one sweep cell."""
    sequence = np.random.SeedSequence(entropy=[int(base_seed), int(cell_index), int(run_index)])
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def _stream(seed, purpose, unit):
    return np.random.default_rng(np.random.SeedSequence(entropy=int(seed), spawn_key=(purpose, unit)))


def build_world(config, seed):
    """Explicit sources from the config, or a uniform random spawn in the search square."""
    if config.source_positions is not None:
        positions = np.array(config.source_positions, dtype=float)
    else:
        rng = _stream(seed, _SPAWN, 0)
        half = config.spawn_half_width_m
        positions = rng.uniform(-half, half, size=(config.target_count, 2))
    return AcousticWorld.from_positions(positions, config.source_power_w)


def _estimate_fields(supervisor):
    step, doa = supervisor.step_estimate, supervisor.doa_estimate
    return (
        math.nan if step.prior_is_infinite else step.mean,
        math.nan if doa.concentration == 0 else doa.mean,
        step.effective_variance,
        doa.concentration,
    )


def _mode_label(supervisor):
    if supervisor.mode is OperatingMode.MOVING and supervisor.holding:
        return "settling"
    return supervisor.mode.value


class _Recorder:
    """Collects decimated trajectory rows, centroid samples and events."""

    TRAJECTORY_COLUMNS = ["time_s", "agent_id", "x_m", "y_m", "mode", "mu_s_m", "mu_theta_rad", "P", "K"]

    def __init__(self, dt, decimation, emit_trajectories):
        self.dt = dt
        self.decimation = decimation
        self.emit_trajectories = emit_trajectories
        self.rows = []
        self.centroid_rows = []
        self.events = []

    def due(self, step):
        return step % self.decimation == 0

    def agents(self, step, positions, labels, estimates):
        if not self.emit_trajectories:
            return
        t = step * self.dt
        for i, (x, y) in enumerate(positions):
            self.rows.append((t, i + 1, float(x), float(y), labels[i], *estimates[i]))

    def centroid(self, step, distance, label):
        self.centroid_rows.append((step * self.dt, distance, label))

    def event(self, step, agent_id, kind, position, **payload):
        self.events.append(SimEvent(step * self.dt, agent_id, kind, float(position[0]), float(position[1]), payload))

    def trajectory_frame(self):
        if not self.emit_trajectories:
            return None
        return pd.DataFrame(self.rows, columns=self.TRAJECTORY_COLUMNS)

    def centroid_frame(self):
        return pd.DataFrame(self.centroid_rows, columns=["time_s", "distance_m", "mode"])


# =====================================================================================
# Single source: one supervisor drives the whole formation
# =====================================================================================

class _FormationRun:

    def __init__(self, config, seed):
        self.config = config
        self.seed = seed
        self.dt = config.dt_s
        self.horizon = config.horizon_steps
        self.world = build_world(config, seed)
        self.target = self.world.source_positions[0]

        self.positions = np.array(config.agent_positions, dtype=float)
        self.velocities = np.zeros_like(self.positions)
        self.graph = FormationGraph.complete(self.positions, [i - 1 for i in config.leaders])
        self.leaders = np.array(sorted(self.graph.leaders))
        self.followers = np.array(self.graph.followers, dtype=int)
        self.doa_edges = [(i - 1, j - 1) for i, j in config.doa_edges]
        self.gains = GainSet(config.leader_kp, config.leader_kd, config.follower_kp,
                             config.follower_kd, config.cruise_speed, config.alpha)
        self.thresholds = SwitchThresholds(config.p_thresh, config.k_thresh, config.settle_speed)
        noise_model = NoiseModel(config.sigma_d2, config.k_theta, config.doa_noise_law)
        self.noise = MeasurementNoise(noise_model, _stream(seed, _STEP_NOISE, 0), _stream(seed, _DOA_NOISE, 0))
        self.supervisor = new_supervisor(self.centroid(), noise_model, StepMeanRule(config.step_mean_rule))

        self.hold_points = self.positions.copy()
        self.ref_pos = self.positions.copy()
        self.ref_vel = np.zeros_like(self.positions)
        self.propagator = hold_propagator(config.leader_kp, config.leader_kd, self.dt)

        self.clock = SimClock(self.dt)
        self.recorder = _Recorder(self.dt, config.trajectory_decimation, config.emit_trajectories)
        self.listening_intervals = []
        self.settle_intervals = []
        self.last_far_step = -1
        self.last_true_doa = 0.0
        self.stop_steps = int(round(config.stop_after_converged_s / self.dt))
        self.stopped_early = False

    def centroid(self, positions=None):
        return (self.positions if positions is None else positions).mean(axis=0)

    def distance(self, positions=None):
        offset = self.centroid(positions) - self.target
        return math.hypot(offset[0], offset[1])

    def _track_distance(self, step, positions=None):
        distance = self.distance(positions)
        if distance > self.config.convergence_radius_m:
            self.last_far_step = step
        return distance

    def _sample(self, step, positions, label):
        distance = self.distance(positions)
        self.recorder.centroid(step, distance, label)
        estimates = [_estimate_fields(self.supervisor)] * len(positions)
        self.recorder.agents(step, positions, [label] * len(positions), estimates)

    def _converged_long_enough(self):
        if not self.stop_steps or self.last_far_step >= self.clock.step_index:
            return False
        settled_for = self.clock.step_index - (self.last_far_step + 1)
        listened_after = any(end > self.last_far_step + 1 for _, end in self.listening_intervals)
        return settled_for >= self.stop_steps and listened_after

    def measurement_truths(self):
        """Noise-free DoA and step of the formation at its current pose."""
        radius = self.config.array_radius_m
        intensities = np.array([omni_intensity(self.world, MicrophoneArray(tuple(p), radius)) for p in self.positions])
        try:
            self.last_true_doa = formation_doa(intensities, self.positions, self.doa_edges)
        except NoSignalError:
            logger.warning("no DoA signal at t=%.3f s; reusing %.4f rad", self.clock.time, self.last_true_doa)
        return formation_step(intensities, self.config.alpha), self.last_true_doa

    def listen(self):
        """
        Runs one listening phase. The formation is settled, so the PD hold
        dynamics are linear and are advanced in closed form while the
        estimators consume one measurement pair per step.
        """
        start = self.clock.step_index
        true_step, true_doa = self.measurement_truths()
        snapshots = []
        switched = False
        steps = 0
        while start + steps < self.horizon:
            s, theta = self.noise.draw(true_step, true_doa)
            self.supervisor = listening_step(self.supervisor, s, theta)
            steps += 1
            if self.recorder.due(start + steps):
                snapshots.append((steps, _estimate_fields(self.supervisor)))
            if should_start_moving(self.supervisor, self.thresholds):
                switched = True
                break

        errors = np.vstack([(self.positions - self.hold_points).ravel(), self.velocities.ravel()])
        done = 0
        for offset, estimates in snapshots:
            errors = np.linalg.matrix_power(self.propagator, offset - done) @ errors
            done = offset
            positions = self.hold_points + errors[0].reshape(-1, 2)
            self._track_distance(start + offset, positions)
            self.recorder.centroid(start + offset, self.distance(positions), OperatingMode.LISTENING.value)
            self.recorder.agents(start + offset, positions, [OperatingMode.LISTENING.value] * len(positions),
                                 [estimates] * len(positions))
        errors = np.linalg.matrix_power(self.propagator, steps - done) @ errors
        self.positions = self.hold_points + errors[0].reshape(-1, 2)
        self.velocities = errors[1].reshape(-1, 2)
        self.clock.tick(steps)
        self._track_distance(self.clock.step_index)
        self.listening_intervals.append((start, self.clock.step_index))

        if switched:
            self.supervisor = transition(self.supervisor)
            self.ref_pos = self.positions.copy()
            self.ref_vel = np.zeros_like(self.positions)
            self.recorder.event(self.clock.step_index, FORMATION_UNIT_ID, "move_start", self.centroid(),
                                step_target_m=self.supervisor.step_target,
                                doa_rad=self.supervisor.latched_doa,
                                listening_steps=steps)

    def move(self):
        """Tracks the leader reference, then holds, until the formation is still again."""
        gains, leaders, followers = self.gains, self.leaders, self.followers
        zero = np.zeros_like(self.positions)
        settle_start = None
        while self.clock.step_index < self.horizon:
            if not self.supervisor.holding:
                self.ref_pos[leaders], self.ref_vel[leaders] = leader_reference(
                    self.supervisor.latched_doa, gains.cruise_speed, self.dt,
                    (self.ref_pos[leaders], self.ref_vel[leaders]))
                u = np.empty_like(self.positions)
                u[leaders] = leader_control(self.positions[leaders], self.velocities[leaders],
                                            self.ref_pos[leaders], self.ref_vel[leaders], gains)
                u[followers] = follower_controls(self.positions, self.velocities, self.graph, gains)[followers]
            else:
                u = leader_control(self.positions, self.velocities, self.hold_points, zero, gains)
            self.positions, self.velocities = integrate_step(self.positions, self.velocities, u, self.dt)
            self.clock.tick()
            step = self.clock.step_index
            self._track_distance(step)
            if self.recorder.due(step):
                self._sample(step, self.positions, _mode_label(self.supervisor))

            centroid = self.centroid()
            if not self.supervisor.holding:
                drift = self.velocities.mean(axis=0)
                # Stop half a step early so the stop point lies within c*dt of the target.
                guard = 0.5 * math.hypot(drift[0], drift[1]) * self.dt
                if should_start_listening(self.supervisor, centroid, self.supervisor.step_target - guard):
                    offset = centroid - self.supervisor.anchor
                    self.supervisor = begin_settling(self.supervisor)
                    self.hold_points = self.positions.copy()
                    settle_start = step
                    self.recorder.event(step, FORMATION_UNIT_ID, "settle_start", centroid,
                                        traveled_m=math.hypot(offset[0], offset[1]),
                                        step_target_m=self.supervisor.step_target)
            elif np.max(np.linalg.norm(self.velocities, axis=1)) < self.thresholds.settle_speed:
                # Listening holds the switch positions, so residual speed only decays.
                self.hold_points = self.positions.copy()
                self.supervisor = transition(self.supervisor, centroid)
                self.settle_intervals.append((settle_start, step))
                self.recorder.event(step, FORMATION_UNIT_ID, "listen_start", centroid)
                return
            if self._converged_long_enough():
                self.stopped_early = True
                return

    def run(self):
        logger.info("single-source run: seed %d, horizon %.1f s", self.seed, self.horizon * self.dt)
        self._sample(0, self.positions, OperatingMode.LISTENING.value)
        self._track_distance(0)
        while self.clock.step_index < self.horizon and not self.stopped_early:
            if self.supervisor.mode is OperatingMode.LISTENING:
                self.listen()
            else:
                self.move()
            if self._converged_long_enough():
                self.stopped_early = True
        return self.metrics()

    def metrics(self):
        dt = self.dt
        t_s = convergence_time(self.listening_intervals, self.last_far_step, dt)
        cutoff = math.inf if t_s is None else round(t_s / dt)
        listening = sum(min(end, cutoff) - start for start, end in self.listening_intervals if start < cutoff)
        settling = sum(min(end, cutoff) - start for start, end in self.settle_intervals if start < cutoff)
        moves = [e for e in self.recorder.events if e.kind == "move_start"]
        roles = {i: AgentRole.LEADER if i in self.graph.leaders else AgentRole.FOLLOWER
                 for i in range(len(self.positions))}
        logger.info("single-source run done: t_s=%s, final distance %.4f m", t_s, self.distance())
        return RunMetrics(
            scenario="single",
            seed=self.seed,
            simulated_time_s=self.clock.time,
            sources=self.world.source_positions,
            events=self.recorder.events,
            convergence_time_s=t_s,
            listening_time_s=listening * dt,
            settle_time_s=settling * dt,
            phase_count=sum(1 for e in moves if e.time_s < cutoff * dt),
            first_move_time_s=moves[0].time_s if moves else None,
            final_distance_m=self.distance(),
            stopped_early=self.stopped_early,
            centroid_distance=self.recorder.centroid_frame(),
            trajectory=self.recorder.trajectory_frame(),
            final_agents=[AgentState(self.positions[i].copy(), self.velocities[i].copy(),
                                     supervisor=self.supervisor, role=roles[i])
                          for i in range(len(self.positions))],
        )


def run_single_source(config, seed=None):
    """Runs the formation scenario and returns its metrics."""
    seed = config.seed if seed is None else seed
    return _FormationRun(config, seed).run()


# =====================================================================================
# Multiple sources: one supervisor per agent, shared explored-area registry
# =====================================================================================

def _array_truths(world, position, radius, beta, fallback_doa):
    intensities = array_intensities_many(world, position[None, :], radius)[0]
    channels = channel_positions_many(position[None, :], radius)[0]
    try:
        doa = array_doa(intensities, channels)
    except NoSignalError:
        doa = fallback_doa
    return array_step(intensities, beta), doa


def run_multi_source(config, seed=None):
    """Runs the exploration scenario and returns its metrics."""
    seed = config.seed if seed is None else seed
    dt, horizon = config.dt_s, config.horizon_steps
    world = build_world(config, seed)
    gains = GainSet(config.leader_kp, config.leader_kd, config.follower_kp,
                    config.follower_kd, config.cruise_speed, config.alpha)
    thresholds = SwitchThresholds(config.p_thresh, config.k_thresh, config.settle_speed)
    params = ExplorationParams(config.beta, config.gamma_s, config.k_v, config.k_r_escape,
                               config.k_r_growth, config.r0, config.mu_s_thresh, config.r_tt)
    noise_model = NoiseModel(config.sigma_d2, config.k_theta, config.doa_noise_law)
    rule = StepMeanRule(config.step_mean_rule)

    positions = np.array(config.agent_positions, dtype=float)
    velocities = np.zeros_like(positions)
    n = len(positions)
    supervisors = [new_supervisor(p, noise_model, rule) for p in positions]
    noises = [MeasurementNoise(noise_model, _stream(seed, _STEP_NOISE, i), _stream(seed, _DOA_NOISE, i))
              for i in range(n)]
    escape_rngs = [_stream(seed, _ESCAPE, i) for i in range(n)]
    v_bar = np.zeros((n, 2))
    ref_pos, ref_vel = positions.copy(), np.zeros((n, 2))
    anchors = positions.copy()
    targets = np.zeros(n)
    listening = np.ones(n, dtype=bool)
    moving = np.zeros(n, dtype=bool)
    holding = np.zeros(n, dtype=bool)
    last_doa = [0.0] * n
    truths = []
    for i in range(n):
        truths.append(_array_truths(world, positions[i], config.array_radius_m, config.beta, last_doa[i]))
        last_doa[i] = truths[i][1]

    registry = ExploredAreaRegistry()
    recorder = _Recorder(dt, config.trajectory_decimation, config.emit_trajectories)
    detections = []
    clock = SimClock(dt)
    logger.info("multi-source run: seed %d, %d agents, %d sources, horizon %.1f s",
                seed, n, len(world.sources), horizon * dt)

    def sample(step):
        recorder.agents(step, positions, [_mode_label(s) for s in supervisors],
                        [_estimate_fields(s) for s in supervisors])

    sample(0)
    while clock.step_index < horizon:
        switching = []
        for i in np.flatnonzero(listening):
            s, theta = noises[i].draw(*truths[i])
            supervisors[i] = listening_step(supervisors[i], s, theta)
            if should_start_moving(supervisors[i], thresholds):
                switching.append(i)

        active = moving & ~holding
        if active.any():
            ref_pos[active], ref_vel[active] = exploration_reference(
                v_bar[active], gains.cruise_speed, dt, (ref_pos[active], ref_vel[active]))
        u = leader_control(positions, velocities, ref_pos, ref_vel, gains)
        positions, velocities = integrate_step(positions, velocities, u, dt)
        clock.tick()
        step = clock.step_index

        if active.any():
            offsets = positions - anchors
            traveled = np.hypot(offsets[:, 0], offsets[:, 1])
            guards = 0.5 * np.hypot(velocities[:, 0], velocities[:, 1]) * dt
            for i in np.flatnonzero(active & (traveled >= targets - guards)):
                if should_start_listening(supervisors[i], positions[i], targets[i] - guards[i]):
                    supervisors[i] = begin_settling(supervisors[i])
                    holding[i] = True
                    ref_pos[i], ref_vel[i] = positions[i], 0.0
                    recorder.event(step, i + 1, "settle_start", positions[i],
                                   traveled_m=float(traveled[i]), step_target_m=float(targets[i]))

        if holding.any():
            speeds = np.hypot(velocities[:, 0], velocities[:, 1])
            for i in np.flatnonzero(holding & (speeds < thresholds.settle_speed)):
                supervisors[i] = transition(supervisors[i], positions[i])
                holding[i] = moving[i] = False
                listening[i] = True
                anchors[i] = positions[i]
                ref_pos[i] = positions[i]
                truths[i] = _array_truths(world, positions[i], config.array_radius_m, config.beta, last_doa[i])
                last_doa[i] = truths[i][1]
                recorder.event(step, i + 1, "listen_start", positions[i])

        # Registry writes land first, in agent order, so every agent switching
        # this step sees the same committed registry.
        for i in switching:
            mu_s = supervisors[i].step_estimate.mean
            if mu_s <= params.mu_s_thresh:
                area = registry.containing_area(positions[i])
                registry = register_detection(registry, positions[i], params)
                area_id = len(registry.areas) - 1 if area is None else area
                detections.append({"time_s": clock.time, "agent_id": i + 1, "x_m": float(positions[i][0]),
                                   "y_m": float(positions[i][1]), "area_id": area_id, "mu_s_m": mu_s})
                recorder.event(step, i + 1, "detection", positions[i], area_id=area_id, mu_s_m=mu_s)
        for i in switching:
            estimate = supervisors[i]
            v_bar[i] = update_virtual_velocity(v_bar[i], positions[i], registry, estimate.step_estimate.mean,
                                               estimate.doa_estimate.mean, params, escape_rngs[i])
            step_target = params.gamma * math.hypot(v_bar[i][0], v_bar[i][1])
            supervisors[i] = transition(supervisors[i], step_target=step_target)
            listening[i], moving[i] = False, True
            targets[i] = step_target
            ref_pos[i], ref_vel[i] = positions[i], 0.0
            recorder.event(step, i + 1, "move_start", positions[i], step_target_m=step_target,
                           v_bar_x=float(v_bar[i][0]), v_bar_y=float(v_bar[i][1]))

        if recorder.due(step):
            sample(step)

    points = [(d["x_m"], d["y_m"]) for d in detections]
    count = score_detections(points, world.source_positions, params.r_tt)
    moves = [e for e in recorder.events if e.kind == "move_start"]
    logger.info("multi-source run done: %d of %d sources located", count, len(world.sources))
    return RunMetrics(
        scenario="multi",
        seed=seed,
        simulated_time_s=clock.time,
        sources=world.source_positions,
        events=recorder.events,
        first_move_time_s=moves[0].time_s if moves else None,
        detection_count=count,
        detection_log=detections,
        explored_areas=list(registry.areas),
        trajectory=recorder.trajectory_frame(),
        final_agents=[AgentState(positions[i].copy(), velocities[i].copy(), supervisor=supervisors[i],
                                 virtual_velocity=v_bar[i].copy()) for i in range(n)],
    )


def run_scenario(config, seed=None):
    """Dispatches on the configured scenario kind."""
    if config.scenario == "single":
        return run_single_source(config, seed)
    return run_multi_source(config, seed)


# =====================================================================================
# Sweeps
# =====================================================================================

# Keys a sweep may take from the caller's config; everything else is fixed
# by the table's protocol.
SWEEP_CARRIED_KEYS = ("seed", "runs", "trajectory_decimation", "step_mean_rule", "doa_noise_law")
SWEEP_SCENARIOS = {1: "single", 2: "multi"}


def sweep_protocol(table):
    """Scenario defaults every cell of a table starts from."""
    if table not in SWEEP_SCENARIOS:
        raise ValueError(f"unknown sweep table {table!r}")
    return build_config({"scenario": SWEEP_SCENARIOS[table]})


def sweep_cells(config, table):
    """
    Full cell overrides for the Table 1 noise grid or the Table 2 target
    counts. Each cell pins the scenario geometry and horizon, so a caller's
    config only contributes the keys in SWEEP_CARRIED_KEYS.
    """
    protocol = sweep_protocol(table)
    pinned = {key: getattr(protocol, key) for key in ("scenario", "duration_s", "agent_positions",
                                                      "source_positions", "leaders", "doa_edges")}
    if table == 1:
        return [dict(pinned, sigma_d2=s, k_theta=k) for s, k in product(TABLE1_SIGMA_D2, TABLE1_K_THETA)]
    return [dict(pinned, target_count=n, spawn_half_width_m=protocol.spawn_half_width_m,
                 sigma_d2=0.01, k_theta=100.0) for n in TABLE2_TARGETS]


def _sweep_job(job):
    cell_index, run_index, config, seed = job
    metrics = run_scenario(config, seed)
    row = {"cell": cell_index, "run": run_index, "seed": seed, "sigma_d2": config.sigma_d2,
           "k_theta": config.k_theta}
    if config.scenario == "single":
        row.update({"t_s": metrics.convergence_time_s, "converged": metrics.converged,
                    "listening_time_s": metrics.listening_time_s, "settle_time_s": metrics.settle_time_s,
                    "phase_count": metrics.phase_count, "first_move_time_s": metrics.first_move_time_s,
                    "final_distance_m": metrics.final_distance_m})
    else:
        row.update({"targets": len(metrics.sources), "detections": metrics.detection_count,
                    "detection_events": len(metrics.detection_log)})
    return row


def sweep(config, table, runs, base_seed, workers=1, duration_s=None):
    """
    Runs every cell of a preset grid `runs` times with per-cell seeds and
    returns one row per run, sorted by (cell, run). `duration_s` replaces the
    table's horizon when given.
    """
    carried = {key: getattr(config, key) for key in SWEEP_CARRIED_KEYS}
    protocol = replace(sweep_protocol(table), emit_trajectories=False, **carried)
    jobs = []
    for cell_index, overrides in enumerate(sweep_cells(config, table)):
        cell_config = replace(protocol, **overrides)
        if duration_s is not None:
            cell_config = replace(cell_config, duration_s=duration_s)
        cell_config = validate_config(cell_config)
        for run_index in range(runs):
            jobs.append((cell_index, run_index, cell_config, cell_seed(base_seed, cell_index, run_index)))
    logger.info("sweep table %d: %d cells x %d runs", table, len(jobs) // max(runs, 1), runs)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_job, jobs))
    else:
        rows = []
        for job in jobs:
            rows.append(_sweep_job(job))
            logger.info("cell %d run %d done", job[0], job[1])
    return pd.DataFrame(rows).sort_values(["cell", "run"], ignore_index=True)
