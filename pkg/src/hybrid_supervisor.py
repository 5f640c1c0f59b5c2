# -*- coding: utf-8 -*-
"""
Two-mode hybrid supervisor for one control unit (the whole formation in the
single-source scenario, one agent in the multi-source scenario).

A unit listens while still, fusing one (step, DoA) measurement pair per
simulation step, and switches to moving once both estimates are precise
enough. It stops moving after covering the latched step target, holds
position until it has physically settled, and only then starts listening
again with freshly reset estimators.
"""
import logging
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from src.errors import ContractViolation
from src.estimation import (
    NoiseModel,
    StepMeanRule,
    gaussian_update,
    reset_gaussian,
    reset_vonmises,
    vonmises_update,
)

logger = logging.getLogger(__name__)


class OperatingMode(str, Enum):
    LISTENING = "listening"
    MOVING = "moving"


@dataclass(frozen=True)
class SwitchThresholds:
    """P_thresh (m^2), K_thresh (bound on K^-1) and the settle speed (m/s)."""
    p_thresh: float
    k_inv_thresh: float
    settle_speed: float

    def __post_init__(self):
        for name in ("p_thresh", "k_inv_thresh", "settle_speed"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be > 0, got {value!r}")


@dataclass(frozen=True)
class SupervisorState:
    mode: OperatingMode
    measurement_anchor: tuple
    step_estimate: object
    doa_estimate: object
    noise: NoiseModel
    step_target: float = None
    latched_doa: float = None
    holding: bool = False

    @property
    def anchor(self):
        return np.asarray(self.measurement_anchor, dtype=float)


def _point(position):
    return (float(position[0]), float(position[1]))


def new_supervisor(anchor, noise, mean_rule=StepMeanRule.PRECISION_WEIGHTED):
    """A unit that starts listening at `anchor` with reset estimators."""
    return SupervisorState(
        mode=OperatingMode.LISTENING,
        measurement_anchor=_point(anchor),
        step_estimate=reset_gaussian(noise.step_variance, mean_rule),
        doa_estimate=reset_vonmises(noise.doa_concentration),
        noise=noise,
    )


def listening_step(state, step_measurement, doa_measurement):
    """Fuses one measurement pair into both estimators."""
    if state.mode is not OperatingMode.LISTENING:
        raise ContractViolation("listening_step called while the unit is moving")
    return replace(
        state,
        step_estimate=gaussian_update(state.step_estimate, step_measurement),
        doa_estimate=vonmises_update(state.doa_estimate, doa_measurement),
    )


def should_start_moving(state, thresholds):
    """True iff P <= P_thresh and K^-1 <= K_thresh."""
    if state.mode is not OperatingMode.LISTENING:
        raise ContractViolation("should_start_moving called while the unit is moving")
    return (state.step_estimate.is_precise(thresholds.p_thresh)
            and state.doa_estimate.is_precise(thresholds.k_inv_thresh))


def should_start_listening(state, current_position, step_target):
    """True iff the unit has travelled at least `step_target` from its anchor."""
    if state.mode is not OperatingMode.MOVING:
        raise ContractViolation("should_start_listening called while the unit is listening")
    offset = np.asarray(current_position, dtype=float) - state.anchor
    return math.hypot(offset[0], offset[1]) >= step_target


def begin_settling(state):
    """Enters the position-hold regime that precedes listening."""
    if state.mode is not OperatingMode.MOVING:
        raise ContractViolation("only a moving unit can start settling")
    return replace(state, holding=True)


def transition(state, current_position=None, step_target=None):
    """
    Flips the operating mode.

    Listening -> Moving latches the step target (the final mean step unless
    the caller supplies its own, e.g. gamma * |v_bar|) and the final DoA.
    Moving -> Listening resets both estimators and re-anchors the unit at
    `current_position`.
    """
    if state.mode is OperatingMode.LISTENING:
        target = state.step_estimate.mean if step_target is None else float(step_target)
        logger.debug("listening -> moving: step target %.4f m, DoA %.4f rad", target, state.doa_estimate.mean)
        return replace(
            state,
            mode=OperatingMode.MOVING,
            step_target=target,
            latched_doa=state.doa_estimate.mean,
            holding=False,
        )

    if current_position is None:
        raise ContractViolation("moving -> listening needs the current position as the new anchor")
    logger.debug("moving -> listening at (%.4f, %.4f)", current_position[0], current_position[1])
    return replace(
        state,
        mode=OperatingMode.LISTENING,
        measurement_anchor=_point(current_position),
        step_estimate=reset_gaussian(state.noise.step_variance, state.step_estimate.mean_rule),
        doa_estimate=reset_vonmises(state.noise.doa_concentration),
        step_target=None,
        holding=False,
    )
