# -*- coding: utf-8 -*-
"""
Recursive Bayesian estimators used while a unit listens.

Step length is tracked as a Gaussian (mean, variance); direction of arrival
as a von Mises (mean, concentration). Both are plain immutable values: every
update returns a new estimate. A reset puts the Gaussian on an infinite prior
and the von Mises on zero concentration, so the first update after a reset
reproduces the measurement exactly.
"""
import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from src.errors import InvalidMeasurementError
from src.utils import wrap_angle


class StepMeanRule(str, Enum):
    """How the Gaussian mean is updated after the first measurement."""
    PRECISION_WEIGHTED = "precision_weighted"
    AS_PRINTED = "as_printed"


class DoaNoiseLaw(str, Enum):
    """
    Distribution of the DoA measurement error. WRAPPED_NORMAL draws a
    normal error of variance 1/k_theta and wraps it onto the circle.
    """
    VON_MISES = "von_mises"
    WRAPPED_NORMAL = "wrapped_normal"


@dataclass(frozen=True)
class NoiseModel:
    """Measurement noise: step variance sigma_d^2 (m^2), DoA concentration k_theta."""
    step_variance: float
    doa_concentration: float
    doa_law: DoaNoiseLaw = DoaNoiseLaw.VON_MISES

    def __post_init__(self):
        if not (math.isfinite(self.step_variance) and self.step_variance > 0):
            raise ValueError(f"step variance must be > 0, got {self.step_variance!r}")
        if not (math.isfinite(self.doa_concentration) and self.doa_concentration > 0):
            raise ValueError(f"DoA concentration must be > 0, got {self.doa_concentration!r}")
        object.__setattr__(self, "doa_law", DoaNoiseLaw(self.doa_law))


@dataclass(frozen=True)
class GaussianEstimate:
    mean: float
    variance: float
    measurement_variance: float
    prior_is_infinite: bool = False
    mean_rule: StepMeanRule = StepMeanRule.PRECISION_WEIGHTED

    @property
    def effective_variance(self):
        """Variance with the infinite prior reported as +inf."""
        return math.inf if self.prior_is_infinite else self.variance

    def is_precise(self, threshold):
        return not self.prior_is_infinite and self.variance <= threshold


@dataclass(frozen=True)
class VonMisesEstimate:
    mean: float
    concentration: float
    measurement_concentration: float

    @property
    def inverse_concentration(self):
        """K^-1, with K = 0 read as +inf rather than a division error."""
        return math.inf if self.concentration == 0 else 1.0 / self.concentration

    def is_precise(self, threshold):
        return self.inverse_concentration <= threshold


def reset_gaussian(step_variance, mean_rule=StepMeanRule.PRECISION_WEIGHTED):
    """Infinite-prior Gaussian; the stored mean is never read before an update."""
    return GaussianEstimate(
        mean=0.0,
        variance=math.inf,
        measurement_variance=float(step_variance),
        prior_is_infinite=True,
        mean_rule=StepMeanRule(mean_rule),
    )


def reset_vonmises(doa_concentration):
    """Zero-concentration von Mises; the stored mean is never read before an update."""
    return VonMisesEstimate(mean=0.0, concentration=0.0, measurement_concentration=float(doa_concentration))


def gaussian_update(est, measurement):
    """Fuses one noisy step measurement into the Gaussian estimate."""
    if not math.isfinite(measurement):
        raise InvalidMeasurementError(f"step measurement must be finite, got {measurement!r}")
    noise = est.measurement_variance
    if est.prior_is_infinite:
        return replace(est, mean=float(measurement), variance=noise, prior_is_infinite=False)

    prior = est.variance
    variance = noise * prior / (noise + prior)
    if est.mean_rule is StepMeanRule.AS_PRINTED:
        mean = (measurement * prior + est.mean) / (noise + prior)
    else:
        mean = (measurement * prior + est.mean * noise) / (noise + prior)
    return replace(est, mean=mean, variance=variance)


def vonmises_update(est, measurement):
    """Fuses one noisy DoA measurement (rad) into the von Mises estimate."""
    if not math.isfinite(measurement):
        raise InvalidMeasurementError(f"DoA measurement must be finite, got {measurement!r}")
    k = est.measurement_concentration
    c = est.concentration * math.cos(est.mean) + k * math.cos(measurement)
    s = est.concentration * math.sin(est.mean) + k * math.sin(measurement)
    return replace(est, mean=wrap_angle(math.atan2(s, c)), concentration=math.hypot(c, s))


def concentration_magnitude(concentration, mean, measurement_concentration, measurement):
    """Updated concentration in the law-of-cosines form; equals vonmises_update's K'."""
    k = measurement_concentration
    squared = concentration ** 2 + k ** 2 + 2.0 * concentration * k * math.cos(mean - measurement)
    return math.sqrt(max(squared, 0.0))


def sample_step(rng, true_step, step_variance, size=None):
    """Draws s~ ~ N(true_step, sigma_d^2) from the run's generator."""
    return rng.normal(true_step, math.sqrt(step_variance), size=size)


def sample_doa(rng, true_doa, doa_concentration, size=None):
    """
    Draws theta~ ~ vonMises(true_doa, k_theta), normalized to (-pi, pi].

    numpy's Generator.vonmises uses Best-Fisher rejection with a
    wrapped-Cauchy envelope for 1e-8 <= kappa <= 1e6. Above 1e6 it draws
    from a wrapped normal of variance 1/kappa, and below 1e-8 it draws
    uniformly. Both limits agree with the von Mises law far below the
    resolution of any estimator here.
    """
    return wrap_angle(rng.vonmises(true_doa, doa_concentration, size=size))


def sample_doa_wrapped_normal(rng, true_doa, doa_concentration, size=None):
    """Draws theta~ = true_doa + N(0, 1/k_theta), wrapped to (-pi, pi]."""
    return wrap_angle(rng.normal(true_doa, 1.0 / math.sqrt(doa_concentration), size=size))


DOA_SAMPLERS = {
    DoaNoiseLaw.VON_MISES: sample_doa,
    DoaNoiseLaw.WRAPPED_NORMAL: sample_doa_wrapped_normal,
}


class MeasurementNoise:
    """
    Buffered noise source for one listening unit.

    Step and DoA noise come from two independent generators, drawn in fixed
    size blocks as zero-centred deviates, so the sequence a unit sees depends
    only on its seed and never on how other units or diagnostics draw.
    """

    def __init__(self, noise_model, step_rng, doa_rng, block_size=4096):
        self.noise_model = noise_model
        self._step_rng = step_rng
        self._doa_rng = doa_rng
        self._block_size = block_size
        self._step_block = np.empty(0)
        self._doa_block = np.empty(0)
        self._cursor = 0

    def _refill(self):
        self._step_block = sample_step(self._step_rng, 0.0, self.noise_model.step_variance, size=self._block_size)
        sampler = DOA_SAMPLERS[self.noise_model.doa_law]
        self._doa_block = sampler(self._doa_rng, 0.0, self.noise_model.doa_concentration, size=self._block_size)
        self._cursor = 0

    def draw(self, true_step, true_doa):
        """Returns one (s~, theta~) pair around the given true values."""
        if self._cursor >= len(self._step_block):
            self._refill()
        s = true_step + float(self._step_block[self._cursor])
        theta = wrap_angle(true_doa + float(self._doa_block[self._cursor]))
        self._cursor += 1
        return s, theta
