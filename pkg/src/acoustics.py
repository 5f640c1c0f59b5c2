# -*- coding: utf-8 -*-
"""
Static acoustic field and microphone-array geometry.

Sources are incoherent point emitters, so the field at a point is the plain
sum of per-source intensities. Each source follows a piecewise law: constant
W0/(4*pi) within 1 m, W0/(4*pi*d^2) beyond. Agents carry a circular array of
six omnidirectional microphones.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from src.utils import as_point

CHANNEL_COUNT = 6
NEAR_FIELD_RADIUS = 1.0

# Channel h (1-based) sits at angle pi/3 * (h - 1) on the array circle.
_CHANNEL_ANGLES = np.pi / 3.0 * np.arange(CHANNEL_COUNT)
_CHANNEL_OFFSETS = np.column_stack([np.cos(_CHANNEL_ANGLES), np.sin(_CHANNEL_ANGLES)])


@dataclass(frozen=True)
class SoundSource:
    """A static point source at `position` (m) emitting `power` W0 (W)."""
    position: tuple
    power: float

    def __post_init__(self):
        point = as_point(self.position, "source position")
        object.__setattr__(self, "position", (float(point[0]), float(point[1])))
        if not (math.isfinite(self.power) and self.power > 0):
            raise ValueError(f"source power must be > 0, got {self.power!r}")


@dataclass(frozen=True)
class AcousticWorld:
    """Ordered, non-empty set of incoherent sources with a vectorized query."""
    sources: tuple
    _positions: np.ndarray = field(init=False, repr=False, compare=False)
    _powers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sources = tuple(self.sources)
        if not sources:
            raise ValueError("an acoustic world needs at least one source")
        object.__setattr__(self, "sources", sources)
        object.__setattr__(self, "_positions", np.array([s.position for s in sources], dtype=float))
        object.__setattr__(self, "_powers", np.array([s.power for s in sources], dtype=float))

    @classmethod
    def from_positions(cls, positions, power):
        return cls(tuple(SoundSource(tuple(p), power) for p in positions))

    @property
    def source_positions(self):
        return self._positions.copy()

    def intensities(self, points):
        """Total intensity (W/m^2) at each row of an (m, 2) array of points."""
        points = np.asarray(points, dtype=float).reshape(-1, 2)
        offsets = points[:, None, :] - self._positions[None, :, :]
        squared = np.einsum("msk,msk->ms", offsets, offsets)
        # d <= 1 and d^2 <= 1 select the same branch, so clamping d^2 at 1
        # gives both pieces of the law, equal at d = 1.
        per_source = self._powers[None, :] / (4.0 * math.pi * np.maximum(squared, NEAR_FIELD_RADIUS ** 2))
        return per_source.sum(axis=1)


@dataclass(frozen=True)
class MicrophoneArray:
    """Six-channel circular array of radius `radius` (m) centred on `center`."""
    center: tuple
    radius: float
    channel_count: int = CHANNEL_COUNT

    def __post_init__(self):
        point = as_point(self.center, "array center")
        object.__setattr__(self, "center", (float(point[0]), float(point[1])))
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"array radius must be > 0, got {self.radius!r}")
        if self.channel_count != CHANNEL_COUNT:
            raise ValueError(f"array must have exactly {CHANNEL_COUNT} channels")


def intensity_at(world, point):
    """Total intensity of `world` at a single finite 2D point."""
    return float(world.intensities(as_point(point))[0])


def microphone_positions(array):
    """(6, 2) array of channel positions, channel 1 first."""
    return np.asarray(array.center, dtype=float) + array.radius * _CHANNEL_OFFSETS


def array_intensities(world, array):
    """Intensity read by each of the six channels, in channel order."""
    return world.intensities(microphone_positions(array))


def omni_intensity(world, array):
    """Mean of the six channel readings: the array used as one omni microphone."""
    return float(np.mean(array_intensities(world, array)))


def array_intensities_many(world, centers, radius):
    """(n, 6) channel intensities for n arrays of common radius at `centers`."""
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    mics = centers[:, None, :] + radius * _CHANNEL_OFFSETS[None, :, :]
    return world.intensities(mics.reshape(-1, 2)).reshape(len(centers), CHANNEL_COUNT)


def channel_positions_many(centers, radius):
    """(n, 6, 2) channel positions for n arrays of common radius."""
    centers = np.asarray(centers, dtype=float).reshape(-1, 2)
    return centers[:, None, :] + radius * _CHANNEL_OFFSETS[None, :, :]
