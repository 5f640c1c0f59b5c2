# -*- coding: utf-8 -*-
"""
This module provides common helpers used across the simulator: path
management, output directory setup, atomic file writes and a few small
planar-geometry and angle utilities.
"""
import os
import math
import tempfile
from contextlib import contextmanager
from pathlib import Path

import numpy as np


def get_project_root():
    """Returns the absolute path to the project's root directory."""
    # utils.py lives in src/, so the root is one level up.
    return Path(__file__).parent.parent


def get_run_label(scenario, seed, run_index=None):
    """Creates a standardized, file-safe label for one simulation run."""
    label = f"{scenario}_seed{seed}"
    if run_index is not None:
        label += f"_run{run_index:02d}"
    return label


def setup_output_directory(root_results_dir, label=None):
    """Creates and returns the path for a run's output directory."""
    path = Path(root_results_dir)
    if label:
        path = path / label
    os.makedirs(path, exist_ok=True)
    return path


@contextmanager
def atomic_write(filepath, mode="w", encoding="utf-8"):
    """
    Yields a file handle on a temporary sibling of `filepath` and renames it
    into place only if the block completes without raising.
    """
    filepath = Path(filepath)
    os.makedirs(filepath.parent, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{filepath.name}.", dir=filepath.parent)
    try:
        kwargs = {} if "b" in mode else {"encoding": encoding, "newline": ""}
        with os.fdopen(fd, mode, **kwargs) as handle:
            yield handle
        os.replace(tmp_name, filepath)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise


def wrap_angle(theta):
    """Maps an angle (scalar or array) onto the half-open interval (-pi, pi]."""
    if isinstance(theta, (float, int)):
        wrapped = math.remainder(theta, 2.0 * math.pi)
        return math.pi if wrapped <= -math.pi else wrapped
    wrapped = np.pi - np.mod(np.pi - np.asarray(theta, dtype=float), 2.0 * np.pi)
    if wrapped.ndim == 0:
        return float(wrapped)
    return wrapped


def heading(theta):
    """Unit vector (cos theta, sin theta)."""
    return np.array([math.cos(theta), math.sin(theta)])


def as_point(value, name="point"):
    """Converts a 2-sequence to a finite float array of shape (2,)."""
    point = np.asarray(value, dtype=float).reshape(-1)
    if point.shape != (2,) or not np.all(np.isfinite(point)):
        raise ValueError(f"{name} must be a finite 2D point, got {value!r}")
    return point
