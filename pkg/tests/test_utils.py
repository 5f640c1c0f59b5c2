# -*- coding: utf-8 -*-
import math

import numpy as np
import pytest

from src.utils import as_point, atomic_write, get_run_label, setup_output_directory, wrap_angle


@pytest.mark.parametrize("theta, expected", [
    (0.0, 0.0),
    (math.pi, math.pi),
    (-math.pi, math.pi),
    (2 * math.pi + 0.5, 0.5),
    (-0.5, -0.5),
])
def test_wrap_angle_scalars(theta, expected):
    assert wrap_angle(theta) == pytest.approx(expected, abs=1e-12)


def test_wrap_angle_arrays_stay_half_open():
    wrapped = wrap_angle(np.linspace(-10.0, 10.0, 2001))
    assert np.all(wrapped > -math.pi) and np.all(wrapped <= math.pi)
    assert wrap_angle(np.array(-math.pi)) == pytest.approx(math.pi)


def test_as_point_rejects_bad_shapes():
    np.testing.assert_array_equal(as_point([1, 2]), (1.0, 2.0))
    with pytest.raises(ValueError):
        as_point([1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        as_point([math.inf, 0.0])


def test_run_label():
    assert get_run_label("single", 7) == "single_seed7"
    assert get_run_label("multi", 7, 3) == "multi_seed7_run03"


def test_output_directory_is_created(tmp_path):
    path = setup_output_directory(tmp_path / "results", "single_seed0")
    assert path.is_dir()
    assert path.name == "single_seed0"


def test_atomic_write_replaces_on_success(tmp_path):
    target = tmp_path / "out.txt"
    with atomic_write(target) as f:
        f.write("done\n")
    assert target.read_text(encoding="utf-8") == "done\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


def test_atomic_write_leaves_nothing_on_failure(tmp_path):
    target = tmp_path / "out.txt"
    target.write_text("old\n", encoding="utf-8")
    with pytest.raises(RuntimeError):
        with atomic_write(target) as f:
            f.write("half")
            raise RuntimeError("crash")
    assert target.read_text(encoding="utf-8") == "old\n"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]
