import numpy as np
import numpy.testing as npt
import pytest

from kmig.errors import ConfigurationError
from kmig.gridio import (GridRegion, ImageGrid, compare_grids, make_grid_axes,
                         read_grid_csv, write_grid_csv, write_grid_json,
                         write_grid_pgm)


def small_grid():
    vals = np.array([[0.0, 0.2, 0.0],
                     [0.1, 1.0, 0.3],
                     [0.0, 0.4, 0.0]])
    return ImageGrid((-0.002, -0.002), 0.002, vals)


def test_grid_axes_cover_region():
    origin, count = make_grid_axes(GridRegion(0.2), 0.002)
    assert origin == (-0.2, -0.2)
    assert count == 201


def test_argmax_point():
    assert small_grid().argmax_point() == (0.0, 0.0)


def test_normalized_sets_peak_meta():
    grid = ImageGrid((0.0, 0.0), 1.0, np.array([[0.0, 2.0], [1.0, 0.5]]))
    norm = grid.normalized()
    assert norm.values.max() == 1.0
    assert norm.meta["peak_value"] == 2.0
    zero = ImageGrid((0.0, 0.0), 1.0, np.zeros((2, 2))).normalized()
    assert not zero.values.any()


def test_csv_round_trip(tmp_path):
    grid = small_grid()
    path = tmp_path / "grid.csv"
    write_grid_csv(grid, path)
    back = read_grid_csv(path)
    npt.assert_array_equal(back.values, grid.values)
    assert back.origin == grid.origin
    assert back.spacing == grid.spacing


def test_pgm_orientation_top_row_is_max_y(tmp_path):
    vals = np.zeros((2, 2))
    vals[1, 0] = 1.0        # max value at max y, min x
    grid = ImageGrid((0.0, 0.0), 1.0, vals)
    path = tmp_path / "grid.pgm"
    write_grid_pgm(grid, path)
    blob = path.read_bytes()
    assert blob.startswith(b"P5\n2 2\n65535\n")
    levels = np.frombuffer(blob.split(b"65535\n", 1)[1], dtype=">u2").reshape(2, 2)
    assert levels[0, 0] == 65535    # top-left pixel carries the peak


def test_json_sidecar(tmp_path):
    import json
    grid = small_grid()
    grid.meta["frequency_hz"] = 4e9
    path = tmp_path / "grid.json"
    write_grid_json(grid, path, argmax_points=[grid.argmax_point()])
    doc = json.loads(path.read_text())
    assert doc["width_px"] == 3 and doc["height_px"] == 3
    assert doc["argmax_points_m"] == [[0.0, 0.0]]
    assert doc["frequency_hz"] == 4e9


def test_compare_grids_identity():
    grid = small_grid()
    stats = compare_grids(grid, grid)
    assert stats["pearson"] == pytest.approx(1.0)
    assert stats["max_abs_gap"] == 0.0
    assert stats["argmax_offset_cells"] == 0.0


def test_compare_grids_window_restricts_pixels():
    grid = small_grid()
    stats = compare_grids(grid, grid, centers=[(0.0, 0.0)], radius=0.0021)
    assert stats["pixels_compared"] == 5    # center plus 4-neighborhood


def test_compare_grids_shape_mismatch():
    a = small_grid()
    b = ImageGrid((0.0, 0.0), 0.002, np.zeros((2, 2)))
    with pytest.raises(ConfigurationError):
        compare_grids(a, b)


def test_grid_validation():
    with pytest.raises(ConfigurationError):
        ImageGrid((0.0, 0.0), 0.0, np.ones((2, 2)))
    with pytest.raises(ConfigurationError):
        ImageGrid((0.0, 0.0), 1.0, np.ones(4))
    with pytest.raises(ConfigurationError):
        GridRegion(0.0)
