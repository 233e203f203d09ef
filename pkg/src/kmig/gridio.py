"""Rectangular image grids and their on-disk formats.

A grid stores nonnegative map values on pixel centers. Axis convention:
values[iy, ix] is the pixel at (origin_x + ix*spacing, origin_y + iy*spacing),
so +x is right and +y is up; PGM output flips rows so the top image row is
the maximum y. CSV rows run y-major from the minimum y upward.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError


@dataclass
class GridRegion:
    """Square search region centered at (cx, cy) with the given half-width."""

    half_width: float = 0.2
    cx: float = 0.0
    cy: float = 0.0

    def __post_init__(self):
        if not self.half_width > 0.0:
            raise ConfigurationError("region half-width must be positive")


@dataclass
class ImageGrid:
    """Pixel grid of nonnegative map values."""

    origin: tuple[float, float]     # center of pixel (ix=0, iy=0), meters
    spacing: float                  # meters
    values: np.ndarray              # (height, width), values[iy, ix]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.spacing <= 0.0:
            raise ConfigurationError("grid spacing must be positive")
        if self.values.ndim != 2 or self.values.size == 0:
            raise ConfigurationError("grid values must be a nonempty 2-D array")

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    def xs(self) -> np.ndarray:
        return self.origin[0] + self.spacing * np.arange(self.width)

    def ys(self) -> np.ndarray:
        return self.origin[1] + self.spacing * np.arange(self.height)

    def pixel_center(self, ix: int, iy: int) -> tuple[float, float]:
        return (self.origin[0] + ix * self.spacing, self.origin[1] + iy * self.spacing)

    def argmax_point(self) -> tuple[float, float]:
        iy, ix = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return self.pixel_center(int(ix), int(iy))

    def normalized(self) -> "ImageGrid":
        """Max-normalize; an identically zero grid is returned unchanged."""
        peak = float(self.values.max())
        meta = dict(self.meta)
        meta["peak_value"] = peak
        vals = self.values if peak == 0.0 else self.values / peak
        return ImageGrid(self.origin, self.spacing, vals, meta)


def make_grid_axes(region: GridRegion, spacing: float) -> tuple[tuple[float, float], int]:
    """Origin and per-axis pixel count for a centered square region."""
    if spacing <= 0.0:
        raise ConfigurationError("grid spacing must be positive")
    count = int(round(2.0 * region.half_width / spacing)) + 1
    if count < 1:
        raise ConfigurationError("empty grid region")
    origin = (region.cx - region.half_width, region.cy - region.half_width)
    return origin, count


def grid_points(grid_origin: tuple[float, float], spacing: float, width: int, height: int) -> np.ndarray:
    """Pixel centers, shape (height, width, 2)."""
    xs = grid_origin[0] + spacing * np.arange(width)
    ys = grid_origin[1] + spacing * np.arange(height)
    gx, gy = np.meshgrid(xs, ys)
    return np.stack([gx, gy], axis=-1)


def write_grid_csv(grid: ImageGrid, path) -> None:
    lines = ["x,y,value"]
    xs, ys = grid.xs(), grid.ys()
    for iy in range(grid.height):
        for ix in range(grid.width):
            lines.append(f"{float(xs[ix])!r},{float(ys[iy])!r},{float(grid.values[iy, ix])!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_grid_pgm(grid: ImageGrid, path) -> None:
    """16-bit binary PGM, top row = maximum y."""
    peak = float(grid.values.max())
    vals = grid.values / peak if peak > 0.0 else grid.values
    levels = np.round(np.flipud(vals) * 65535.0).astype(">u2")
    header = f"P5\n{grid.width} {grid.height}\n65535\n".encode("ascii")
    Path(path).write_bytes(header + levels.tobytes())


def write_grid_json(grid: ImageGrid, path, argmax_points=None) -> None:
    doc = {
        "origin_m": [grid.origin[0], grid.origin[1]],
        "spacing_m": grid.spacing,
        "width_px": grid.width,
        "height_px": grid.height,
        "orientation": "+x right, +y up; PGM top row is max y",
    }
    doc.update(grid.meta)
    if argmax_points is not None:
        doc["argmax_points_m"] = [[float(p[0]), float(p[1])] for p in argmax_points]
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_grid_csv(path) -> ImageGrid:
    xs, ys, vals = [], [], []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#") or line == "x,y,value":
            continue
        parts = line.split(",")
        if len(parts) != 3:
            raise ConfigurationError(f"{path}:{lineno}: expected 3 columns")
        xs.append(float(parts[0]))
        ys.append(float(parts[1]))
        vals.append(float(parts[2]))
    ux = sorted(set(xs))
    uy = sorted(set(ys))
    arr = np.zeros((len(uy), len(ux)))
    xi = {v: i for i, v in enumerate(ux)}
    yi = {v: i for i, v in enumerate(uy)}
    for x, y, v in zip(xs, ys, vals):
        arr[yi[y], xi[x]] = v
    spacing = ux[1] - ux[0] if len(ux) > 1 else (uy[1] - uy[0] if len(uy) > 1 else 1.0)
    return ImageGrid((ux[0], uy[0]), spacing, arr)


def compare_grids(a: ImageGrid, b: ImageGrid, centers=None, radius: float | None = None) -> dict:
    """Pearson correlation, max abs gap and argmax offset of two like grids.

    If ``centers``/``radius`` are given, statistics are restricted to pixels
    within ``radius`` of any center.
    """
    if a.values.shape != b.values.shape:
        raise ConfigurationError("grids must share a shape to be compared")
    if not (math.isclose(a.spacing, b.spacing) and
            math.isclose(a.origin[0], b.origin[0]) and math.isclose(a.origin[1], b.origin[1])):
        raise ConfigurationError("grids must share origin and spacing to be compared")
    pts = grid_points(a.origin, a.spacing, a.width, a.height)
    if centers is not None and radius is not None:
        if centers and not hasattr(centers[0], "__len__"):
            centers = [centers]
        sel = np.zeros(a.values.shape, dtype=bool)
        for cx, cy in centers:
            sel |= np.hypot(pts[..., 0] - cx, pts[..., 1] - cy) <= radius
    else:
        sel = np.ones(a.values.shape, dtype=bool)
    va, vb = a.values[sel], b.values[sel]
    if va.std() == 0.0 or vb.std() == 0.0:
        pearson = float("nan")
    else:
        pearson = float(np.corrcoef(va, vb)[0, 1])
    pa, pb = a.argmax_point(), b.argmax_point()
    return {
        "pearson": pearson,
        "max_abs_gap": float(np.abs(va - vb).max()),
        "argmax_a_m": [pa[0], pa[1]],
        "argmax_b_m": [pb[0], pb[1]],
        "argmax_offset_m": math.hypot(pa[0] - pb[0], pa[1] - pb[1]),
        "argmax_offset_cells": math.hypot(pa[0] - pb[0], pa[1] - pb[1]) / a.spacing,
        "pixels_compared": int(sel.sum()),
    }
