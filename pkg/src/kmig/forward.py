"""Born-approximation scattered fields for scenes of small dielectric disks.

The scattered field for a station pair is k^2 * integral over the scene of
(eps_rel - 1) * G(receiver, y) * G(y, emitter) dy, with G the outgoing 2-D
Helmholtz Green's function. Disks are integrated by a midpoint rule on a
square lattice clipped to the disk: the integrand is sampled at cell
centers and weighted by the exact cell/disk overlap area, so the total
weight equals the disk area to rounding and refinement converges smoothly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import specfun
from .errors import ConfigurationError, DomainError, UnsupportedSceneError
from .geometry import ArrayConfig, MediumParams, wavenumber
from .msr import MsrMatrix, build_mask


def green(k_b: float, x, y) -> complex:
    """Outgoing 2-D Helmholtz Green's function -(i/4) H_0^(1)(k |x-y|)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    dist = math.hypot(x[0] - y[0], x[1] - y[1])
    if dist == 0.0:
        raise DomainError("Green's function is singular at coincident points")
    return -0.25j * specfun.hankel1_0(k_b * dist)


def green_many(k_b: float, points: np.ndarray, station) -> np.ndarray:
    """Green's function from one station to many points, shape (len(points),)."""
    points = np.asarray(points, dtype=float)
    station = np.asarray(station, dtype=float)
    dist = np.hypot(points[:, 0] - station[0], points[:, 1] - station[1])
    if np.any(dist == 0.0):
        raise DomainError("Green's function is singular at coincident points")
    return -0.25j * specfun.hankel1_0_many(k_b * dist)


@dataclass(frozen=True)
class SmallObject:
    """Dielectric disk: center (m), radius (m), relative permittivity."""

    center: tuple[float, float]
    radius: float
    eps_rel: float = 3.0

    def __post_init__(self):
        if not self.radius > 0.0:
            raise ConfigurationError(f"object radius must be positive, got {self.radius}")
        if not self.eps_rel > 0.0:
            raise ConfigurationError(f"eps_rel must be positive, got {self.eps_rel}")

    @property
    def contrast(self) -> float:
        return self.eps_rel - 1.0


@dataclass(frozen=True)
class PointTarget:
    """Zero-radius scatterer with complex strength (area times contrast)."""

    center: tuple[float, float]
    strength: complex = math.pi * 0.015 ** 2 * 2.0   # disk-equivalent default


@dataclass
class Scene:
    """Collection of well-separated disks and/or point targets."""

    objects: list[SmallObject] = field(default_factory=list)
    point_targets: list[PointTarget] = field(default_factory=list)
    region_half_width: float = 0.2

    def __post_init__(self):
        if not self.region_half_width > 0.0:
            raise ConfigurationError("region_half_width must be positive")
        for obj in self.objects:
            cx, cy = obj.center
            if max(abs(cx), abs(cy)) + obj.radius >= self.region_half_width:
                raise ConfigurationError(
                    f"object at ({cx}, {cy}) r={obj.radius} is not strictly inside the region")
        for a_i in range(len(self.objects)):
            for b_i in range(a_i + 1, len(self.objects)):
                a, b = self.objects[a_i], self.objects[b_i]
                gap = math.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1])
                if gap <= a.radius + b.radius:
                    raise ConfigurationError("scene objects overlap")

    def validate_inside_rings(self, config: ArrayConfig) -> None:
        limit = min(config.emitter_radius, config.receiver_radius)
        for obj in self.objects:
            if math.hypot(*obj.center) + obj.radius >= limit:
                raise ConfigurationError("object disk is not strictly inside both rings")
        for tgt in self.point_targets:
            if math.hypot(*tgt.center) >= limit:
                raise ConfigurationError("point target is not strictly inside both rings")


def _chord_antiderivative(x: np.ndarray, r: float) -> np.ndarray:
    # Antiderivative of sqrt(r^2 - t^2): (t sqrt(r^2-t^2) + r^2 asin(t/r)) / 2
    x = np.clip(x, -r, r)
    return 0.5 * (x * np.sqrt(np.maximum(r * r - x * x, 0.0)) + r * r * np.arcsin(np.clip(x / r, -1.0, 1.0)))


def _quadrant_area(x: np.ndarray, y: np.ndarray, r: float) -> np.ndarray:
    """Area of {(u, v): u <= x, v <= y} within the disk of radius r at origin."""
    x = np.clip(np.asarray(x, dtype=float), -r, r)
    y = np.asarray(y, dtype=float)
    out = np.zeros(np.broadcast(x, y).shape)
    x, y = np.broadcast_arrays(x, y)

    full = y >= r          # vertical span fully below y
    if np.any(full):
        out[full] = 2.0 * (_chord_antiderivative(x[full], r) - _chord_antiderivative(np.full_like(x[full], -r), r))

    mid = (y > -r) & (y < r)
    if np.any(mid):
        xm, ym = x[mid], y[mid]
        b = np.sqrt(np.maximum(r * r - ym * ym, 0.0))
        acc = np.zeros_like(xm)
        # left band [-r, -b]: chord fully below y only when y >= 0
        left_end = np.minimum(xm, -b)
        pos = ym >= 0.0
        acc[pos] += 2.0 * (_chord_antiderivative(left_end[pos], r)
                           - _chord_antiderivative(np.full_like(left_end[pos], -r), r))
        # middle band [-b, min(x, b)]: integrand y + chord
        mid_end = np.clip(xm, -b, b)
        seg = mid_end - (-b)
        acc += np.where(seg > 0.0,
                        ym * seg + (_chord_antiderivative(mid_end, r) - _chord_antiderivative(-b, r)),
                        0.0)
        # right band [b, x]: again fully covered only when y >= 0
        right = pos & (xm > b)
        acc[right] += 2.0 * (_chord_antiderivative(xm[right], r) - _chord_antiderivative(b[right], r))
        out[mid] = acc
    return out


def disk_cell_overlap(center, radius: float, x1, x2, y1, y2) -> np.ndarray:
    """Exact area of [x1,x2]x[y1,y2] intersected with the disk (vectorized)."""
    cx, cy = float(center[0]), float(center[1])
    x1 = np.asarray(x1, dtype=float) - cx
    x2 = np.asarray(x2, dtype=float) - cx
    y1 = np.asarray(y1, dtype=float) - cy
    y2 = np.asarray(y2, dtype=float) - cy
    return (_quadrant_area(x2, y2, radius) - _quadrant_area(x1, y2, radius)
            - _quadrant_area(x2, y1, radius) + _quadrant_area(x1, y1, radius))


@lru_cache(maxsize=256)
def _disk_nodes_cached(cx: float, cy: float, radius: float, cell: float):
    half = int(math.ceil(radius / cell + 0.5))
    idx = np.arange(-half, half)
    ii, jj = np.meshgrid(idx, idx, indexing="ij")
    x1 = ii.ravel() * cell
    y1 = jj.ravel() * cell
    areas = disk_cell_overlap((0.0, 0.0), radius, x1, x1 + cell, y1, y1 + cell)
    keep = areas > 0.0
    nodes = np.stack([x1[keep] + 0.5 * cell + cx, y1[keep] + 0.5 * cell + cy], axis=1)
    weights = areas[keep]
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def disk_quadrature(obj: SmallObject, cell: float) -> tuple[np.ndarray, np.ndarray]:
    """Midpoint nodes and overlap-area weights for one disk."""
    return _disk_nodes_cached(float(obj.center[0]), float(obj.center[1]), float(obj.radius), float(cell))


def _resolve_cell(scene: Scene, k_b: float, cell: float | None) -> float:
    lam = 2.0 * math.pi / k_b
    min_r = min((o.radius for o in scene.objects), default=math.inf)
    if cell is None:
        cell = min(lam / 20.0, min_r / 2.0)
    limit = min(lam / 10.0, min_r / 2.0)
    if cell > limit * (1.0 + 1e-12):
        raise ConfigurationError(
            f"quadrature cell {cell} m too coarse; must be <= min(lambda/10, radius/2) = {limit:.6g} m")
    return float(cell)


def _station_clear_of_objects(scene: Scene, point) -> None:
    px, py = float(point[0]), float(point[1])
    for obj in scene.objects:
        if math.hypot(px - obj.center[0], py - obj.center[1]) <= obj.radius:
            raise DomainError("station lies inside an object disk")


def born_scattered(scene: Scene, k_b: float, emitter, receiver, cell: float | None = None) -> complex:
    """Scattered field at one receiver for one emitter, Born approximation."""
    _station_clear_of_objects(scene, emitter)
    _station_clear_of_objects(scene, receiver)
    total = 0.0 + 0.0j
    if scene.objects:
        cell = _resolve_cell(scene, k_b, cell)
        for obj in scene.objects:
            nodes, weights = disk_quadrature(obj, cell)
            g_rec = green_many(k_b, nodes, receiver)
            g_emit = green_many(k_b, nodes, emitter)
            # weights applied to the symmetric product so that swapping the
            # stations is bitwise exact
            total += (k_b * k_b * obj.contrast) * complex(np.sum(weights * (g_rec * g_emit)))
    for tgt in scene.point_targets:
        total += point_target_scattered(tgt.center, tgt.strength, k_b, emitter, receiver)
    return total


def point_target_scattered(center, strength: complex, k_b: float, emitter, receiver) -> complex:
    """Zero-radius limit: strength * k^2 * G(receiver, center) * G(center, emitter)."""
    return complex(strength) * k_b * k_b * green(k_b, receiver, center) * green(k_b, center, emitter)


def simulate_matrix(scene: Scene, config: ArrayConfig, medium: MediumParams,
                    f_hz: float, cell: float | None = None) -> MsrMatrix:
    """Masked MSR matrix of Born fields for every measurable station pair.

    Per-object contributions are computed once against all stations and
    accumulated in scene order, so a multi-object matrix is exactly the sum
    of the single-object matrices.
    """
    scene.validate_inside_rings(config)
    k_b = wavenumber(medium, f_hz)
    receivers = config.receiver_positions()
    emitters = config.emitter_positions()
    n_rec, n_emit = config.receiver_count, config.emitter_count
    entries = np.zeros((n_rec, n_emit), dtype=complex)

    if scene.objects:
        cell = _resolve_cell(scene, k_b, cell)
        for obj in scene.objects:
            nodes, weights = disk_quadrature(obj, cell)
            g_rec = np.stack([green_many(k_b, nodes, receivers[n]) for n in range(n_rec)])
            g_emit = np.stack([green_many(k_b, nodes, emitters[m]) for m in range(n_emit)])
            entries += (k_b * k_b * obj.contrast) * ((g_rec * weights) @ g_emit.T)
    for tgt in scene.point_targets:
        g_rec = green_many(k_b, receivers, tgt.center)
        g_emit = green_many(k_b, emitters, tgt.center)
        entries += (complex(tgt.strength) * k_b * k_b) * np.outer(g_rec, g_emit)

    mask = build_mask(config)
    entries[~mask] = 0.0
    return MsrMatrix(entries, mask, f_hz, config)


def load_scene(path) -> Scene:
    """Read a scene JSON file.

    Either a bare list of disk objects {center, radius, eps_rel} or an
    object with keys ``objects``, ``point_targets`` (entries
    {center, strength: [re, im]}) and ``region_half_width``.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: not valid JSON ({exc})") from exc
    if isinstance(raw, list):
        raw = {"objects": raw}
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: scene must be a JSON object or list")
    try:
        objects = [
            SmallObject(center=(float(o["center"][0]), float(o["center"][1])),
                        radius=float(o["radius"]),
                        eps_rel=float(o.get("eps_rel", 3.0)))
            for o in raw.get("objects", [])
        ]
        targets = []
        for t in raw.get("point_targets", []):
            strength = t.get("strength", None)
            if strength is None:
                tgt = PointTarget(center=(float(t["center"][0]), float(t["center"][1])))
            else:
                tgt = PointTarget(center=(float(t["center"][0]), float(t["center"][1])),
                                  strength=complex(float(strength[0]), float(strength[1])))
            targets.append(tgt)
        return Scene(objects=objects, point_targets=targets,
                     region_half_width=float(raw.get("region_half_width", 0.2)))
    except (KeyError, TypeError, IndexError) as exc:
        raise ConfigurationError(f"{path}: malformed scene entry ({exc!r})") from exc


def save_scene(scene: Scene, path) -> None:
    doc = {
        "region_half_width": scene.region_half_width,
        "objects": [
            {"center": [o.center[0], o.center[1]], "radius": o.radius, "eps_rel": o.eps_rel}
            for o in scene.objects
        ],
        "point_targets": [
            {"center": [t.center[0], t.center[1]],
             "strength": [complex(t.strength).real, complex(t.strength).imag]}
            for t in scene.point_targets
        ],
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def require_point_scene(scene: Scene) -> None:
    """Reject disk scenes where only point targets are supported."""
    if scene.objects:
        raise UnsupportedSceneError(
            "this command supports point-target scenes only; replace disks with "
            "point_targets entries (strength ~ pi*r^2*(eps_rel-1))")
    if not scene.point_targets:
        raise UnsupportedSceneError("scene contains no point targets")
