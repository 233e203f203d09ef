"""Kirchhoff-migration imaging functional over a pixel grid.

The map value at a trial point is |g_R . K . g_E| where g_R, g_E are
conjugated Green's-function steering vectors to the receiver and emitter
rings and K is the masked response matrix. The asymptotic variant replaces
the Hankel functions by their far-field plane-wave form, which is the
regime of the Bessel-series point-spread analysis; the exact variant keeps
the full Green's functions.

Per pixel the summation runs receivers-then-emitters in fixed order, so
maps are bit-identical across runs and worker counts.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import ConfigurationError, DomainError
from .geometry import ArrayConfig, MediumParams, default_medium, wavenumber
from .gridio import GridRegion, ImageGrid, make_grid_axes
from .msr import MsrMatrix

VARIANTS = ("asymptotic", "exact")

# Far-field validity floor for the asymptotic steering variant.
_MIN_K_RADIUS = 10.0


@dataclass(frozen=True)
class SteeringVectors:
    """Conjugated Green's-function test vectors for one trial point."""

    receiver_vector: np.ndarray   # complex (N,)
    emitter_vector: np.ndarray    # complex (M,)
    variant: str


def _check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise ConfigurationError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return variant


def _ring_vectors(points: np.ndarray, stations: np.ndarray, ring_radius: float,
                  k_b: float, variant: str) -> np.ndarray:
    """Steering entries for many trial points, shape (len(points), len(stations))."""
    if variant == "exact":
        dist = np.hypot(points[:, None, 0] - stations[None, :, 0],
                        points[:, None, 1] - stations[None, :, 1])
        if np.any(dist == 0.0):
            raise DomainError("trial point coincides with a station (exact variant)")
        h = specfun.hankel1_0_many((k_b * dist).ravel()).reshape(dist.shape)
        return np.conj(-0.25j * h)
    if k_b * ring_radius < _MIN_K_RADIUS:
        raise ConfigurationError(
            f"asymptotic steering needs k*ring_radius >= {_MIN_K_RADIUS}, got {k_b * ring_radius:.3g}")
    directions = stations / np.hypot(stations[:, 0], stations[:, 1])[:, None]
    amp = np.conj(-0.25j * (1.0 - 1.0j) * np.exp(1j * k_b * ring_radius)
                  / math.sqrt(k_b * ring_radius * math.pi))
    phase = points @ directions.T      # (P, stations)
    return amp * np.exp(1j * k_b * phase)


def steering(x, config: ArrayConfig, k_b: float, variant: str = "asymptotic") -> SteeringVectors:
    """Receiver and emitter steering vectors at one trial point."""
    variant = _check_variant(variant)
    x = np.asarray(x, dtype=float)
    if math.hypot(x[0], x[1]) >= min(config.receiver_radius, config.emitter_radius):
        raise DomainError("trial point must lie strictly inside both rings")
    pts = x[None, :]
    rec = _ring_vectors(pts, config.receiver_positions(), config.receiver_radius, k_b, variant)[0]
    emit = _ring_vectors(pts, config.emitter_positions(), config.emitter_radius, k_b, variant)[0]
    return SteeringVectors(rec, emit, variant)


def km_complex(x, matrix: MsrMatrix, variant: str = "asymptotic",
               medium: MediumParams | None = None) -> complex:
    """Complex pre-modulus migration value (internal accessor for bilinearity)."""
    medium = medium or default_medium()
    k_b = wavenumber(medium, matrix.frequency_hz)
    vec = steering(x, matrix.config, k_b, variant)
    per_emitter = vec.receiver_vector @ matrix.entries     # sum over n first
    return complex(per_emitter @ vec.emitter_vector)       # then over m


def km_value(x, matrix: MsrMatrix, variant: str = "asymptotic",
             medium: MediumParams | None = None) -> float:
    """Migration map value |g_R . K . g_E| at one trial point."""
    return abs(km_complex(x, matrix, variant, medium))


def _worker_count(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("KMIG_WORKERS")
    return max(1, int(env)) if env else 1


def km_map(matrix: MsrMatrix, region: GridRegion | None = None, spacing: float = 0.002,
           variant: str = "asymptotic", medium: MediumParams | None = None,
           workers: int | None = None) -> ImageGrid:
    """Max-normalized migration map over a square pixel grid.

    Rows of pixels are evaluated independently (optionally on a thread
    pool); each row uses fixed-shape vector products so the result does not
    depend on scheduling.
    """
    variant = _check_variant(variant)
    medium = medium or default_medium()
    region = region or GridRegion()
    origin, count = make_grid_axes(region, spacing)
    config = matrix.config
    corner = math.hypot(abs(region.cx) + region.half_width, abs(region.cy) + region.half_width)
    if corner >= min(config.receiver_radius, config.emitter_radius):
        raise ConfigurationError("grid region must lie strictly inside both rings")
    k_b = wavenumber(medium, matrix.frequency_hz)
    lam = 2.0 * math.pi / k_b
    if spacing > lam / 10.0:
        warnings.warn(f"grid spacing {spacing} m is coarser than lambda/10 = {lam / 10:.4g} m",
                      stacklevel=2)

    receivers = config.receiver_positions()
    emitters = config.emitter_positions()
    xs = origin[0] + spacing * np.arange(count)
    entries = matrix.entries
    values = np.empty((count, count))

    def eval_row(iy: int) -> None:
        pts = np.stack([xs, np.full(count, origin[1] + spacing * iy)], axis=1)
        g_rec = _ring_vectors(pts, receivers, config.receiver_radius, k_b, variant)
        g_emit = _ring_vectors(pts, emitters, config.emitter_radius, k_b, variant)
        per_emitter = g_rec @ entries                        # (count, M), n summed first
        values[iy] = np.abs(np.sum(per_emitter * g_emit, axis=1))

    n_workers = _worker_count(workers)
    if n_workers == 1:
        for iy in range(count):
            eval_row(iy)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(eval_row, range(count)))

    grid = ImageGrid((origin[0], origin[1]), spacing, values,
                     meta={"frequency_hz": matrix.frequency_hz, "variant": variant,
                           "kind": "km_map"})
    return grid.normalized()


def local_maxima(grid: ImageGrid, rel_threshold: float = 0.5,
                 min_separation: float = 0.02) -> list[tuple[float, float]]:
    """Pixel-level peaks: strictly above all 8 neighbors and above
    rel_threshold * max, greedily pruned to min_separation keeping the
    larger value. Returned sorted by descending value."""
    if not 0.0 < rel_threshold < 1.0:
        raise ConfigurationError("rel_threshold must be in (0, 1)")
    v = grid.values
    peak = float(v.max())
    if peak <= 0.0:
        return []
    core = v[1:-1, 1:-1]
    higher = np.ones(core.shape, dtype=bool)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            higher &= core > v[1 + dy:v.shape[0] - 1 + dy, 1 + dx:v.shape[1] - 1 + dx]
    higher &= core >= rel_threshold * peak
    iy, ix = np.nonzero(higher)
    candidates = sorted(
        ((float(core[a, b]), int(b) + 1, int(a) + 1) for a, b in zip(iy, ix)),
        key=lambda t: (-t[0], t[2], t[1]))
    accepted: list[tuple[float, float, float]] = []
    for val, gx, gy in candidates:
        px, py = grid.pixel_center(gx, gy)
        if all(math.hypot(px - ax, py - ay) >= min_separation for _, ax, ay in accepted):
            accepted.append((val, px, py))
    return [(x, y) for _, x, y in accepted]
