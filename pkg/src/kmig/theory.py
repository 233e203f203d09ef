"""Bessel-series structure of the limited-aperture migration map.

For the default 240-degree aperture the single-target point spread admits a
closed series form: J0(k d)^2 plus (3/pi) * sum over p of (1/p) J_p(k d)^2
sin(2 p pi / 3), where d is the distance to the target. Every third term
vanishes exactly. The same Jacobi-Anger machinery gives the closed form of
the aperture integral of e^{i x cos(theta - phi)}, which is what the
discrete receiver sums approximate. These routines let the migration maps
be checked against their predicted shape.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import specfun
from .errors import DomainError
from .geometry import ArrayConfig
from .gridio import GridRegion, ImageGrid, grid_points, make_grid_axes
from .msr import index_set

_SQRT3_HALF = math.sqrt(3.0) / 2.0


class TruncationWarning(UserWarning):
    """Series truncated below its safe order for the requested argument."""


@dataclass(frozen=True)
class SeriesTruncation:
    """Cutoff order for the point-spread series with a certified tail bound."""

    max_order: int
    tail_bound: float

    @staticmethod
    def for_scale(k_b: float, max_distance: float) -> "SeriesTruncation":
        """Default cutoff max(60, ceil(3 k d)) with its tail bound, capped at
        the supported Bessel order."""
        x_max = k_b * max_distance
        order = max(60, int(math.ceil(3.0 * x_max)))
        if order > specfun.ORDER_CAP:
            order = specfun.ORDER_CAP
            warnings.warn(f"series order capped at {order} for k*d = {x_max:.1f}; "
                          f"tail bound {tail_bound_at(order, x_max):.2e}",
                          TruncationWarning, stacklevel=2)
        return SeriesTruncation(order, tail_bound_at(order, x_max))


def tail_bound_at(max_order: int, x_max: float) -> float:
    """Upper bound on the dropped tail sum_{p>P} (3/(pi p)) J_p(x)^2 for
    |x| <= x_max, from the envelope |J_p(x)| <= (x/2)^p / p!."""
    x = abs(float(x_max))
    if x == 0.0:
        return 0.0
    total = 0.0
    log_t = (max_order + 1) * math.log(0.5 * x) - math.lgamma(max_order + 2)
    last = 0.0
    for p in range(max_order + 1, max_order + 201):
        term = (3.0 / (math.pi * p)) * math.exp(2.0 * log_t)
        total += term
        last = term
        log_t += math.log(0.5 * x) - math.log(p + 1)
    # ratio of squared envelopes beyond the window
    ratio = (0.5 * x / (max_order + 201)) ** 2
    if ratio < 1.0:
        total += last * ratio / (1.0 - ratio)
    return total


def _kernel_from_rows(rows: np.ndarray) -> np.ndarray:
    """Series value from precomputed Bessel rows J_0..J_P (last axis)."""
    out = rows[..., 0] ** 2
    max_order = rows.shape[-1] - 1
    acc = np.zeros_like(out)
    for p in range(1, max_order + 1):
        if p % 3 == 0:
            continue  # sin(2 p pi / 3) = 0 exactly
        sign = _SQRT3_HALF if p % 3 == 1 else -_SQRT3_HALF
        acc += (sign / p) * rows[..., p] ** 2
    return out + (3.0 / math.pi) * acc


def structure_kernel(x, y, k_b: float, trunc: SeriesTruncation) -> float:
    """Predicted point-spread value at trial point x for a target at y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    arg = k_b * math.hypot(x[0] - y[0], x[1] - y[1])
    if trunc.max_order < 3.0 * arg:
        warnings.warn(
            f"series order {trunc.max_order} below 3*k*d = {3 * arg:.1f}; "
            f"tail bound {tail_bound_at(trunc.max_order, arg):.2e}",
            TruncationWarning, stacklevel=2)
    rows = specfun.bessel_j_rows(trunc.max_order, arg)
    return float(_kernel_from_rows(rows)[0])


def kernel_profile(distances, k_b: float, trunc: SeriesTruncation) -> np.ndarray:
    """Vectorized point-spread values for an array of distances (m)."""
    arg = k_b * np.asarray(distances, dtype=float)
    rows = specfun.bessel_j_rows(trunc.max_order, arg)
    return _kernel_from_rows(rows)


def theory_map(targets, region: GridRegion | None = None, spacing: float = 0.002,
               k_b: float = 1.0, trunc: SeriesTruncation | None = None) -> ImageGrid:
    """Predicted map |sum_s weight_s * kernel(x, y_s)| on a pixel grid.

    ``targets`` is a sequence of ((x, y), weight) pairs with complex
    weights; the grid layout matches km_map so maps are directly diffable.
    """
    region = region or GridRegion()
    origin, count = make_grid_axes(region, spacing)
    pts = grid_points(origin, spacing, count, count)
    max_dist = 0.0
    for (cx, cy), _ in targets:
        max_dist = max(max_dist, np.hypot(pts[..., 0] - cx, pts[..., 1] - cy).max())
    if trunc is None:
        trunc = SeriesTruncation.for_scale(k_b, max_dist)
    elif trunc.max_order < 3.0 * k_b * max_dist:
        warnings.warn(
            f"series order {trunc.max_order} below 3*k*d = {3 * k_b * max_dist:.1f}",
            TruncationWarning, stacklevel=2)
    total = np.zeros((count, count), dtype=complex)
    for (cx, cy), weight in targets:
        dist = np.hypot(pts[..., 0] - cx, pts[..., 1] - cy)
        total += complex(weight) * kernel_profile(dist, k_b, trunc)
    grid = ImageGrid((origin[0], origin[1]), spacing, np.abs(total),
                     meta={"kind": "theory_map", "series_order": trunc.max_order,
                           "series_tail_bound": trunc.tail_bound})
    return grid.normalized()


def structure_prefactor(config: ArrayConfig) -> float:
    """Absolute-scale constant 1 / (24 R E) dropped from normalized maps."""
    return 1.0 / (24.0 * config.receiver_radius * config.emitter_radius)


def jacobi_anger_partial(x: float, phi: float, theta_start: float, theta_end: float,
                         trunc: SeriesTruncation) -> complex:
    """Closed series form of the integral of e^{i x cos(theta - phi)} over
    [theta_start, theta_end] (radians)."""
    span = theta_end - theta_start
    if not 0.0 < span <= 2.0 * math.pi + 1e-12:
        raise DomainError("window must satisfy 0 < theta_end - theta_start <= 2*pi")
    x = float(x)
    rows = specfun.bessel_j_rows(trunc.max_order, abs(x))[0]
    if x < 0.0:
        rows = rows * np.where(np.arange(trunc.max_order + 1) % 2 == 1, -1.0, 1.0)
    total = complex(span * rows[0])
    mid = 0.5 * (theta_end + theta_start) - phi
    half = 0.5 * span
    ip = 1.0 + 0.0j
    for p in range(1, trunc.max_order + 1):
        ip *= 1.0j
        total += (4.0 * ip / p) * rows[p] * math.cos(p * mid) * math.sin(p * half)
    return total


class ApertureComparison(NamedTuple):
    discrete_sum: complex
    series: complex
    gap: float


def aperture_sum_vs_series(x: float, phi: float, config: ArrayConfig, m: int,
                           trunc: SeriesTruncation) -> ApertureComparison:
    """Discrete receiver-aperture sum against its closed integral form.

    The sum runs over the receivers measurable for emitter m; the series is
    the aperture integral over the same angular window, which the sum
    approximates up to the receiver step factor. ``gap`` is
    |step * discrete_sum - series|.
    """
    step = math.radians(config.receiver_step_deg)
    if abs(x) * step > 0.5 * math.pi:
        warnings.warn(f"phase step x*receiver_step = {abs(x) * step:.2f} exceeds pi/2; "
                      "the discrete sum undersamples the integrand", stacklevel=2)
    angles = [config.receiver_angle(n) for n in sorted(index_set(m, config))]
    discrete = complex(np.sum(np.exp(1j * x * np.cos(np.asarray(angles) - phi))))
    theta_m = config.emitter_angle(m)
    series = jacobi_anger_partial(
        x, phi,
        theta_m + math.radians(config.aperture_start_deg),
        theta_m + math.radians(config.aperture_end_deg),
        trunc)
    return ApertureComparison(discrete, series, abs(step * discrete - series))
