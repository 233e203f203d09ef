"""Integer-order Bessel functions of the first kind and the zero-order
Hankel function of the first kind.

These are the numerical kernels behind the Green's functions, the steering
vectors and the point-spread series. Bessel J is computed by Miller's
downward recurrence normalized with the Neumann sum; Y0 by its logarithmic
power series for small arguments and the standard asymptotic expansion for
large ones. No external special-function library is used at runtime.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

ORDER_CAP = 256
ARGUMENT_CAP = 1.0e4

EULER_GAMMA = 0.5772156649015328606

# Y0 branch switch; series and asymptotic expansion agree to ~1e-12 here.
_Y0_SWITCH = 12.0

# Rescale threshold for the downward recurrence (values grow toward p=0).
_RESCALE_LIMIT = 1.0e250
_RESCALE_FACTOR = 1.0e-250


def _check_order(p: int) -> int:
    if not isinstance(p, (int, np.integer)):
        raise DomainError(f"Bessel order must be an integer, got {p!r}")
    if p < 0 or p > ORDER_CAP:
        raise DomainError(f"Bessel order {p} outside [0, {ORDER_CAP}]")
    return int(p)


def _check_argument(x: float) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"Bessel argument must be finite, got {x!r}")
    if abs(x) > ARGUMENT_CAP:
        raise DomainError(f"|x| = {abs(x)} exceeds cap {ARGUMENT_CAP}")
    return x


def _miller_start(max_order: int, x_max: float) -> int:
    # Start above both the requested order and the oscillatory turning
    # point (order ~ x), with the usual safety margin.
    base = max(max_order, int(math.ceil(x_max)))
    return base + 20 + int(math.ceil(10.0 * math.sqrt(max(max_order, x_max, 1.0))))


def bessel_j_rows(max_order: int, x) -> np.ndarray:
    """J_0..J_max_order for every entry of ``x``.

    Returns an array of shape ``x.shape + (max_order + 1,)``. One downward
    recurrence per entry, so a whole row costs O(start order).
    """
    max_order = _check_order(max_order)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(x)):
        raise DomainError("Bessel argument must be finite")
    ax = np.abs(x)
    if np.any(ax > ARGUMENT_CAP):
        raise DomainError(f"|x| exceeds cap {ARGUMENT_CAP}")

    shape = x.shape
    flat = ax.reshape(-1)
    n = flat.size
    rows = np.zeros((n, max_order + 1))

    nonzero = flat > 0.0
    rows[~nonzero, 0] = 1.0  # J_0(0) = 1, J_p(0) = 0

    if np.any(nonzero):
        xs = flat[nonzero]
        m = xs.size
        start = _miller_start(max_order, float(xs.max()))
        inv_x = 1.0 / xs

        f_hi = np.zeros(m)             # f_{p+1}
        f_cur = np.full(m, 1.0e-30)    # f_p, arbitrary seed
        neumann = np.zeros(m)          # f_0 + 2*sum of even-order f
        sub = np.zeros((m, max_order + 1))
        if start % 2 == 0:
            neumann += 2.0 * f_cur
        if start <= max_order:
            sub[:, start] = f_cur

        for p in range(start, 0, -1):
            f_lo = (2.0 * p) * inv_x * f_cur - f_hi
            f_hi = f_cur
            f_cur = f_lo
            q = p - 1
            if q == 0:
                neumann += f_cur
            elif q % 2 == 0:
                neumann += 2.0 * f_cur
            if q <= max_order:
                sub[:, q] = f_cur
            big = np.abs(f_cur) > _RESCALE_LIMIT
            if np.any(big):
                f_cur[big] *= _RESCALE_FACTOR
                f_hi[big] *= _RESCALE_FACTOR
                neumann[big] *= _RESCALE_FACTOR
                sub[big, :] *= _RESCALE_FACTOR

        sub /= neumann[:, None]
        rows[nonzero] = sub

    # J_p(-x) = (-1)^p J_p(x)
    neg = (x.reshape(-1) < 0.0) & nonzero
    if np.any(neg):
        rows[np.ix_(neg, np.arange(1, max_order + 1, 2))] *= -1.0

    return rows.reshape(shape + (max_order + 1,))


def bessel_j_row(max_order: int, x: float) -> np.ndarray:
    """J_0(x)..J_max_order(x) as a 1-D array."""
    return bessel_j_rows(max_order, _check_argument(x))[0]


def bessel_j(p: int, x: float) -> float:
    """Bessel function of the first kind of integer order ``p``."""
    p = _check_order(p)
    x = _check_argument(x)
    return float(bessel_j_row(p, x)[p])


def bessel_j0(x) -> np.ndarray:
    """Vectorized J_0."""
    return bessel_j_rows(0, x)[..., 0]


def _y0_series(z: np.ndarray) -> np.ndarray:
    # Y0(z) = (2/pi) [ (ln(z/2) + gamma) J0(z)
    #                  + sum_{k>=1} (-1)^{k+1} H_k (z^2/4)^k / (k!)^2 ]
    j0 = bessel_j0(z)
    q = 0.25 * z * z
    total = np.zeros_like(z)
    term = np.ones_like(z)     # (q^k) / (k!)^2
    harmonic = 0.0
    for k in range(1, 80):
        term = term * q / (k * k)
        harmonic += 1.0 / k
        contrib = ((-1.0) ** (k + 1)) * harmonic * term
        total += contrib
        if np.all(np.abs(contrib) < 1e-20 * (1.0 + np.abs(total))):
            break
    return (2.0 / math.pi) * ((np.log(0.5 * z) + EULER_GAMMA) * j0 + total)


def _y0_asymptotic(z: np.ndarray) -> np.ndarray:
    # Y0(z) ~ sqrt(2/(pi z)) [ P(z) sin(z - pi/4) + Q(z) cos(z - pi/4) ]
    # with the order-zero Hankel coefficients a_k = (-1)^k [(2k-1)!!]^2/(k! 8^k);
    # the divergent tail is cut at the smallest term.
    omega = z - 0.25 * math.pi
    p_sum = np.ones_like(z)
    q_sum = np.zeros_like(z)
    a = 1.0               # |a_k|
    zpow = np.ones_like(z)
    prev = np.full_like(z, np.inf)
    active = np.ones(z.shape, dtype=bool)  # cut each lane at its smallest term
    for k in range(1, 40):
        a *= (2 * k - 1) ** 2 / (8.0 * k)
        zpow = zpow / z
        term = a * zpow
        active &= term < prev
        if not np.any(active):
            break
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 1:
            q_sum = np.where(active, q_sum - sign * term, q_sum)
        else:
            p_sum = np.where(active, p_sum + sign * term, p_sum)
        prev = term
    amp = np.sqrt(2.0 / (math.pi * z))
    return amp * (p_sum * np.sin(omega) + q_sum * np.cos(omega))


def bessel_y0(z) -> np.ndarray:
    """Vectorized Y_0 for strictly positive arguments."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any(~np.isfinite(z)) or np.any(z <= 0.0):
        raise DomainError("Y0 requires finite z > 0")
    out = np.empty_like(z)
    small = z <= _Y0_SWITCH
    if np.any(small):
        out[small] = _y0_series(z[small])
    if np.any(~small):
        out[~small] = _y0_asymptotic(z[~small])
    return out


def hankel1_0(z: float) -> complex:
    """H_0^(1)(z) = J_0(z) + i Y_0(z) for z > 0."""
    z = float(z)
    if not math.isfinite(z) or z <= 0.0:
        raise DomainError(f"hankel1_0 requires z > 0, got {z!r}")
    return complex(bessel_j(0, z), float(bessel_y0(z)[0]))


def hankel1_0_many(z) -> np.ndarray:
    """Vectorized H_0^(1) for strictly positive arguments."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    return bessel_j0(z) + 1j * bessel_y0(z)


def hankel1_0_asymptotic(k: float, station, x, ring_radius: float) -> complex:
    """Far-field plane-wave approximation of H_0^(1)(k |x - station|).

    ``station`` sits on a ring of radius ``ring_radius`` about the origin;
    the returned value is (1-i) e^{i k rho} / sqrt(k rho pi) * e^{-i k t.x}
    with rho the ring radius and t the unit direction of the station.
    """
    k = float(k)
    rho = float(ring_radius)
    if k * rho < 1.0:
        raise DomainError(f"asymptotic form needs k*ring_radius >= 1, got {k * rho}")
    station = np.asarray(station, dtype=float)
    x = np.asarray(x, dtype=float)
    direction = station / np.hypot(station[0], station[1])
    phase = k * float(direction @ x)
    amp = (1.0 - 1.0j) * np.exp(1j * k * rho) / math.sqrt(k * rho * math.pi)
    return complex(amp * np.exp(-1j * phase))
