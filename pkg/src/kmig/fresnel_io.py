"""Ingestion of Fresnel-style measurement files.

A measurement file is whitespace-separated text: header/comment lines
start with '#' or a non-numeric token; data rows carry seven numeric
columns (emitter, receiver, frequency in GHz, Re/Im of the total field,
Re/Im of the incident field). Emitter/receiver columns may hold either
1-based indices or grid angles in degrees; the reading is auto-detected
per column over the whole file (all-integral values inside the index range
are treated as indices, anything else as degrees snapped to the station
grid within 0.1 degrees).

Scattered fields are total minus incident per record; a complex source
gain is estimated per frequency by least squares against the model
incident field (the Green's function between the station pair).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (AmbiguousDataError, CalibrationError, GeometryMismatchError,
                     ParseError)
from .specfun import hankel1_0_many
from .geometry import ArrayConfig, MediumParams, wavenumber

ANGLE_SNAP_DEG = 0.1
FREQ_MATCH_HZ = 1.0e6


@dataclass(frozen=True)
class FresnelRecord:
    """One measurement row."""

    emitter: int            # m, 1-based
    receiver: int           # n, 1-based
    frequency_hz: float
    total_field: complex
    incident_field: complex


@dataclass(frozen=True)
class CalibrationResult:
    """Complex source gain correction and its relative misfit."""

    factor: complex
    residual: float


def _try_float(token: str) -> float | None:
    try:
        return float(token)
    except ValueError:
        return None


def _station_index(value: float, count: int, step_deg: float, treat_as_index: bool,
                   lineno: int, what: str) -> int:
    if treat_as_index:
        return int(round(value))
    snapped = value % 360.0
    idx = int(round(snapped / step_deg))
    grid_deg = idx * step_deg
    off = abs(snapped - grid_deg)
    off = min(off, 360.0 - off)
    if off > ANGLE_SNAP_DEG:
        raise GeometryMismatchError(
            f"line {lineno}: {what} angle {value} deg is {off:.3f} deg off the "
            f"{step_deg}-degree grid (tolerance {ANGLE_SNAP_DEG})")
    return idx % count + 1


def _column_is_index(values: list[float], count: int) -> bool:
    return all(v == int(v) and 1 <= v <= count for v in values)


def parse_fresnel_file(data, config: ArrayConfig | None = None) -> list[FresnelRecord]:
    """Parse measurement text (bytes or str) into records."""
    config = config or ArrayConfig()
    if isinstance(data, bytes):
        data = data.decode("utf-8", errors="replace")
    rows: list[tuple[int, list[float]]] = []
    for lineno, line in enumerate(data.splitlines(), start=1):
        tokens = line.split()
        if not tokens or tokens[0].startswith("#"):
            continue
        first = _try_float(tokens[0])
        if first is None:
            continue  # header line
        values = [_try_float(t) for t in tokens]
        if any(v is None for v in values):
            raise ParseError(f"line {lineno}: non-numeric token in data row")
        if len(values) != 7:
            raise ParseError(f"line {lineno}: expected 7 columns "
                             f"(emitter, receiver, freq_ghz, re/im total, re/im incident), "
                             f"got {len(values)}")
        rows.append((lineno, values))
    if not rows:
        return []

    emit_as_index = _column_is_index([v[0] for _, v in rows], config.emitter_count)
    recv_as_index = _column_is_index([v[1] for _, v in rows], config.receiver_count)

    records = []
    for lineno, v in rows:
        m = _station_index(v[0], config.emitter_count, config.emitter_step_deg,
                           emit_as_index, lineno, "emitter")
        n = _station_index(v[1], config.receiver_count, config.receiver_step_deg,
                           recv_as_index, lineno, "receiver")
        if not 1 <= m <= config.emitter_count:
            raise GeometryMismatchError(f"line {lineno}: emitter index {m} out of range")
        if not 1 <= n <= config.receiver_count:
            raise GeometryMismatchError(f"line {lineno}: receiver index {n} out of range")
        records.append(FresnelRecord(
            emitter=m, receiver=n, frequency_hz=v[2] * 1.0e9,
            total_field=complex(v[3], v[4]), incident_field=complex(v[5], v[6])))
    return records


def read_fresnel_file(path, config: ArrayConfig | None = None) -> list[FresnelRecord]:
    try:
        return parse_fresnel_file(Path(path).read_bytes(), config)
    except ParseError as exc:
        raise ParseError(f"{path}: {exc}") from exc


def write_exp_file(records, path) -> None:
    """Write records in the measurement-file layout at full precision."""
    lines = ["# emitter receiver freq_ghz re_total im_total re_incident im_incident"]
    for r in records:
        lines.append(
            f"{r.emitter} {r.receiver} {float(r.frequency_hz) / 1e9!r} "
            f"{float(r.total_field.real)!r} {float(r.total_field.imag)!r} "
            f"{float(r.incident_field.real)!r} {float(r.incident_field.imag)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_records_csv(records, path) -> None:
    """Canonical records file: 9-significant-digit CSV."""
    lines = ["m,n,f_hz,re_tot,im_tot,re_inc,im_inc"]
    for r in records:
        lines.append(
            f"{r.emitter},{r.receiver},{r.frequency_hz:.9g},"
            f"{r.total_field.real:.9g},{r.total_field.imag:.9g},"
            f"{r.incident_field.real:.9g},{r.incident_field.imag:.9g}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_records_csv(path) -> list[FresnelRecord]:
    records = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("m,"):
            continue
        parts = line.split(",")
        if len(parts) != 7:
            raise ParseError(f"{path}:{lineno}: expected 7 columns, got {len(parts)}")
        records.append(FresnelRecord(
            emitter=int(parts[0]), receiver=int(parts[1]), frequency_hz=float(parts[2]),
            total_field=complex(float(parts[3]), float(parts[4])),
            incident_field=complex(float(parts[5]), float(parts[6]))))
    return records


def frequencies(records) -> list[float]:
    """Distinct frequencies present, ascending (Hz)."""
    return sorted({r.frequency_hz for r in records})


def records_at(records, f_hz: float):
    """Records whose frequency matches f_hz within the 1 MHz tolerance."""
    return [r for r in records if abs(r.frequency_hz - f_hz) <= FREQ_MATCH_HZ]


def scattered_from_records(records) -> dict[float, dict[tuple[int, int], complex]]:
    """Per-frequency scattered fields, u = total - incident per record."""
    out: dict[float, dict[tuple[int, int], complex]] = {}
    for r in records:
        per_f = out.setdefault(r.frequency_hz, {})
        key = (r.emitter, r.receiver)
        if key in per_f:
            raise AmbiguousDataError(
                f"duplicate record for emitter {r.emitter}, receiver {r.receiver} "
                f"at {r.frequency_hz} Hz")
        per_f[key] = r.total_field - r.incident_field
    return out


def _model_incident_fields(pairs, config: ArrayConfig, k_b: float) -> np.ndarray:
    """Green's function between each (emitter, receiver) pair, vectorized."""
    emitters = config.emitter_positions()
    receivers = config.receiver_positions()
    e = emitters[[m - 1 for m, _ in pairs]]
    r = receivers[[n - 1 for _, n in pairs]]
    dist = np.hypot(e[:, 0] - r[:, 0], e[:, 1] - r[:, 1])
    return -0.25j * hankel1_0_many(k_b * dist)


def calibrate(records, config: ArrayConfig, medium: MediumParams) -> CalibrationResult:
    """Complex factor minimizing |c * measured_incident - model_incident|^2.

    ``records`` must share one frequency. The residual is the relative
    least-squares misfit in [0, 1].
    """
    freqs = frequencies(records)
    if len(freqs) != 1:
        raise CalibrationError(f"calibration needs records at one frequency, got {len(freqs)}")
    usable = [r for r in records if r.incident_field != 0]
    if not usable:
        raise CalibrationError("all measured incident fields are zero")
    if len(usable) < 8:
        raise CalibrationError(f"calibration needs >= 8 nonzero incident records, got {len(usable)}")
    k_b = wavenumber(medium, freqs[0])
    measured = np.array([r.incident_field for r in usable])
    model = _model_incident_fields([(r.emitter, r.receiver) for r in usable], config, k_b)
    factor = complex(np.vdot(measured, model) / np.vdot(measured, measured))
    residual = float(np.linalg.norm(factor * measured - model) / np.linalg.norm(model))
    return CalibrationResult(factor=factor, residual=residual)


def synthesize_records(matrix_fields: dict[tuple[int, int], complex], config: ArrayConfig,
                       medium: MediumParams, f_hz: float, gain: complex = 1.0) -> list[FresnelRecord]:
    """Measurement records for given scattered fields.

    The incident field is gain times the model Green's function and the
    total field is incident plus gain times the scattered field, which is
    how a raw measurement with an unknown source gain presents itself.
    """
    k_b = wavenumber(medium, f_hz)
    gain = complex(gain)
    pairs = sorted(matrix_fields)
    model = _model_incident_fields(pairs, config, k_b)
    records = []
    for (m, n), g in zip(pairs, model):
        inc = gain * complex(g)
        tot = inc + gain * matrix_fields[(m, n)]
        records.append(FresnelRecord(emitter=m, receiver=n, frequency_hz=f_hz,
                                     total_field=tot, incident_field=inc))
    return records


def filter_band(records, f_lo_hz: float, f_hi_hz: float):
    """Records whose frequency lies in [f_lo, f_hi] (1 MHz slack)."""
    return [r for r in records
            if f_lo_hz - FREQ_MATCH_HZ <= r.frequency_hz <= f_hi_hz + FREQ_MATCH_HZ]


def apply_calibration(fields: dict[tuple[int, int], complex], factor: complex) -> dict:
    """Scale scattered fields by the calibration factor."""
    return {key: factor * val for key, val in fields.items()}
