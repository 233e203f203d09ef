"""Masked multi-static response matrix.

Entry (n, m) holds the scattered field at receiver n for emitter m.
Receivers outside the aperture window of emitter m are unmeasurable; those
entries are zero-filled and flagged false in the validity mask. Under the
default array each emitter sees exactly 49 of the 72 receivers.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, IncompleteDataError, ParseError
from .geometry import ArrayConfig


def index_set(m: int, config: ArrayConfig) -> set[int]:
    """Receiver indices measurable when emitter m transmits.

    A receiver at absolute angle a is measurable if a - (emitter angle)
    falls inside the aperture window mod 360. For the default layout this
    is {2m+p mod 72 : p = 11..59} in 1-based indexing, 49 indices.
    """
    if not 1 <= m <= config.emitter_count:
        raise DomainError(f"emitter index {m} outside 1..{config.emitter_count}")
    emitter_deg = config.emitter_step_deg * (m - 1)
    out = set()
    for n in range(1, config.receiver_count + 1):
        offset = (config.receiver_step_deg * (n - 1) - emitter_deg) % 360.0
        if config.aperture_start_deg - 1e-9 <= offset <= config.aperture_end_deg + 1e-9:
            out.add(n)
    return out


def build_mask(config: ArrayConfig) -> np.ndarray:
    """Boolean validity mask, shape (receiver_count, emitter_count)."""
    mask = np.zeros((config.receiver_count, config.emitter_count), dtype=bool)
    for m in range(1, config.emitter_count + 1):
        for n in index_set(m, config):
            mask[n - 1, m - 1] = True
    return mask


@dataclass(frozen=True)
class MsrMatrix:
    """N x M complex scattered-field matrix with validity mask."""

    entries: np.ndarray        # complex (N, M), zero where mask is false
    mask: np.ndarray           # bool (N, M), true = measured
    frequency_hz: float
    config: ArrayConfig

    def __post_init__(self):
        n, m = self.config.receiver_count, self.config.emitter_count
        if self.entries.shape != (n, m) or self.mask.shape != (n, m):
            raise DomainError(f"matrix shape must be ({n}, {m})")
        if np.any(self.entries[~self.mask] != 0.0):
            raise DomainError("unmeasured entries must be zero-filled")

    @property
    def measured_count(self) -> int:
        return int(self.mask.sum())

    def scaled(self, alpha: complex) -> "MsrMatrix":
        return MsrMatrix(self.entries * alpha, self.mask, self.frequency_hz, self.config)


def assemble(fields, config: ArrayConfig, frequency_hz: float) -> MsrMatrix:
    """Build the masked matrix from per-(m, n) scattered fields.

    ``fields`` is a mapping {(m, n): complex} or a callable f(m, n), defined
    at least on every measurable pair. Values supplied outside the mask are
    ignored (zero-filled).
    """
    getter = fields.get if hasattr(fields, "get") else lambda key: fields(*key)
    n_rec, n_emit = config.receiver_count, config.emitter_count
    entries = np.zeros((n_rec, n_emit), dtype=complex)
    mask = np.zeros((n_rec, n_emit), dtype=bool)
    missing = []
    for m in range(1, n_emit + 1):
        for n in index_set(m, config):
            value = getter((m, n))
            if value is None:
                missing.append((m, n))
                continue
            entries[n - 1, m - 1] = complex(value)
            mask[n - 1, m - 1] = True
    if missing:
        shown = ", ".join(f"(m={m}, n={n})" for m, n in missing[:8])
        more = "" if len(missing) <= 8 else f" and {len(missing) - 8} more"
        raise IncompleteDataError(f"missing measured entries: {shown}{more}")
    return MsrMatrix(entries, mask, frequency_hz, config)


def write_matrix_csv(matrix: MsrMatrix, path) -> None:
    """Dump as CSV rows `n,m,re,im,measured` with a metadata header."""
    lines = [
        f"# frequency_hz = {matrix.frequency_hz!r}",
        f"# receiver_count = {matrix.config.receiver_count}",
        f"# emitter_count = {matrix.config.emitter_count}",
        "n,m,re,im,measured",
    ]
    for n in range(matrix.config.receiver_count):
        for m in range(matrix.config.emitter_count):
            v = matrix.entries[n, m]
            lines.append(f"{n + 1},{m + 1},{float(v.real)!r},{float(v.imag)!r},"
                         f"{int(matrix.mask[n, m])}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_matrix_csv(path, config: ArrayConfig) -> MsrMatrix:
    """Read a matrix dump produced by write_matrix_csv."""
    frequency_hz = None
    n_rec, n_emit = config.receiver_count, config.emitter_count
    entries = np.zeros((n_rec, n_emit), dtype=complex)
    mask = np.zeros((n_rec, n_emit), dtype=bool)
    seen_header = False
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line.lstrip("#").strip()
            if body.startswith("frequency_hz"):
                frequency_hz = float(body.split("=", 1)[1])
            elif body.startswith("receiver_count"):
                if int(body.split("=", 1)[1]) != n_rec:
                    raise ParseError(f"{path}: dump holds {body.strip()}, "
                                     f"config expects {n_rec}")
            elif body.startswith("emitter_count"):
                if int(body.split("=", 1)[1]) != n_emit:
                    raise ParseError(f"{path}: dump holds {body.strip()}, "
                                     f"config expects {n_emit}")
            continue
        if not seen_header:
            if line.replace(" ", "") != "n,m,re,im,measured":
                raise ParseError(f"{path}:{lineno}: expected header 'n,m,re,im,measured'")
            seen_header = True
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ParseError(f"{path}:{lineno}: expected 5 columns, got {len(parts)}")
        try:
            n, m = int(parts[0]), int(parts[1])
            re, im, measured = float(parts[2]), float(parts[3]), int(parts[4])
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
        if not (1 <= n <= n_rec and 1 <= m <= n_emit):
            raise ParseError(f"{path}:{lineno}: index (n={n}, m={m}) out of range")
        entries[n - 1, m - 1] = complex(re, im)
        mask[n - 1, m - 1] = bool(measured)
    if frequency_hz is None:
        raise ParseError(f"{path}: missing '# frequency_hz = ...' metadata line")
    return MsrMatrix(entries, mask, frequency_hz, config)


def write_magnitude_pgm(matrix: MsrMatrix, path) -> None:
    """16-bit PGM of |entries|, max-normalized; rows are receiver index
    (n = 1 on top), columns emitter index."""
    mag = np.abs(matrix.entries)
    peak = mag.max()
    if peak > 0.0:
        mag = mag / peak
    levels = np.round(mag * 65535.0).astype(">u2")
    header = f"P5\n{levels.shape[1]} {levels.shape[0]}\n65535\n".encode("ascii")
    Path(path).write_bytes(header + levels.tobytes())


def profile_counts(config: ArrayConfig) -> np.ndarray:
    """Measured-entry count per emitter column."""
    return build_mask(config).sum(axis=0)
