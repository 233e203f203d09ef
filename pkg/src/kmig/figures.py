"""Matplotlib rendering of maps, matrices and study summaries.

Figures are a viewing convenience next to the canonical CSV/PGM/JSON
outputs; they are rendered headless (Agg) straight to files.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .gridio import ImageGrid
from .msr import MsrMatrix


def _grid_extent(grid: ImageGrid):
    half = 0.5 * grid.spacing
    return [grid.origin[0] - half, grid.origin[0] + (grid.width - 1) * grid.spacing + half,
            grid.origin[1] - half, grid.origin[1] + (grid.height - 1) * grid.spacing + half]


def save_map_figure(grid: ImageGrid, path, title: str = "", markers=None) -> None:
    fig, ax = plt.subplots(figsize=(5.2, 4.4))
    im = ax.imshow(grid.values, origin="lower", extent=_grid_extent(grid),
                   cmap="jet", vmin=0.0, vmax=max(grid.values.max(), 1e-30))
    if markers:
        mx = [p[0] for p in markers]
        my = [p[1] for p in markers]
        ax.plot(mx, my, "wx", markersize=8, markeredgewidth=1.6)
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, label="normalized map value")
    fig.savefig(path, dpi=150, bbox_inches="tight", format="png")
    plt.close(fig)


def save_matrix_figure(matrix: MsrMatrix, path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(4.2, 5.6))
    mag = np.abs(matrix.entries)
    im = ax.imshow(mag, origin="upper", aspect="auto", cmap="jet")
    ax.set_xlabel("emitter index m")
    ax.set_ylabel("receiver index n")
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax, label="|entry|")
    fig.savefig(path, dpi=150, bbox_inches="tight", format="png")
    plt.close(fig)


def save_comparison_figure(measured: ImageGrid, predicted: ImageGrid, path,
                           title: str = "") -> None:
    fig, axes = plt.subplots(1, 2, figsize=(9.6, 4.2), sharey=True)
    for ax, grid, name in ((axes[0], measured, "migration map"),
                           (axes[1], predicted, "predicted point spread")):
        im = ax.imshow(grid.values, origin="lower", extent=_grid_extent(grid),
                       cmap="jet", vmin=0.0, vmax=1.0)
        ax.set_title(name)
        ax.set_xlabel("x (m)")
    axes[0].set_ylabel("y (m)")
    fig.colorbar(im, ax=axes, label="normalized value", fraction=0.03)
    if title:
        fig.suptitle(title)
    fig.savefig(path, dpi=150, bbox_inches="tight", format="png")
    plt.close(fig)


def save_study_figure(freqs_ghz, counts, expected: int, path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(freqs_ghz, counts, "o-", label="detected maxima")
    ax.axhline(expected, color="gray", linestyle="--", label=f"target count ({expected})")
    ax.set_xlabel("frequency (GHz)")
    ax.set_ylabel("local maxima")
    ax.set_ylim(bottom=0)
    ax.legend()
    if title:
        ax.set_title(title)
    fig.savefig(path, dpi=150, bbox_inches="tight", format="png")
    plt.close(fig)
