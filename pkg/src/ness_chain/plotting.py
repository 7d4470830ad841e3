"""Figure rendering for sweep outputs.

Two renderers live here: a dependency-free SVG raster writer whose document
dimensions are exactly ``grid counts x cell size`` (the machine-checkable
artifact), and matplotlib report figures with axes and a colorbar (the
human-readable ones).  Rendering is deterministic: fixed hash salt, no
timestamps in the SVG metadata.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

plt.rcParams["svg.hashsalt"] = "ness-chain"
plt.rcParams["figure.dpi"] = 110

_NAN_COLOR = (128, 128, 128)
# three-stop linear gradient, dark violet -> orange -> yellow
_STOPS = ((13, 8, 135), (225, 100, 98), (240, 249, 33))


def _lerp(lo, hi, t):
    return tuple(int(round(a + (b - a) * t)) for a, b in zip(lo, hi))


def _color(value, vmin, vmax):
    if not np.isfinite(value):
        return _NAN_COLOR
    if vmax <= vmin:
        t = 0.5
    else:
        t = min(max((value - vmin) / (vmax - vmin), 0.0), 1.0)
    if t < 0.5:
        return _lerp(_STOPS[0], _STOPS[1], 2.0 * t)
    return _lerp(_STOPS[1], _STOPS[2], 2.0 * t - 1.0)


def write_svg_heatmap(values, path, x_name="param1", y_name="param2", cell_size=6):
    """Self-contained SVG heatmap, one rect per grid cell, linear color scale.

    ``values`` has shape (n_y, n_x) with NaN for missing points.  The SVG
    width/height equal ``n_x * cell_size`` by ``n_y * cell_size``; the first
    value row is drawn at the bottom (y axis increases upward).  Axis labels
    are embedded as text elements inside the raster.
    """
    grid = np.asarray(values, dtype=float)
    if grid.ndim != 2 or grid.size == 0:
        raise ValueError("heatmap needs a nonempty 2-D value grid")
    n_y, n_x = grid.shape
    width = n_x * cell_size
    height = n_y * cell_size
    finite = grid[np.isfinite(grid)]
    vmin = float(finite.min()) if finite.size else 0.0
    vmax = float(finite.max()) if finite.size else 1.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{y_name} vs {x_name}; range [{vmin!r}, {vmax!r}]</title>",
    ]
    for iy in range(n_y):
        for ix in range(n_x):
            r, g, b = _color(grid[iy, ix], vmin, vmax)
            x = ix * cell_size
            y = (n_y - 1 - iy) * cell_size
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell_size}" height="{cell_size}" '
                f'fill="rgb({r},{g},{b})"/>'
            )
    font = max(cell_size + 2, 8)
    parts.append(
        f'<text x="{width // 2}" y="{height - 2}" font-size="{font}" '
        f'text-anchor="middle" fill="black">{x_name}</text>'
    )
    parts.append(
        f'<text x="2" y="{height // 2}" font-size="{font}" fill="black" '
        f'transform="rotate(-90 {font} {height // 2})">{y_name}</text>'
    )
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
    return path


def save_heatmap_figure(values, path, x_axis, y_axis, title="", cmap="viridis"):
    """Annotated matplotlib heatmap (axes from the grid definition, colorbar)."""
    grid = np.asarray(values, dtype=float)
    fig, ax = plt.subplots(figsize=(4.6, 3.8))
    im = ax.imshow(
        grid,
        origin="lower",
        aspect="auto",
        interpolation="nearest",
        extent=(x_axis.min, x_axis.max, y_axis.min, y_axis.max),
        cmap=cmap,
    )
    ax.set_xlabel(x_axis.name)
    ax.set_ylabel(y_axis.name)
    if title:
        ax.set_title(title)
    fig.colorbar(im, ax=ax)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None} if path.endswith(".svg") else None)
    plt.close(fig)
    return path


def save_line_figure(x, series, path, x_label, y_label, title=""):
    """Simple multi-series line plot used by the crest and scan reports."""
    fig, ax = plt.subplots(figsize=(4.6, 3.2))
    for label, y in series.items():
        ax.plot(x, y, lw=1.2, label=label)
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, metadata={"Date": None} if path.endswith(".svg") else None)
    plt.close(fig)
    return path
