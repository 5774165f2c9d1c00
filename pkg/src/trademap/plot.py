"""Standalone SVG scatter maps of embeddings.

The renderer consumes a finished embedding, so color and label side files
can only affect how markers look, never where they sit.  Output is plain
deterministic SVG text: element order follows roster order and floats are
formatted to fixed precision, making the files diffable in tests.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from .embedding import Embedding

LABEL_MODES = ("code", "full-name", "none")

#: Marker colors cycled over color groups in sorted group order.
PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#e377c2",
    "#bcbd22",
    "#7f7f7f",
)
DEFAULT_COLOR = "#444444"
MARKER_RADIUS = 3.0
FONT_SIZE = 10


@dataclass(frozen=True)
class PlotSpec:
    """Rendering options; affects marker style and labels only."""

    width: int = 800
    height: int = 600
    label_mode: str = "code"
    color_file: Optional[str] = None
    margin_fraction: float = 0.06

    def __post_init__(self):
        if self.label_mode not in LABEL_MODES:
            raise ValueError(
                f"label_mode must be one of {LABEL_MODES}, got {self.label_mode!r}"
            )
        if not 0.0 <= self.margin_fraction < 0.5:
            raise ValueError("margin_fraction must lie in [0, 0.5)")
        if self.width <= 0 or self.height <= 0:
            raise ValueError("viewport dimensions must be positive")


def _load_color_groups(path: str) -> dict[str, str]:
    groups: dict[str, str] = {}
    with open(path, newline="") as handle:
        for row in csv.reader(handle):
            if len(row) >= 2 and row[0].strip():
                groups[row[0].strip()] = row[1].strip()
    return groups


def _color_map(groups: dict[str, str]) -> dict[str, str]:
    palette = {
        name: PALETTE[i % len(PALETTE)]
        for i, name in enumerate(sorted(set(groups.values())))
    }
    return {code: palette[group] for code, group in groups.items()}


def _viewport_transform(
    coordinates: np.ndarray, spec: PlotSpec
) -> tuple[np.ndarray, np.ndarray]:
    """Affine map from embedding coordinates to pixel positions.

    A single scale serves both axes (aspect ratio preserved); the data box
    is centered inside the margin-inset viewport.  The vertical axis is
    flipped so the map reads like a mathematical plot rather than screen
    coordinates.
    """
    margin = spec.margin_fraction * min(spec.width, spec.height)
    avail_w = spec.width - 2.0 * margin
    avail_h = spec.height - 2.0 * margin
    lo = coordinates.min(axis=0)
    hi = coordinates.max(axis=0)
    span = hi - lo
    scales = []
    for extent, avail in ((span[0], avail_w), (span[1], avail_h)):
        if extent > 0.0:
            scales.append(avail / extent)
    scale = min(scales) if scales else 1.0
    center = (lo + hi) / 2.0
    px = spec.width / 2.0 + scale * (coordinates[:, 0] - center[0])
    py = spec.height / 2.0 - scale * (coordinates[:, 1] - center[1])
    return px, py


def render_svg(emb: Embedding, spec: PlotSpec = PlotSpec()) -> str:
    """Render a two-dimensional embedding as a standalone SVG document."""
    if emb.k != 2:
        raise ValueError(f"plotting requires a 2-d embedding, got k={emb.k}")
    colors: dict[str, str] = {}
    if spec.color_file:
        colors = _color_map(_load_color_groups(str(Path(spec.color_file))))
    px, py = _viewport_transform(emb.coordinates, spec)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{spec.width}" '
            f'height="{spec.height}" viewBox="0 0 {spec.width} {spec.height}">'
        ),
        f'<rect width="{spec.width}" height="{spec.height}" fill="#ffffff"/>',
    ]
    for i, code in enumerate(emb.roster.codes):
        color = colors.get(code, DEFAULT_COLOR)
        parts.append(
            f'<circle cx="{px[i]:.2f}" cy="{py[i]:.2f}" '
            f'r="{MARKER_RADIUS:g}" fill="{color}"/>'
        )
    if spec.label_mode != "none":
        for i, code in enumerate(emb.roster.codes):
            text = code if spec.label_mode == "code" else emb.roster.label_for(code)
            parts.append(
                f'<text x="{px[i] + 5.0:.2f}" y="{py[i] + 4.0:.2f}" '
                f'font-family="sans-serif" font-size="{FONT_SIZE}">'
                f"{escape(text)}</text>"
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
