"""
SVG figures for AMIF-MDS results
Embedding scatter colored by cluster, and a dissimilarity heatmap, drawn with
matplotlib. Identical input gives byte-identical SVG.
"""

import io
from typing import Optional

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from src.clustering import NOISE, ClusterAssignment
from src.errors import DataError
from src.mds import Embedding
from src.transforms import DissimilarityMatrix
from src.utils import atomic_write_text

# Fixed categorical palette, cycled by cluster id
PALETTE = [
    "#1F77B4", "#FF7F0E", "#2CA02C", "#D62728", "#9467BD",
    "#8C564B", "#E377C2", "#7F7F7F", "#BCBD22", "#17BECF",
]
NOISE_COLOR = "#A0A0A0"

# svg.hashsalt fixes the generated element ids; fonttype "none" keeps labels as <text>
SVG_RC = {"svg.hashsalt": "amif-mds", "svg.fonttype": "none", "font.family": "DejaVu Sans"}
MARKER_GID = "markers"


def _color(label: int) -> str:
    return NOISE_COLOR if label == NOISE else PALETTE[label % len(PALETTE)]


def _plain(name: str) -> str:
    """Series names are literal text, never mathtext."""
    return name.replace("$", r"\$")


def _to_svg(fig: Figure) -> str:
    buf = io.StringIO()
    with matplotlib.rc_context(SVG_RC):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def scatter_svg(embedding: Embedding, clusters: Optional[ClusterAssignment] = None, title: str = "AMIF-MDS embedding") -> str:
    """
    One marker per series with its name beside it.

    d = 1 is drawn on a horizontal line; d = 3 uses an orthographic
    projection on the first two axes with marker area encoding the third.
    """
    coords = np.asarray(embedding.coords, dtype=float)
    m, d = coords.shape
    if d > 3:
        raise DataError(f"cannot render a {d}-dimensional embedding (at most 3)")
    if clusters is not None and len(clusters) != m:
        raise DataError(f"{len(clusters)} cluster labels for {m} points")
    labels = clusters.labels if clusters is not None else np.zeros(m, dtype=np.int64)

    xs = coords[:, 0]
    ys = coords[:, 1] if d >= 2 else np.zeros(m)
    if d == 3:
        depth = coords[:, 2]
        span = depth.max() - depth.min()
        sizes = 20 + 100 * ((depth - depth.min()) / span if span > 0 else np.full(m, 0.5))
    else:
        sizes = np.full(m, 40.0)

    with matplotlib.rc_context(SVG_RC):
        fig = Figure(figsize=(7.2, 5.4))
        ax = fig.add_subplot()
        markers = ax.scatter(
            xs, ys, s=sizes, c=[_color(int(c)) for c in labels],
            alpha=0.85, edgecolors="white", linewidths=1,
        )
        markers.set_gid(MARKER_GID)
        for name, x, y in zip(embedding.names, xs, ys):
            ax.annotate(_plain(name), (x, y), xytext=(5, 3), textcoords="offset points", fontsize=8)

        ax.set_title(title)
        ax.set_xlabel("dim 1")
        if d >= 2:
            ax.set_ylabel("dim 2")
        else:
            ax.set_yticks([])
        if d == 3:
            ax.text(0.99, 0.01, "marker size: dim 3", transform=ax.transAxes, ha="right", fontsize=8, color="#64748B")
        ax.grid(True, color="#E5E7EB", linewidth=0.8)
        ax.set_axisbelow(True)
        fig.tight_layout()
    return _to_svg(fig)


def render_scatter(embedding: Embedding, out: str, clusters: Optional[ClusterAssignment] = None) -> str:
    return atomic_write_text(out, scatter_svg(embedding, clusters))


def heatmap_svg(dissim: DissimilarityMatrix, title: str = "Dissimilarity matrix") -> str:
    """Greyscale cells, darker = less dissimilar; rows and columns in table order."""
    values = dissim.values
    peak = float(values.max())

    with matplotlib.rc_context(SVG_RC):
        fig = Figure(figsize=(6.4, 5.6))
        ax = fig.add_subplot()
        image = ax.imshow(values, cmap="gray", vmin=0.0, vmax=peak if peak > 0 else 1.0, interpolation="nearest")
        ax.set_xticks(range(dissim.size))
        ax.set_yticks(range(dissim.size))
        ax.set_xticklabels([_plain(n) for n in dissim.names], rotation=60, ha="right", fontsize=8)
        ax.set_yticklabels([_plain(n) for n in dissim.names], fontsize=8)
        ax.set_title(title)
        fig.colorbar(image, ax=ax, fraction=0.046, pad=0.04)
        fig.tight_layout()
    return _to_svg(fig)


def render_heatmap(dissim: DissimilarityMatrix, out: str) -> str:
    return atomic_write_text(out, heatmap_svg(dissim))
