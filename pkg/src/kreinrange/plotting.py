"""SVG rendering of the boundary curve, flat portions and isolated points.

Plus branches and points are drawn in blue, minus ones in red.  Output is
byte-stable for identical input (fixed hash salt, no timestamp).
"""
from __future__ import annotations

import math
from typing import Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .core import MINUS, PLUS  # noqa: E402
from .geometry import EnvelopeTrack, HyperbolaComponent, IsolatedPoint  # noqa: E402

COLORS = {PLUS: "tab:blue", MINUS: "tab:red", None: "0.45"}
RC = {"svg.hashsalt": "kreinrange", "svg.fonttype": "none", "path.simplify": False}


def auto_window(report) -> tuple[float, float, float, float]:
    """Bounding box of foci and points, padded by twice the largest axis length."""
    pts, axis = [], 0.0
    for c in report.curve.components:
        if isinstance(c, HyperbolaComponent):
            pts += list(c.foci) + [c.center]
            axis = max(axis, 2 * c.semi_transverse, 2 * c.semi_nontransverse)
        elif isinstance(c, IsolatedPoint):
            pts.append(c.value)
        elif isinstance(c, EnvelopeTrack):
            good = c.points[np.isfinite(c.points)]
            if good.size:
                # tracks can run off to infinity near asymptotes; use a robust spread
                lo = np.percentile(good.real, [10, 90])
                hi = np.percentile(good.imag, [10, 90])
                pts += [complex(lo[0], hi[0]), complex(lo[1], hi[1])]
    if report.hull is not None:
        for f in report.hull.flat_portions:
            pts += [f.start, f.end]
    if not pts:
        pts = [report.curve.center]
    pts = np.array(pts, dtype=complex)
    x0, x1 = pts.real.min(), pts.real.max()
    y0, y1 = pts.imag.min(), pts.imag.max()
    pad = max(2 * axis, 0.25 * max(x1 - x0, y1 - y0), 1.0)
    cx, cy = (x0 + x1) / 2, (y0 + y1) / 2
    half = max(x1 - x0, y1 - y0) / 2 + pad
    return cx - half, cy - half, cx + half, cy + half


def _branch_t_max(comp: HyperbolaComponent, window) -> float:
    x0, y0, x1, y1 = window
    reach = math.hypot(x1 - x0, y1 - y0) + abs(comp.center - complex((x0 + x1) / 2, (y0 + y1) / 2))
    scale = max(min(comp.semi_transverse, comp.semi_nontransverse), 1e-9)
    return min(max(math.asinh(reach / scale) + 0.5, 1.0), 30.0)


def _plot_polyline(ax, pts, color, **kw):
    pts = np.asarray(pts, dtype=complex)
    ax.plot(pts.real, pts.imag, color=color, **kw)


def render_svg(report, path, window: Optional[tuple] = None, samples: int = 1200) -> None:
    window = window or auto_window(report)
    x0, y0, x1, y1 = window
    with plt.rc_context(RC):
        fig, ax = plt.subplots(figsize=(6, 6))
        for comp in report.curve.components:
            if isinstance(comp, HyperbolaComponent):
                reach = max(x1 - x0, y1 - y0) * 2
                for direction in comp.asymptote_directions():
                    u = direction / abs(direction) if abs(direction) else 1
                    seg = [comp.center - reach * u, comp.center + reach * u]
                    _plot_polyline(ax, seg, "0.7", linestyle="--", linewidth=0.6)
                t = np.linspace(-1, 1, samples) * _branch_t_max(comp, window)
                for side in (1, -1):
                    _plot_polyline(ax, comp.branch_points(side, t), COLORS[comp.branch_sign(side)], linewidth=1.4)
            elif isinstance(comp, EnvelopeTrack):
                signs = list(comp.signs)
                start = 0
                for k in range(1, len(signs) + 1):
                    if k == len(signs) or signs[k] != signs[start]:
                        _plot_polyline(ax, comp.points[start:k], COLORS.get(signs[start], "0.45"), linewidth=1.0)
                        start = k
        if report.taxonomy == "half_line_pair":
            a, b = (p.value for p in report.curve.points)
            reach = 4 * max(x1 - x0, y1 - y0)
            u = (a - b) / abs(a - b)
            _plot_polyline(ax, [a, a + reach * u], COLORS[PLUS], linewidth=1.4)
            _plot_polyline(ax, [b, b - reach * u], COLORS[MINUS], linewidth=1.4)
        if report.hull is not None:
            for f in report.hull.flat_portions:
                _plot_polyline(ax, [f.start, f.end], COLORS[f.side], linewidth=2.2, solid_capstyle="butt")
        for p in report.curve.points:
            ax.plot([p.value.real], [p.value.imag], marker="o", markersize=5, color=COLORS[p.sign], linestyle="none")
        ax.set_xlim(x0, x1)
        ax.set_ylim(y0, y1)
        ax.set_aspect("equal")
        ax.axhline(0, color="0.85", linewidth=0.5, zorder=0)
        ax.axvline(0, color="0.85", linewidth=0.5, zorder=0)
        ax.set_xlabel("Re")
        ax.set_ylabel("Im")
        ax.set_title(report.taxonomy.replace("_", " "))
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
