"""Deterministic SVG rendering of reference/deformed triangulations.

Fixed viewport mapping: the drawing is scaled to a 640-unit width with a 5%
margin; coordinates are printed with 6 decimals.  Colors: reference triangles
light gray, deformed triangles pale blue, bad triangles orange, inadmissible
triangles red, crack overlay dark red.
"""

from __future__ import annotations

import numpy as np

from .lattice import LatticeDomain

COL_REF = "#d8d8d8"
COL_DEF = "#cfe2f3"
COL_BAD = "#f6b26b"
COL_VIOL = "#e06666"
COL_CRACK = "#990000"
COL_EDGE = "#666666"


def _viewbox(points: np.ndarray):
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    span = np.maximum(hi - lo, 1e-9)
    margin = 0.05 * float(span.max())
    lo = lo - margin
    hi = hi + margin
    return lo, hi - lo


def _fmt(x: float) -> str:
    return format(x, ".6f")


def render_svg(
    domain: LatticeDomain,
    u: np.ndarray | None = None,
    bad_triangles=None,
    violating_triangles=None,
    crack_segments=None,
    width: int = 640,
) -> str:
    """One triangulation (reference when u is None) as an SVG string."""
    pts = domain.nodes if u is None else np.asarray(u, float)
    lo, span = _viewbox(pts)
    scale = width / float(span[0])
    height = float(span[1]) * scale

    def map_pt(p):
        return (p[0] - lo[0]) * scale, height - (p[1] - lo[1]) * scale

    bad = set(int(t) for t in (bad_triangles if bad_triangles is not None else []))
    viol = set(int(t) for t in (violating_triangles if violating_triangles is not None else []))
    base_fill = COL_REF if u is None else COL_DEF
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
    ]
    tri_pts = domain.triangle_points(u if u is not None else None)
    for t in range(domain.n_triangles):
        fill = COL_VIOL if t in viol else (COL_BAD if t in bad else base_fill)
        coords = " ".join(
            f"{_fmt(px)},{_fmt(py)}" for px, py in (map_pt(p) for p in tri_pts[t])
        )
        parts.append(
            f'<polygon points="{coords}" fill="{fill}" stroke="{COL_EDGE}" stroke-width="0.3"/>'
        )
    for seg in crack_segments or []:
        (x0, y0), (x1, y1) = map_pt(np.asarray(seg[0], float)), map_pt(np.asarray(seg[1], float))
        parts.append(
            f'<line x1="{_fmt(x0)}" y1="{_fmt(y0)}" x2="{_fmt(x1)}" y2="{_fmt(y1)}" '
            f'stroke="{COL_CRACK}" stroke-width="1.2"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def render_pair(
    domain: LatticeDomain,
    u: np.ndarray,
    bad_triangles=None,
    violating_triangles=None,
    crack_segments=None,
) -> tuple[str, str]:
    """Reference and deformed figures with shared highlighting."""
    ref = render_svg(domain, None, bad_triangles, violating_triangles, crack_segments)
    dfm = render_svg(domain, u, bad_triangles, violating_triangles, None)
    return ref, dfm
