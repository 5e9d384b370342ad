"""Small planar-geometry toolkit: polygons, segments, containment with tolerance.

All polygon routines accept an (M, 2) vertex array (ordered, not closed).
Containment is with respect to the closed region; a point within `tol` of the
boundary counts as inside, so that lattice nodes sitting exactly on a domain
edge are kept deterministically.
"""

from __future__ import annotations

import numpy as np


def perp(v: np.ndarray) -> np.ndarray:
    """90-degree counterclockwise rotation, vectorized over trailing axis."""
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def cross2(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Scalar cross product a_x b_y - a_y b_x."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def polygon_area(poly: np.ndarray) -> float:
    """Signed area (positive for counterclockwise vertex order)."""
    p = np.asarray(poly, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def polygon_perimeter(poly: np.ndarray) -> float:
    p = np.asarray(poly, dtype=float)
    return float(np.sum(np.linalg.norm(np.roll(p, -1, axis=0) - p, axis=1)))


def ensure_ccw(poly: np.ndarray) -> np.ndarray:
    p = np.asarray(poly, dtype=float)
    return p if polygon_area(p) > 0 else p[::-1].copy()


def is_convex(poly: np.ndarray, tol: float = 0.0) -> bool:
    """True when every vertex turn has the same orientation (degenerate turns allowed)."""
    p = ensure_ccw(poly)
    e = np.roll(p, -1, axis=0) - p
    turns = cross2(e, np.roll(e, -1, axis=0))
    return bool(np.all(turns >= -tol))


def points_in_convex(points: np.ndarray, poly: np.ndarray, tol: float) -> np.ndarray:
    """Vectorized closed-containment test for a convex CCW polygon."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    p = ensure_ccw(poly)
    edges = np.roll(p, -1, axis=0) - p
    # signed distance to each edge line, scaled by edge length
    inside = np.ones(len(pts), dtype=bool)
    for v, e in zip(p, edges):
        elen = np.hypot(e[0], e[1])
        s = (cross2(e, pts - v)) / elen
        inside &= s >= -tol
    return inside


def _seg_point_dist(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom == 0.0:
        return float(np.hypot(*(p - a)))
    t = float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.hypot(*(p - a - t * ab)))


def point_in_polygon(pt: np.ndarray, poly: np.ndarray, tol: float) -> bool:
    """Closed containment for a general simple polygon (ray casting + boundary band)."""
    p = np.asarray(poly, dtype=float)
    q = np.asarray(pt, dtype=float)
    n = len(p)
    for i in range(n):
        if _seg_point_dist(q, p[i], p[(i + 1) % n]) <= tol:
            return True
    inside = False
    x, y = q
    j = n - 1
    for i in range(n):
        xi, yi = p[i]
        xj, yj = p[j]
        if (yi > y) != (yj > y):
            xint = xi + (y - yi) * (xj - xi) / (yj - yi)
            if x < xint:
                inside = not inside
        j = i
    return inside


def segment_intersection_params(p0, p1, a, b, tol=1e-14):
    """Parameters t in [0,1] along [p0,p1] where it meets segment [a,b]."""
    p0 = np.asarray(p0, float)
    d = np.asarray(p1, float) - p0
    a = np.asarray(a, float)
    e = np.asarray(b, float) - a
    denom = cross2(d, e)
    out = []
    if abs(denom) > tol:
        t = cross2(a - p0, e) / denom
        s = cross2(a - p0, d) / denom
        if -tol <= t <= 1 + tol and -tol <= s <= 1 + tol:
            out.append(float(np.clip(t, 0.0, 1.0)))
    else:
        # parallel: project endpoints if collinear
        if abs(cross2(a - p0, d)) <= tol * (1 + np.hypot(*d)):
            dd = float(d @ d)
            if dd > 0:
                for q in (a, a + e):
                    t = float((q - p0) @ d / dd)
                    if -tol <= t <= 1 + tol:
                        out.append(float(np.clip(t, 0.0, 1.0)))
    return out


def segment_in_polygon(p0, p1, poly: np.ndarray, tol: float) -> bool:
    """Closed containment of segment [p0,p1] in a general simple polygon."""
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    if not (point_in_polygon(p0, poly, tol) and point_in_polygon(p1, poly, tol)):
        return False
    n = len(poly)
    ts = [0.0, 1.0]
    for i in range(n):
        ts.extend(segment_intersection_params(p0, p1, poly[i], poly[(i + 1) % n]))
    ts = sorted(set(ts))
    for t0, t1 in zip(ts[:-1], ts[1:]):
        mid = p0 + 0.5 * (t0 + t1) * (p1 - p0)
        if not point_in_polygon(mid, poly, tol):
            return False
    return True


def point_in_triangle(pt, tri, tol: float = 0.0) -> bool:
    """Closed containment in triangle given as (3,2) array (any orientation)."""
    a, b, c = np.asarray(tri, float)
    q = np.asarray(pt, float)
    d1 = cross2(b - a, q - a)
    d2 = cross2(c - b, q - b)
    d3 = cross2(a - c, q - c)
    has_neg = (d1 < -tol) or (d2 < -tol) or (d3 < -tol)
    has_pos = (d1 > tol) or (d2 > tol) or (d3 > tol)
    return not (has_neg and has_pos)


def segments_intersect(p0, p1, q0, q1, tol: float = 0.0) -> bool:
    """Closed intersection test for segments [p0,p1] and [q0,q1]."""
    p0, p1, q0, q1 = (np.asarray(v, float) for v in (p0, p1, q0, q1))
    d1 = cross2(p1 - p0, q0 - p0)
    d2 = cross2(p1 - p0, q1 - p0)
    d3 = cross2(q1 - q0, p0 - q0)
    d4 = cross2(q1 - q0, p1 - q0)
    if ((d1 > tol and d2 < -tol) or (d1 < -tol and d2 > tol)) and (
        (d3 > tol and d4 < -tol) or (d3 < -tol and d4 > tol)
    ):
        return True

    def on_seg(p, a, b):
        return _seg_point_dist(p, a, b) <= max(tol, 1e-300)

    return (
        on_seg(q0, p0, p1) or on_seg(q1, p0, p1) or on_seg(p0, q0, q1) or on_seg(p1, q0, q1)
    )


def segment_triangle_intersect(p0, p1, tri, tol: float = 0.0) -> bool:
    """Closed-hull intersection of segment [p0,p1] with a triangle."""
    if point_in_triangle(p0, tri, tol) or point_in_triangle(p1, tri, tol):
        return True
    a, b, c = np.asarray(tri, float)
    return (
        segments_intersect(p0, p1, a, b, tol)
        or segments_intersect(p0, p1, b, c, tol)
        or segments_intersect(p0, p1, c, a, tol)
    )


def clip_line_to_polygon(x0, direction, poly: np.ndarray, tol: float = 1e-12) -> float:
    """Total length of the line {x0 + t*direction} inside the closed polygon.

    Works for simple polygons by splitting at all boundary crossings.
    """
    x0 = np.asarray(x0, float)
    d = np.asarray(direction, float)
    d = d / np.hypot(*d)
    p = np.asarray(poly, float)
    # generous parameter range from polygon extent
    r = float(np.max(np.linalg.norm(p - x0, axis=1))) + 1.0
    a0, a1 = x0 - r * d, x0 + r * d
    n = len(p)
    ts = []
    for i in range(n):
        ts.extend(segment_intersection_params(a0, a1, p[i], p[(i + 1) % n]))
    ts = sorted(set([0.0, 1.0] + ts))
    total = 0.0
    for t0, t1 in zip(ts[:-1], ts[1:]):
        mid = a0 + 0.5 * (t0 + t1) * (a1 - a0)
        if point_in_polygon(mid, p, tol):
            total += (t1 - t0) * 2 * r
    return total
