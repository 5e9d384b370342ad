"""Piecewise rigid target maps: regions with rotations and translations,
crack segments with normals, pointwise sampling, and opening-condition checks.

Region membership is resolved first-match-wins, which encodes the closed-side
convention for nodes sitting exactly on a crack: list the open side first to
close the other one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import perp, rotation, segment_intersection_params, point_in_polygon
from .surface import simplex_decompose
from .lattice import D_VECTORS, LatticeDomain


@dataclass
class Region:
    name: str
    indicator: Callable[[np.ndarray], np.ndarray]   # (N,2) -> bool mask
    R: np.ndarray
    q: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return x @ np.asarray(self.R, float).T + np.asarray(self.q, float)


@dataclass
class Crack:
    """A straight crack piece: the line through `point` with unit `normal`,
    clipped to [point + t*tangent, t in t_range]."""

    point: np.ndarray
    normal: np.ndarray
    plus_region: int
    minus_region: int
    t_range: tuple[float, float] = (-math.inf, math.inf)

    @property
    def tangent(self) -> np.ndarray:
        return perp(self.normal)

    def sample_points(self, polygon: np.ndarray, n: int = 64) -> np.ndarray:
        """Points of the crack piece inside the closed polygon."""
        p0 = np.asarray(self.point, float)
        tau = self.tangent
        r = float(np.max(np.linalg.norm(polygon - p0, axis=1))) + 1.0
        lo = max(self.t_range[0], -r)
        hi = min(self.t_range[1], r)
        if hi <= lo:
            return np.empty((0, 2))
        ts = np.linspace(lo, hi, n)
        pts = p0 + ts[:, None] * tau
        keep = np.array([point_in_polygon(p, polygon, 1e-12) for p in pts])
        return pts[keep]

    def length_in_polygon(self, polygon: np.ndarray) -> float:
        p0 = np.asarray(self.point, float)
        tau = self.tangent
        r = float(np.max(np.linalg.norm(polygon - p0, axis=1))) + 1.0
        lo = max(self.t_range[0], -r)
        hi = min(self.t_range[1], r)
        if hi <= lo:
            return 0.0
        a0 = p0 + lo * tau
        a1 = p0 + hi * tau
        n = len(polygon)
        ts = [0.0, 1.0]
        for i in range(n):
            ts.extend(segment_intersection_params(a0, a1, polygon[i], polygon[(i + 1) % n]))
        ts = sorted(set(ts))
        total = 0.0
        for t0, t1 in zip(ts[:-1], ts[1:]):
            mid = a0 + 0.5 * (t0 + t1) * (a1 - a0)
            if point_in_polygon(mid, polygon, 1e-12):
                total += (t1 - t0) * (hi - lo)
        return total


@dataclass
class PiecewiseRigidMap:
    regions: list[Region]
    cracks: list[Crack] = field(default_factory=list)

    def region_of(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.full(len(pts), -1, dtype=np.int64)
        remaining = np.ones(len(pts), dtype=bool)
        for idx, reg in enumerate(self.regions):
            if not remaining.any():
                break
            mask = remaining & np.asarray(reg.indicator(pts), dtype=bool)
            out[mask] = idx
            remaining &= ~mask
        if remaining.any():
            raise ValueError("regions do not cover all queried points")
        return out

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        which = self.region_of(pts)
        out = np.empty_like(pts)
        for idx, reg in enumerate(self.regions):
            m = which == idx
            if m.any():
                out[m] = reg.apply(pts[m])
        return out

    def trace(self, crack_id: int, points: np.ndarray, side: str) -> np.ndarray:
        """One-sided values u+ or u- on a crack, via the adjacent region maps."""
        crack = self.cracks[crack_id]
        reg = self.regions[crack.plus_region if side == "+" else crack.minus_region]
        return reg.apply(points)


def half_plane_indicator(xbar, nu, closed: bool):
    xbar = np.asarray(xbar, float)
    nu = np.asarray(nu, float)

    def ind(pts):
        s = (pts - xbar) @ nu
        return s >= 0 if closed else s > 0

    return ind


def two_region_map(xbar, nu, R_plus, q_plus, R_minus, q_minus, plus_closed=False) -> PiecewiseRigidMap:
    """Two half-planes split by the line through xbar with unit normal nu.

    By default the minus side is closed (nodes on the line take the minus
    map); plus_closed=True flips that convention.
    """
    nu = np.asarray(nu, float)
    nu = nu / np.hypot(*nu)
    plus = Region("plus", half_plane_indicator(xbar, nu, plus_closed), np.asarray(R_plus, float), np.asarray(q_plus, float))
    minus = Region("minus", lambda pts: np.ones(len(pts), dtype=bool), np.asarray(R_minus, float), np.asarray(q_minus, float))
    cracks = [Crack(point=np.asarray(xbar, float), normal=nu, plus_region=0, minus_region=1)]
    return PiecewiseRigidMap(regions=[plus, minus], cracks=cracks)


@dataclass
class PolylineGraph:
    """Piecewise-linear graph zeta = g(s) in the frame (tangent tau, normal nu)
    anchored at a point; linear extension beyond the given breakpoints."""

    anchor: np.ndarray
    nu: np.ndarray
    breakpoints: np.ndarray   # (K, 2) rows (s, zeta), s strictly increasing

    @property
    def tau(self) -> np.ndarray:
        return perp(self.nu)

    def value(self, s: np.ndarray) -> np.ndarray:
        bp = self.breakpoints
        return np.interp(s, bp[:, 0], bp[:, 1])

    def coords(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        rel = np.atleast_2d(pts) - self.anchor
        return rel @ self.tau, rel @ self.nu

    def side(self, pts: np.ndarray) -> np.ndarray:
        s, z = self.coords(pts)
        return z - self.value(s)

    def segments(self) -> list[tuple[np.ndarray, np.ndarray]]:
        bp = self.breakpoints
        out = []
        for i in range(len(bp) - 1):
            p0 = self.anchor + bp[i, 0] * self.tau + bp[i, 1] * self.nu
            p1 = self.anchor + bp[i + 1, 0] * self.tau + bp[i + 1, 1] * self.nu
            out.append((p0, p1))
        return out


def polyline_two_region_map(
    graph: PolylineGraph, R_plus, q_plus, R_minus, q_minus, plus_closed=True
) -> PiecewiseRigidMap:
    """Two regions split by a polyline graph; the plus side is zeta > g(s).

    Crack pieces carry the per-segment normals (oriented toward the plus side).
    """

    def plus_ind(pts):
        s = graph.side(pts)
        return s >= 0 if plus_closed else s > 0

    plus = Region("plus", plus_ind, np.asarray(R_plus, float), np.asarray(q_plus, float))
    minus = Region("minus", lambda pts: np.ones(len(pts), dtype=bool), np.asarray(R_minus, float), np.asarray(q_minus, float))
    cracks = []
    for p0, p1 in graph.segments():
        t = p1 - p0
        L = float(np.hypot(*t))
        if L <= 0:
            continue
        t = t / L
        n = perp(t)
        # orient the normal toward the plus side of the graph
        probe = 0.5 * (p0 + p1) + 1e-9 * n
        if graph.side(probe[None, :])[0] < 0:
            n = -n
        cracks.append(Crack(point=p0, normal=n, plus_region=0, minus_region=1, t_range=(0.0, L) if float(t @ perp(n)) > 0 else (-L, 0.0)))
    return PiecewiseRigidMap(regions=[plus, minus], cracks=cracks)


def check_opening_condition(
    target: PiecewiseRigidMap,
    crack_id: int,
    polygon: np.ndarray,
    strong: bool = False,
    n_samples: int = 64,
) -> dict:
    """Minimum inner products <u+ - u-, R(+/-) nu> over sampled crack points.

    With strong=True and a normal outside the coordinate directions, the
    products against the two simplex directions of the normal are included as
    well (four rotations-by-directions combinations).
    """
    crack = target.cracks[crack_id]
    pts = crack.sample_points(polygon, n_samples)
    if len(pts) == 0:
        return {"delta": math.nan, "products": {}, "n_points": 0, "satisfied": False}
    up = target.trace(crack_id, pts, "+")
    um = target.trace(crack_id, pts, "-")
    jump = up - um
    Rp = target.regions[crack.plus_region].R
    Rm = target.regions[crack.minus_region].R
    directions = {"nu": crack.normal}
    if strong:
        in_d = any(
            min(np.linalg.norm(crack.normal - d), np.linalg.norm(crack.normal + d)) < 1e-9
            for d in D_VECTORS
        )
        if not in_d:
            nu1, nu2, _ = simplex_decompose(crack.normal)
            directions["nu1"] = nu1
            directions["nu2"] = nu2
    products = {}
    delta = math.inf
    for dname, dvec in directions.items():
        for rname, R in (("R+", Rp), ("R-", Rm)):
            vals = jump @ (np.asarray(R, float) @ np.asarray(dvec, float))
            key = f"<jump,{rname}.{dname}>"
            products[key] = float(vals.min())
            delta = min(delta, float(vals.min()))
    return {
        "delta": float(delta),
        "products": products,
        "n_points": int(len(pts)),
        "satisfied": bool(delta > 0),
        "jump_norm": float(np.linalg.norm(jump, axis=1).mean()),
    }


def pointwise_interpolation(domain: LatticeDomain, target: PiecewiseRigidMap) -> np.ndarray:
    """Sample the target map at the lattice nodes."""
    return target.evaluate(domain.nodes)


def rot(theta_deg: float) -> np.ndarray:
    return rotation(math.radians(theta_deg))
