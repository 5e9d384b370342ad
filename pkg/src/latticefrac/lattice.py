"""Triangular reference lattice clipped to a polygonal domain.

Nodes are indexed by integer coordinates (a, b) with position
offset + eps*(a*eta1 + b*eta2), so neighbour lookup is exact integer
arithmetic.  Bonds are nearest-neighbour pairs whose closed segment lies in
the closed domain, stored once with the lexicographically smaller endpoint
first and tagged with a direction k in {1,2,3}.  Triangles are the unit cells
with all three sides of length eps contained in the domain, stored with
counterclockwise reference orientation (signed area +sqrt(3)/4 * eps^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (
    ensure_ccw,
    is_convex,
    perp,
    point_in_polygon,
    points_in_convex,
    point_in_triangle,
    segment_in_polygon,
    segment_triangle_intersect,
)

ETA1 = np.array([1.0, 0.0])
ETA2 = np.array([0.5, np.sqrt(3.0) / 2.0])
ETA3 = ETA1 - ETA2
ETAS = np.array([ETA1, ETA2, ETA3])

# the six signed lattice unit vectors and the six coordinate directions
S_VECTORS = np.array([ETA1, ETA2, ETA3, -ETA1, -ETA2, -ETA3])
D_VECTORS = perp(S_VECTORS)

# integer steps of the three bond directions in (a, b) coordinates
_BOND_STEPS = ((1, 0), (0, 1), (1, -1))


@dataclass(frozen=True)
class LatticeVectors:
    """The lattice basis, its signed unit vectors S, and coordinate directions D."""

    eta1: np.ndarray = field(default_factory=lambda: ETA1.copy())
    eta2: np.ndarray = field(default_factory=lambda: ETA2.copy())
    eta3: np.ndarray = field(default_factory=lambda: ETA3.copy())
    S: np.ndarray = field(default_factory=lambda: S_VECTORS.copy())
    D: np.ndarray = field(default_factory=lambda: D_VECTORS.copy())


class EmptyLatticeError(ValueError):
    """Raised when the clipped lattice has no nodes or no bonds."""


@dataclass(frozen=True)
class LatticeDomain:
    epsilon: float
    polygon: np.ndarray            # (M, 2) CCW
    offset: np.ndarray             # (2,)
    nodes: np.ndarray              # (N, 2) float positions
    node_ab: np.ndarray            # (N, 2) int lattice coordinates
    bonds: np.ndarray              # (B, 2) int node indices, lex-ordered pairs
    bond_dirs: np.ndarray          # (B,) int in {1,2,3}
    triangles: np.ndarray          # (T, 3) int node indices, CCW
    tol: float

    def __post_init__(self):
        for name in ("polygon", "offset", "nodes", "node_ab", "bonds", "bond_dirs", "triangles"):
            getattr(self, name).setflags(write=False)

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_bonds(self) -> int:
        return len(self.bonds)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def node_index(self, a: int, b: int) -> int:
        """Index of node (a, b), or -1 if not present."""
        return self._ab_lookup().get((a, b), -1)

    def _ab_lookup(self) -> dict:
        d = getattr(self, "_ab_cache", None)
        if d is None:
            d = {(int(a), int(b)): i for i, (a, b) in enumerate(self.node_ab)}
            object.__setattr__(self, "_ab_cache", d)
        return d

    def bond_vectors(self, u: np.ndarray | None = None) -> np.ndarray:
        """Per-bond difference vectors of node positions (or of a displacement u)."""
        vals = self.nodes if u is None else np.asarray(u, float)
        return vals[self.bonds[:, 1]] - vals[self.bonds[:, 0]]

    def triangle_points(self, u: np.ndarray | None = None) -> np.ndarray:
        """(T, 3, 2) vertex positions, reference or deformed."""
        vals = self.nodes if u is None else np.asarray(u, float)
        return vals[self.triangles]


def lattice_position(a, b, epsilon: float, offset=(0.0, 0.0)) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.stack(
        [offset[0] + epsilon * (a + 0.5 * b), offset[1] + epsilon * (np.sqrt(3.0) / 2.0) * b],
        axis=-1,
    )


def build_domain(polygon, epsilon: float, offset=(0.0, 0.0)) -> LatticeDomain:
    """Clip the triangular lattice with mesh size `epsilon` to a simple polygon.

    Bonds require the closed segment inside the closed domain; triangles
    require full containment.  Raises EmptyLatticeError when no node or no
    bond survives the clipping.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    poly = ensure_ccw(np.asarray(polygon, dtype=float))
    if len(poly) < 3:
        raise ValueError("polygon needs at least 3 vertices")
    offset = np.asarray(offset, dtype=float)
    tol = 1e-12 * epsilon

    # candidate (a, b) range from the polygon bounding box
    xmin, ymin = poly.min(axis=0) - offset
    xmax, ymax = poly.max(axis=0) - offset
    s3 = np.sqrt(3.0) / 2.0
    bmin = int(np.floor(ymin / (epsilon * s3))) - 1
    bmax = int(np.ceil(ymax / (epsilon * s3))) + 1
    amin = int(np.floor(xmin / epsilon - 0.5 * bmax)) - 1
    amax = int(np.ceil(xmax / epsilon - 0.5 * bmin)) + 1

    bb, aa = np.meshgrid(np.arange(bmin, bmax + 1), np.arange(amin, amax + 1), indexing="ij")
    ab = np.stack([aa.ravel(), bb.ravel()], axis=1)
    pos = lattice_position(ab[:, 0], ab[:, 1], epsilon, offset)

    convex = is_convex(poly, tol=tol)
    if convex:
        keep = points_in_convex(pos, poly, tol)
    else:
        keep = np.array([point_in_polygon(p, poly, tol) for p in pos])
    ab = ab[keep]
    pos = pos[keep]
    if len(ab) == 0:
        raise EmptyLatticeError("no lattice node inside the domain")

    index = {(int(a), int(b)): i for i, (a, b) in enumerate(ab)}

    def seg_ok(p, q):
        if convex:
            return True  # both endpoints inside a convex set
        return segment_in_polygon(p, q, poly, tol)

    bonds, dirs = [], []
    for i, (a, b) in enumerate(ab):
        for k, (da, db) in enumerate(_BOND_STEPS, start=1):
            j = index.get((int(a) + da, int(b) + db), -1)
            if j >= 0 and seg_ok(pos[i], pos[j]):
                bonds.append((i, j))
                dirs.append(k)
    if not bonds:
        raise EmptyLatticeError("no bond fits inside the domain")

    tris = []
    for i, (a, b) in enumerate(ab):
        a = int(a)
        b = int(b)
        # up triangle (a,b), (a+1,b), (a,b+1)
        j = index.get((a + 1, b), -1)
        k = index.get((a, b + 1), -1)
        if j >= 0 and k >= 0 and _tri_ok(pos[i], pos[j], pos[k], poly, tol, convex):
            tris.append((i, j, k))
        # down triangle anchored at its first vertex: (a,b), (a,b+1), (a-1,b+1)
        k2 = index.get((a - 1, b + 1), -1)
        if k >= 0 and k2 >= 0 and _tri_ok(pos[i], pos[k], pos[k2], poly, tol, convex):
            tris.append((i, k, k2))

    return LatticeDomain(
        epsilon=float(epsilon),
        polygon=poly,
        offset=offset,
        nodes=pos,
        node_ab=ab.astype(np.int64),
        bonds=np.asarray(bonds, dtype=np.int64),
        bond_dirs=np.asarray(dirs, dtype=np.int64),
        triangles=np.asarray(tris, dtype=np.int64) if tris else np.empty((0, 3), dtype=np.int64),
        tol=tol,
    )


def _tri_ok(p, q, r, poly, tol, convex) -> bool:
    if convex:
        return True  # vertices inside a convex set imply hull containment
    if not (
        segment_in_polygon(p, q, poly, tol)
        and segment_in_polygon(q, r, poly, tol)
        and segment_in_polygon(r, p, poly, tol)
    ):
        return False
    # a polygon vertex strictly inside the triangle means the boundary dips in
    tri = np.array([p, q, r])
    for v in poly:
        if point_in_triangle(v, tri, -tol):
            return False
    return point_in_polygon((p + q + r) / 3.0, poly, tol)


def direction_index(domain: LatticeDomain, bond: int) -> int:
    """Direction tag k in {1,2,3} such that j - i = +eps*eta_k for the stored pair."""
    return int(domain.bond_dirs[bond])


def triangles_crossing_segment(domain: LatticeDomain, p0, p1) -> np.ndarray:
    """Indices of stored triangles whose closed hull meets the segment [p0, p1].

    Tangential touches (the segment running along a triangle edge or grazing a
    vertex) are kept only for triangles lying on the left of the oriented
    segment; this matches the convention that a crack drawn on a lattice line
    separates the closed right side from the open left side.  Proper crossings
    and point queries are side-independent.
    """
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    tol = domain.tol
    pts = domain.triangle_points()
    out = []
    d = p1 - p0
    degenerate = bool(np.hypot(*d) <= tol)
    for t in range(domain.n_triangles):
        tri = pts[t]
        if not segment_triangle_intersect(p0, p1, tri, tol):
            continue
        if degenerate:
            out.append(t)
            continue
        # classify touch: if all vertices are on one closed side and none is
        # strictly on the left, the contact is tangential from the right
        s = np.array([_side(v, p0, d, tol) for v in tri])
        if np.all(s <= 0) and not np.any(s < 0):
            # triangle degenerate w.r.t. the line: keep (segment along an edge
            # through it is a proper overlap)
            out.append(t)
        elif np.all(s >= 0):
            out.append(t)  # strictly/weakly left: keep
        elif np.all(s <= 0):
            continue  # strictly right with tangential touch: drop
        else:
            out.append(t)  # straddles: proper crossing
    return np.asarray(out, dtype=np.int64)


def _side(v, p0, d, tol):
    c = d[0] * (v[1] - p0[1]) - d[1] * (v[0] - p0[0])
    if c > tol:
        return 1
    if c < -tol:
        return -1
    return 0


def triple_point_offset(x0, epsilon: float) -> np.ndarray:
    """Lattice offset that puts the up-triangle with centroid x0 on the lattice.

    With this offset the node x0 - eps*(eta1+eta2)/3 exists, so the triangle
    whose three vertices fall one in each sector around x0 is a stored cell.
    """
    x0 = np.asarray(x0, dtype=float)
    return x0 - epsilon * (ETA1 + ETA2) / 3.0
