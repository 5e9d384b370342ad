"""Explicit discrete crack constructions and their predicted limit energies.

Every builder returns a ConstructionResult holding the displacement, the
measured energy report, the predicted limit value of the construction, and
diagnostic metadata.  Constructions that are expected to fail the orientation
constraint (negative tests) are still emitted, flagged inadmissible.

Frame conventions: perp() is the counterclockwise quarter turn, crack normals
point from the minus side into the plus side, and a triangle is admissible
when its deformed vertices keep counterclockwise order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energy import EnergyReport, Potential, total_energy
from .geometry import perp, rotation
from .lattice import D_VECTORS, ETA1, ETA2, ETA3, LatticeDomain
from .pwrigid import (
    Crack,
    PiecewiseRigidMap,
    PolylineGraph,
    Region,
    check_opening_condition,
    pointwise_interpolation,
    polyline_two_region_map,
    two_region_map,
)
from .surface import phi, psi_star, simplex_decompose

SQRT3 = math.sqrt(3.0)

ETA1P = perp(ETA1)   # (0, 1)
ETA2P = perp(ETA2)   # (-sqrt3/2, 1/2)
ETA3P = perp(ETA3)   # (sqrt3/2, 1/2)


@dataclass
class ConstructionResult:
    name: str
    displacement: np.ndarray
    report: EnergyReport
    predicted_limit: float
    admissible: bool
    params: dict = field(default_factory=dict)
    conditions: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def measured(self) -> float:
        return self.report.bond_sum

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "predicted_limit": self.predicted_limit,
            "measured": self.measured,
            "admissible": bool(self.admissible),
            "params": self.params,
            "conditions": self.conditions,
            "extras": self.extras,
            "report": self.report.as_dict(),
        }


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / math.hypot(v[0], v[1])


def _is_coordinate_direction(nu, tol=1e-9) -> bool:
    nu = _unit(nu)
    return any(
        min(np.linalg.norm(nu - d), np.linalg.norm(nu + d)) < tol for d in D_VECTORS
    )


def _finish(domain, u, potential, name, predicted, params, conditions=None, extras=None,
            s_threshold=None) -> ConstructionResult:
    report = total_energy(domain, u, potential, s_threshold=s_threshold)
    return ConstructionResult(
        name=name,
        displacement=u,
        report=report,
        predicted_limit=float(predicted),
        admissible=report.admissible,
        params=params,
        conditions=conditions or {},
        extras=extras or {},
    )


# ---------------------------------------------------------------------------
# straight and polygonal cracks

def straight_crack(
    domain: LatticeDomain,
    nu,
    R_plus,
    R_minus,
    q_plus,
    q_minus,
    xbar,
    potential: Potential | None = None,
) -> ConstructionResult:
    """Pointwise interpolation of a two-sided rigid map jumping across a line.

    The normal must be a coordinate direction.  The predicted limit is
    phi(nu) * crack length = 2 J_inf * length.  When the opening condition
    fails the construction is still emitted for negative tests.
    """
    potential = potential or Potential()
    nu = _unit(nu)
    if not _is_coordinate_direction(nu):
        raise ValueError("straight_crack requires a coordinate-direction normal")
    target = two_region_map(xbar, nu, R_plus, q_plus, R_minus, q_minus)
    if np.allclose(np.asarray(R_plus, float), -np.asarray(R_minus, float)):
        raise ValueError("R+ = -R- is the degenerate fold; see appendix_fold / multilayer")
    cond = check_opening_condition(target, 0, domain.polygon)
    u = pointwise_interpolation(domain, target)
    length = target.cracks[0].length_in_polygon(domain.polygon)
    zero_jump = cond["n_points"] > 0 and cond.get("jump_norm", 0.0) < 1e-12
    predicted = 0.0 if zero_jump else phi(nu, potential.J_infinity) * length
    res = _finish(
        domain, u, potential, "straight_crack", predicted,
        params={
            "nu": nu.tolist(), "xbar": list(map(float, np.asarray(xbar, float))),
            "q_plus": list(map(float, np.asarray(q_plus, float))),
            "q_minus": list(map(float, np.asarray(q_minus, float))),
        },
        conditions={"opening": cond},
        extras={"crack_length": length, "target": "two-region"},
    )
    if not cond["satisfied"] and not zero_jump:
        res.extras["flag"] = "inadmissible-by-condition"
    return res


def appendix_fold(domain: LatticeDomain, crack_y: float, q1: float = 0.0) -> np.ndarray:
    """Half-turn fold (R+ = -R-) collapsing the first row above the crack onto it.

    The collapsed row's ordinates are assigned exactly, so the degenerate
    triangles have determinant exactly zero and strict admissibility fails for
    every mesh size.
    """
    ys = domain.nodes[:, 1]
    levels = np.unique(np.round(ys / (SQRT3 / 2 * domain.epsilon)).astype(int))
    y_rows = levels * (SQRT3 / 2 * domain.epsilon)
    below = levels[y_rows <= crack_y]
    if len(below) == 0 or len(below) == len(levels):
        raise ValueError("crack level must cut the domain")
    nrow = int(below.max())
    y_n = nrow * (SQRT3 / 2 * domain.epsilon)
    rows = np.round(ys / (SQRT3 / 2 * domain.epsilon)).astype(int)
    u = domain.nodes.copy()
    upper = rows > nrow
    # pi rotation about the vertical axis x = cx, folded onto the level y_n
    cx = float(domain.nodes[:, 0].mean()) + q1
    u[upper, 0] = 2 * cx - domain.nodes[upper, 0]
    u[upper, 1] = 2 * y_n + (SQRT3 / 2 * domain.epsilon) - domain.nodes[upper, 1]
    first = rows == nrow + 1
    u[first, 1] = y_n  # exact collapse of the adjacent row
    return u


def polygonal_crack(
    domain: LatticeDomain,
    graph: PolylineGraph,
    R_plus,
    R_minus,
    q_plus,
    q_minus,
    potential: Potential | None = None,
    name: str = "polygonal_crack",
) -> ConstructionResult:
    """Crack along a connected polyline whose segment normals all lie in D.

    Nodes exactly on the polyline take the plus-side value.  The predicted
    limit is the sum of phi(normal) * segment length inside the domain, which
    equals 2 J_inf times the total length.
    """
    potential = potential or Potential()
    if np.allclose(np.asarray(R_plus, float), -np.asarray(R_minus, float)):
        raise ValueError("R+ = -R- is the degenerate fold; see multilayer_fracture")
    target = polyline_two_region_map(graph, R_plus, q_plus, R_minus, q_minus, plus_closed=True)
    for c in target.cracks:
        if not _is_coordinate_direction(c.normal):
            raise ValueError("every polyline segment needs a coordinate-direction normal")
    conds = {}
    worst = math.inf
    predicted = 0.0
    for i, c in enumerate(target.cracks):
        L = c.length_in_polygon(domain.polygon)
        if L <= 0:
            continue
        predicted += phi(c.normal, potential.J_infinity) * L
        cc = check_opening_condition(target, i, domain.polygon, n_samples=32)
        if cc["n_points"]:
            conds[f"segment_{i}"] = cc
            worst = min(worst, cc["delta"])
    u = pointwise_interpolation(domain, target)
    res = _finish(
        domain, u, potential, name, predicted,
        params={"segments": len(target.cracks)},
        conditions={"opening_min": None if math.isinf(worst) else worst, "per_segment": conds},
        extras={"crack_length": predicted / (2 * potential.J_infinity) if potential.J_infinity else 0.0},
    )
    if not math.isinf(worst) and worst <= 0:
        res.extras["flag"] = "inadmissible-by-condition"
    return res


def staircase_approximation(
    domain: LatticeDomain,
    nu,
    xbar,
    R_plus,
    R_minus,
    q_plus,
    q_minus,
    h: float,
    potential: Potential | None = None,
) -> ConstructionResult:
    """Staircase of coordinate-normal steps tracking a line with normal nu not in D.

    Per period of arc length h the two step lengths are split lam : (1-lam)
    between the simplex directions of nu, so the staircase drifts exactly
    along the line and its per-length cost equals phi(nu) with no gap.
    """
    potential = potential or Potential()
    nu = _unit(nu)
    if _is_coordinate_direction(nu):
        return straight_crack(domain, nu, R_plus, R_minus, q_plus, q_minus, xbar, potential)
    nu1, nu2, lam = simplex_decompose(nu)
    target_line = Crack(point=np.asarray(xbar, float), normal=nu, plus_region=0, minus_region=1)
    # strong opening check against both simplex directions
    probe = two_region_map(xbar, nu, R_plus, q_plus, R_minus, q_minus)
    cond = check_opening_condition(probe, 0, domain.polygon, strong=True)

    tau = perp(nu)
    t1, t2 = perp(nu1), perp(nu2)
    l1, l2 = lam * h, (1.0 - lam) * h
    step1 = l1 * np.array([t1 @ tau, t1 @ nu])
    step2 = l2 * np.array([t2 @ tau, t2 @ nu])
    # extent of the domain along tau around the anchor
    rel = domain.polygon - np.asarray(xbar, float)
    smin = float((rel @ tau).min()) - h
    smax = float((rel @ tau).max()) + h
    ds = step1[0] + step2[0]
    n_lo = int(math.floor(smin / ds)) - 1
    n_hi = int(math.ceil(smax / ds)) + 1
    pts = [np.array([n_lo * ds, 0.0]) - 0.5 * step1]
    for _ in range(n_lo, n_hi + 1):
        pts.append(pts[-1] + step1)
        pts.append(pts[-1] + step2)
    bps = np.array(pts)
    graph = PolylineGraph(anchor=np.asarray(xbar, float), nu=nu, breakpoints=bps)
    res = polygonal_crack(domain, graph, R_plus, R_minus, q_plus, q_minus, potential,
                          name="staircase_approximation")
    line_length = target_line.length_in_polygon(domain.polygon)
    res.predicted_limit = phi(nu, potential.J_infinity) * line_length
    res.params.update({"nu": nu.tolist(), "h": h, "lambda": lam,
                       "nu1": nu1.tolist(), "nu2": nu2.tolist()})
    res.conditions["strong_opening"] = cond
    res.extras["line_length"] = line_length
    res.extras["per_length_measured"] = res.measured / line_length if line_length else math.nan
    if not cond["satisfied"]:
        res.extras["flag"] = "inadmissible-by-condition"
    return res


def staircase_density_identity(nu, h: float, J_infinity: float = 1.0) -> dict:
    """Exact per-period check: step costs sum to phi(nu) times the drift length."""
    nu = _unit(nu)
    nu1, nu2, lam = simplex_decompose(nu)
    l1, l2 = lam * h, (1 - lam) * h
    drift = l1 * perp(nu1) + l2 * perp(nu2)
    lhs = phi(nu1, J_infinity) * l1 + phi(nu2, J_infinity) * l2
    rhs = phi(nu, J_infinity) * float(np.hypot(*drift))
    return {"step_cost": lhs, "line_cost": rhs, "residual": lhs - rhs}


# ---------------------------------------------------------------------------
# triple point

def triple_point_map(x0, R1, q1, R2, q2, R3, q3) -> PiecewiseRigidMap:
    """Three 120-degree sectors around x0 with rays along eta2, -eta1, eta3.

    Region 1 covers [60,180] degrees, region 2 covers [300,60], region 3 the
    rest; the rays carry the coordinate normals eta2-perp, eta1-perp and
    eta3-perp respectively, oriented into the plus side.
    """
    x0 = np.asarray(x0, float)

    def ind1(pts):
        rel = pts - x0
        return (rel @ ETA1P >= 0) & (rel @ ETA2P >= 0)

    def ind2(pts):
        rel = pts - x0
        return (rel @ ETA2P <= 0) & (rel @ ETA3P >= 0)

    regions = [
        Region("omega1", ind1, np.asarray(R1, float), np.asarray(q1, float)),
        Region("omega2", ind2, np.asarray(R2, float), np.asarray(q2, float)),
        Region("omega3", lambda pts: np.ones(len(pts), bool), np.asarray(R3, float), np.asarray(q3, float)),
    ]
    cracks = [
        # ray along -eta1 (tangent of eta1-perp), between regions 1 (+) and 3 (-)
        Crack(point=x0, normal=ETA1P.copy(), plus_region=0, minus_region=2, t_range=(0.0, math.inf)),
        # ray along eta2, between regions 1 (+) and 2 (-)
        Crack(point=x0, normal=ETA2P.copy(), plus_region=0, minus_region=1, t_range=(-math.inf, 0.0)),
        # ray along eta3, between regions 2 (+) and 3 (-)
        Crack(point=x0, normal=ETA3P.copy(), plus_region=1, minus_region=2, t_range=(-math.inf, 0.0)),
    ]
    return PiecewiseRigidMap(regions=regions, cracks=cracks)


def junction_compatibility(target: PiecewiseRigidMap, x0) -> float:
    """Orientation of the image of the cell straddling the junction:
    <u1(x0) - u3(x0), perp(u2(x0) - u3(x0))>, positive when compatible."""
    x0 = np.atleast_2d(np.asarray(x0, float))
    u1 = target.regions[0].apply(x0)[0]
    u2 = target.regions[1].apply(x0)[0]
    u3 = target.regions[2].apply(x0)[0]
    return float((u1 - u3) @ perp(u2 - u3))


def central_triangle_index(domain: LatticeDomain, x0) -> int:
    """Index of the stored up-triangle whose centroid is x0, or -1."""
    x0 = np.asarray(x0, float)
    base = x0 - domain.epsilon * (ETA1 + ETA2) / 3.0
    rel = base - domain.offset
    b = rel[1] / (domain.epsilon * SQRT3 / 2.0)
    a = rel[0] / domain.epsilon - 0.5 * b
    ia = domain.node_index(round(a), round(b))
    ib = domain.node_index(round(a) + 1, round(b))
    ic = domain.node_index(round(a), round(b) + 1)
    if min(ia, ib, ic) < 0:
        return -1
    want = (ia, ib, ic)
    tris = domain.triangles
    hits = np.nonzero(
        (tris[:, 0] == want[0]) & (tris[:, 1] == want[1]) & (tris[:, 2] == want[2])
    )[0]
    return int(hits[0]) if len(hits) else -1


def triple_point(
    domain: LatticeDomain,
    x0,
    R1, q1, R2, q2, R3, q3,
    potential: Potential | None = None,
) -> ConstructionResult:
    """Pointwise interpolation of a three-sector rigid map with crack rays in D.

    Verifies the per-ray opening conditions and the junction compatibility
    sign, and reports the determinant of the cell straddling the junction.
    The lattice offset should place that cell on the lattice (see
    lattice.triple_point_offset).
    """
    potential = potential or Potential()
    target = triple_point_map(x0, R1, q1, R2, q2, R3, q3)
    conds = {
        f"ray_{i}": check_opening_condition(target, i, domain.polygon, n_samples=48)
        for i in range(3)
    }
    compat = junction_compatibility(target, x0)
    u = pointwise_interpolation(domain, target)
    predicted = sum(
        phi(c.normal, potential.J_infinity) * c.length_in_polygon(domain.polygon)
        for c in target.cracks
    )
    central = central_triangle_index(domain, x0)
    extras = {"junction_compatibility": compat, "central_triangle": central}
    if central >= 0:
        from .energy import triangle_dets

        extras["central_det"] = float(triangle_dets(domain, u)[central])
    res = _finish(
        domain, u, potential, "triple_point", predicted,
        params={"x0": list(map(float, np.asarray(x0, float)))},
        conditions=conds,
        extras=extras,
    )
    if compat <= 0 or any(not c["satisfied"] for c in conds.values()):
        res.extras["flag"] = "inadmissible-by-condition"
    return res


def symmetric_triple_point_data(delta: float):
    """Identity rotations with translations pushing each sector outward."""
    eye = np.eye(2)
    m1 = np.array([math.cos(math.radians(120)), math.sin(math.radians(120))])
    m2 = np.array([1.0, 0.0])
    m3 = np.array([math.cos(math.radians(240)), math.sin(math.radians(240))])
    return eye, delta * m1, eye, delta * m2, eye, delta * m3


# ---------------------------------------------------------------------------
# surface relaxation for a vertical crack (normal (1,0), not in D)

def surface_relaxation(
    domain: LatticeDomain,
    crack_x: float,
    q_jump,
    potential: Potential | None = None,
) -> ConstructionResult:
    """Single-layer vertical crack with both faces flattened onto straight lines.

    The zigzag faces are straightened by moving the protruding node of each
    row half a spacing toward its own side: the two face edges of that node
    compress by sqrt(3)/2 and its rear bond by 1/2, after which any jump with
    nonnegative normal component keeps all determinants positive.  The cost
    per lattice row is eps*(2 J_inf + 2 J(sqrt3/2) + J(1/2)); the row-
    normalized density (energy / (eps * rows)) converges to that value, while
    the density per unit Euclidean crack length is sqrt(3)/2 times smaller.
    """
    potential = potential or Potential()
    q = np.asarray(q_jump, dtype=float)
    if q[0] < 0:
        raise ValueError("normal jump component must be nonnegative; use multilayer_fracture")
    eps = domain.epsilon
    # column of reference: snap to the nearest half-integer grid of x positions
    t = (domain.nodes[:, 0] - crack_x) / eps
    tq = np.round(2 * t) / 2.0  # nodes sit on a half-integer grid exactly
    # classify relative to the chosen seam: protruding-left at 0, protruding-right at 1/2
    shift = np.round(2 * (t - tq))  # should be 0; tq is the classification value
    del shift
    u = domain.nodes.copy()
    left_face = np.isclose(tq, 0.0)
    right_face = np.isclose(tq, 0.5)
    right_bulk = tq >= 1.0 - 1e-9
    u[left_face, 0] -= 0.5 * eps
    u[right_face, 0] += 0.5 * eps
    u[right_face] += q
    u[right_bulk] += q

    n_rows = int(np.count_nonzero(left_face)) + int(np.count_nonzero(right_face))
    j = potential
    density_row = 2 * j.J_infinity + 2 * float(j(SQRT3 / 2)) + float(j(0.5))
    line = Crack(point=np.array([crack_x + 0.25 * eps, domain.nodes[:, 1].mean()]),
                 normal=np.array([1.0, 0.0]), plus_region=0, minus_region=1)
    L = line.length_in_polygon(domain.polygon)
    nu1, nu2, _ = simplex_decompose((1.0, 0.0))
    in_cone = float(q @ nu1) > 0 and float(q @ nu2) > 0
    res = _finish(
        domain, u, potential, "surface_relaxation",
        predicted=density_row,   # in row-normalized units
        params={"crack_x": crack_x, "q_jump": q.tolist()},
        conditions={"normal_component": float(q[0]), "jump_in_staircase_cone": in_cone},
        extras={
            "rows": n_rows,
            "crack_length": L,
            "density_rows": math.nan,
            "density_euclidean": math.nan,
            "predicted_density_rows": density_row,
            "predicted_density_euclidean": density_row * 2.0 / SQRT3,
            "staircase_density_euclidean": phi((1.0, 0.0), potential.J_infinity),
            "staircase_density_rows": 2.0 * potential.J_infinity,
        },
    )
    if n_rows:
        res.extras["density_rows"] = res.measured / (eps * n_rows)
    if L:
        res.extras["density_euclidean"] = res.measured / L
    return res


# ---------------------------------------------------------------------------
# multilayer fracture (extra sacrificial atom rows along a coordinate crack)

def _frame_for_normal(nu):
    """Right-handed frame (e_row, nu) for a coordinate-direction normal."""
    nu = _unit(nu)
    if not _is_coordinate_direction(nu):
        raise ValueError("multilayer_fracture requires a coordinate-direction normal")
    e_row = -perp(nu)  # perp(e_row) = nu
    return e_row, nu


def multilayer_fracture(
    domain: LatticeDomain,
    nu,
    crack_level: float,
    depth: float,
    n_layers: int,
    style: str = "fold",
    potential: Potential | None = None,
) -> ConstructionResult:
    """Crack with n extra sacrificial rows allowing non-opening limit jumps.

    style="fold": the far side is rotated by half a turn and lands `depth`
    below the crack, so the jump against the minus normal is -depth < 0; one
    extra row suffices and the limit cost per unit length is 4 J_inf, double
    the coordinate-crack value.

    style="translation": the far side keeps its orientation and translates by
    -depth * nu; two extra rows are needed (n_layers = 1 is emitted with the
    midpoint placement and honestly reported inadmissible), and the limit cost
    is 2*(n+1) J_inf per unit length.

    n_layers = 0 reduces to the plain pointwise interpolation of the target.
    Sacrificial rows are placed reversed, shifted far along the row direction,
    in thin bands beside the crack; every bond they carry saturates to J_inf.
    """
    potential = potential or Potential()
    if n_layers < 0:
        raise ValueError("n_layers must be >= 0")
    if style not in ("fold", "translation"):
        raise ValueError("style must be 'fold' or 'translation'")
    e_row, nu = _frame_for_normal(nu)
    eps = domain.epsilon
    g = SQRT3 / 2.0 * eps

    # absolute frame coordinates: rows of constant (x . nu), columns along e_row
    xi = domain.nodes @ e_row
    ups = domain.nodes @ nu
    base = float(ups.min())
    rows = np.round((ups - base) / g).astype(int)
    levels = np.unique(rows)
    row_of_level = {int(r): base + r * g for r in levels}
    below = [r for r in levels if row_of_level[r] <= crack_level]
    if not below or len(below) == len(levels):
        raise ValueError("crack level must cut the domain")
    N = max(below)
    y_N = row_of_level[N]
    W = float(xi.max() - xi.min())
    xi_min, xi_max = float(xi.min()), float(xi.max())
    S = xi_min + xi_max
    Y_f = y_N - depth
    face_row = N + n_layers + 1

    def assemble(frame_xi, frame_up):
        return np.outer(frame_xi, e_row) + np.outer(frame_up, nu)

    u = domain.nodes.copy().astype(float)
    upper = rows >= N + 1 + n_layers
    lower = rows <= N
    # rigid motion of the far side, written in the row frame
    y_face_ref = row_of_level.get(face_row, y_N + (n_layers + 1) * g)
    if style == "fold":
        C_face = 12.0 * W + 4.0 * W * max(0, n_layers - 1)
        up_xi = (S + C_face) - xi[upper]
        up_up = (Y_f + y_face_ref) - ups[upper]
        R_plus = -np.eye(2)
    else:
        up_xi = xi[upper]
        up_up = ups[upper] + (Y_f - y_face_ref)
        R_plus = np.eye(2)
    u[upper] = assemble(up_xi, up_up)
    del lower  # identity on the near side

    layer_meta = []
    for jlay in range(1, n_layers + 1):
        mask = rows == N + jlay
        if not mask.any():
            continue
        if style == "translation" and n_layers == 1:
            # midpoint of the deformed faces plus a quarter-mesh push along the
            # near-side normal; kept for the honest negative result
            lx = xi[mask]
            lu = np.full(mask.sum(), 0.5 * (y_N + Y_f) + 0.25 * eps)
        elif style == "translation" and jlay == n_layers:
            # last row: reversed, parked just below the arriving face, ascending
            C = 12.0 * W + 4.0 * W * (jlay - 1)
            alpha = g / W if W > 0 else 0.0
            lx = (S + C) - xi[mask]
            lu = Y_f - 2.0 * g + alpha * (xi[mask] - xi_min)
        else:
            # reversed stack above the near face, descending tilt on row 1
            C = 12.0 * W + 4.0 * W * (jlay - 1)
            band = y_N + (3.0 + 2.0 * (n_layers - jlay)) * g
            # the tilt must outweigh the band height over the worst offset
            alpha = (1.3 * (band - y_N) / (10.0 * W)) if (jlay == 1 and W > 0) else 0.0
            lx = (S + C) - xi[mask]
            lu = band - alpha * (xi[mask] - xi_min)
        u[mask] = assemble(lx, lu)
        layer_meta.append({"row": int(N + jlay), "nodes": int(mask.sum())})

    # the macro crack line sits half a spacing above the last near-side row
    mid_xi = 0.5 * (xi_min + xi_max)
    line = Crack(point=mid_xi * e_row + (y_N + 0.5 * g) * nu, normal=nu,
                 plus_region=0, minus_region=1)
    L = line.length_in_polygon(domain.polygon)
    predicted = 2.0 * (n_layers + 1) * potential.J_infinity * L
    jump_minus = -depth  # <u+ - u-, R- nu> at the crack for both styles
    res = _finish(
        domain, u, potential, "multilayer_fracture", predicted,
        params={"nu": nu.tolist(), "crack_level": crack_level, "depth": depth,
                "n_layers": n_layers, "style": style},
        conditions={"jump_dot_R_minus_nu": jump_minus,
                    "jump_dot_R_plus_nu": depth if style == "fold" else -depth},
        extras={"crack_length": L, "layers": layer_meta,
                "per_length_measured": math.nan,
                "R_plus_is_half_turn": style == "fold",
                "target_R_plus": R_plus.tolist()},
    )
    if L:
        res.extras["per_length_measured"] = res.measured / L
    if n_layers == 0 or (style == "translation" and n_layers == 1):
        res.extras["flag"] = "expected-inadmissible"
    return res


# ---------------------------------------------------------------------------
# micro-deformed triple point

def microdeformed_triple_point(
    domain: LatticeDomain,
    x0,
    R1, q1, R2, q2, R3, q3,
    segment_length: float,
    A_image,
    X_image,
    potential: Potential | None = None,
) -> ConstructionResult:
    """Triple point with a double-layer patch on part of one crack ray.

    The row of nodes hugging the segment [A, X] of the ray along -eta1
    (A = x0, X = x0 - segment_length * eta1) is detached from both sectors and
    mapped linearly onto [A_image, X_image]: both of its bond layers break and
    its in-row bonds compress by |X'-A'|/|X-A|.  Predicted extra cost over the
    plain triple point is (phi(ray normal) + J(ratio)) * segment length.
    """
    potential = potential or Potential()
    x0 = np.asarray(x0, float)
    A_image = np.asarray(A_image, float)
    X_image = np.asarray(X_image, float)
    d = float(segment_length)
    if d <= 0:
        raise ValueError("segment_length must be positive")
    target = triple_point_map(x0, R1, q1, R2, q2, R3, q3)
    u = pointwise_interpolation(domain, target)
    eps = domain.epsilon
    # The freed row sits one sixth of a row spacing below the junction-level
    # ray and runs past the junction up to the next ray crossing, so the seam
    # toward the right sector coincides with that ray's own stretched strip.
    row_y = x0[1] - SQRT3 / 6.0 * eps
    on_row = np.abs(domain.nodes[:, 1] - row_y) < 1e-9 * eps
    in_span = (domain.nodes[:, 0] >= x0[0] - d - 1e-12) & (
        domain.nodes[:, 0] <= x0[0] + 0.7 * eps
    )
    freed = on_row & in_span
    t = (x0[0] - domain.nodes[freed, 0]) / d
    u[freed] = A_image + np.outer(t, X_image - A_image)

    ratio = float(np.linalg.norm(X_image - A_image)) / d
    base_pred = sum(
        phi(c.normal, potential.J_infinity) * c.length_in_polygon(domain.polygon)
        for c in target.cracks
    )
    extra = (phi(ETA1P, potential.J_infinity) + float(potential(ratio))) * d
    compat = junction_compatibility(target, x0)
    res = _finish(
        domain, u, potential, "microdeformed_triple_point", base_pred + extra,
        params={"x0": x0.tolist(), "segment_length": d,
                "A_image": A_image.tolist(), "X_image": X_image.tolist(),
                "compression_ratio": ratio},
        conditions={"junction_compatibility": compat},
        extras={"freed_nodes": int(freed.sum()), "extra_cost": extra,
                "base_cost": base_pred},
    )
    return res


def microdeformed_grid_search(
    domain_builder,
    x0,
    R1, q1, R2, q2, R3, q3,
    lengths,
    compressions,
    image_offsets,
    potential: Potential | None = None,
):
    """Desk-scale search over patch length, compression and image placement.

    domain_builder(eps_free) -> LatticeDomain is called once; returns the list
    of (params, result) pairs and the cheapest admissible one (or None).
    """
    potential = potential or Potential()
    domain = domain_builder()
    x0 = np.asarray(x0, float)
    results = []
    best = None
    for d in lengths:
        X = x0 - d * ETA1
        for c in compressions:
            for off in image_offsets:
                A_img = x0 + np.asarray(off, float)
                X_img = A_img - c * d * ETA1
                res = microdeformed_triple_point(
                    domain, x0, R1, q1, R2, q2, R3, q3, d, A_img, X_img, potential
                )
                results.append(res)
                if res.admissible and (best is None or res.measured < best.measured):
                    best = res
    return results, best


# ---------------------------------------------------------------------------
# small-deformation scaling

def small_deformation_scaling(
    domain_builder,
    v_target: PiecewiseRigidMap,
    eps_list,
    delta_exponent: float = 0.25,
    potential: Potential | None = None,
) -> list[dict]:
    """Admissibility of u = id + delta(eps) * v across a mesh sweep.

    delta(eps) = eps**delta_exponent, which dominates sqrt(eps); the verdict
    should match the sign of the infinitesimal opening <v+ - v-, nu>.
    """
    potential = potential or Potential()
    out = []
    for eps in eps_list:
        domain = domain_builder(eps)
        delta = float(eps) ** delta_exponent
        # the profile is the displacement field of the target map
        v = pointwise_interpolation(domain, v_target) - domain.nodes
        u = domain.nodes + delta * v
        rep = total_energy(domain, u, potential)
        row = {"eps": float(eps), "delta": delta, "admissible": bool(rep.admissible),
               "energy": rep.bond_sum}
        for i, crack in enumerate(v_target.cracks):
            pts = crack.sample_points(domain.polygon, 16)
            if len(pts) == 0:
                continue
            vj = v_target.trace(i, pts, "+") - v_target.trace(i, pts, "-")
            row[f"v_jump_dot_nu_{i}"] = float((vj @ crack.normal).min())
            row[f"u_jump_dot_nu_over_delta_{i}"] = float((vj @ crack.normal).min())
        out.append(row)
    return out


# ---------------------------------------------------------------------------
# healing demos

def healing_fracture_demo(
    domain: LatticeDomain,
    band_lo: float,
    band_hi: float,
    translation,
    potential: Potential | None = None,
    aux_cut: float | None = None,
    aux_opening: float = 0.1,
) -> ConstructionResult:
    """Inner band of material removed and translated, healed by extra layers.

    The nodes between the levels band_lo and band_hi translate rigidly; the
    upper interface opens (the translation must have a positive vertical
    component) while the lower one interpenetrates, so the naive pointwise
    interpolation is inadmissible.  Healing sacrifices the band's two lowest
    rows as reversed far-parked layers, which restores positive determinants
    at triple the lower interface's plain cost.  With aux_cut set, an
    auxiliary full-width opening crack at that level is composed on top and
    its cost is accounted separately.

    Zero translation returns the identity.
    """
    potential = potential or Potential()
    v = np.asarray(translation, dtype=float)
    if not (band_lo < band_hi):
        raise ValueError("need band_lo < band_hi")
    eps = domain.epsilon
    g = SQRT3 / 2.0 * eps
    ys = domain.nodes[:, 1]
    rows = np.round((ys - ys.min()) / g).astype(int)
    row_y = ys.min() + rows * g
    in_band = (row_y > band_lo) & (row_y < band_hi)
    u = domain.nodes.copy().astype(float)
    extras: dict = {}
    line_lo = Crack(point=np.array([domain.nodes[:, 0].mean(), band_lo]),
                    normal=np.array([0.0, 1.0]), plus_region=0, minus_region=1)
    line_hi = Crack(point=np.array([domain.nodes[:, 0].mean(), band_hi]),
                    normal=np.array([0.0, 1.0]), plus_region=0, minus_region=1)
    L_lo = line_lo.length_in_polygon(domain.polygon)
    L_hi = line_hi.length_in_polygon(domain.polygon)
    if np.allclose(v, 0.0):
        return _finish(domain, u, potential, "healing_translated_region", 0.0,
                       params={"band": [band_lo, band_hi], "translation": v.tolist()},
                       extras={"identity": True})
    if v[1] >= 0:
        raise ValueError("the demo expects a downward translation (lower interface closes)")

    u[in_band] += v
    band_rows = np.unique(rows[in_band])
    if len(band_rows) < 4:
        raise ValueError("band too thin to sacrifice two rows")
    # sacrifice the two lowest band rows; recipe as in multilayer_fracture
    xi = domain.nodes[:, 0]
    W = float(xi.max() - xi.min())
    S = float(xi.min() + xi.max())
    xi_min = float(xi.min())
    y_N = float(row_y[rows == band_rows[0] - 1].max()) if np.any(rows == band_rows[0] - 1) else band_lo - g
    depth = -float(v[1])
    Y_face = y_N + 3.0 * g + float(v[1])
    m1 = rows == band_rows[0]
    m2 = rows == band_rows[1]
    C1, C2 = 12.0 * W, 16.0 * W
    band1 = y_N + 3.0 * g
    a1 = 1.3 * (band1 - y_N) / (10.0 * W)
    u[m1] = np.stack([(S + C1) - xi[m1], band1 - a1 * (xi[m1] - xi_min)], axis=1)
    a2 = g / W
    u[m2] = np.stack([(S + C2) - xi[m2], Y_face - 2.0 * g + a2 * (xi[m2] - xi_min)], axis=1)

    predicted = (
        6.0 * potential.J_infinity * L_lo   # two sacrificial layers: 2*(2+1) J per length
        + 2.0 * potential.J_infinity * L_hi
    )
    conditions = {
        "upper_jump_dot_nu": float(-v[1]),   # outer minus band, against (0, 1): opens
        "lower_jump_dot_nu": float(v[1]),    # band minus outer, against (0, 1): closes
    }
    extras.update({
        "lower_length": L_lo,
        "upper_length": L_hi,
        "interface_griffith_cost": 2.0 * potential.J_infinity * (L_lo + L_hi),
        "sacrificed_rows": [int(band_rows[0]), int(band_rows[1])],
    })

    if aux_cut is not None:
        above = ys > aux_cut
        u[above] += np.array([0.0, aux_opening])
        line_aux = Crack(point=np.array([domain.nodes[:, 0].mean(), aux_cut]),
                         normal=np.array([0.0, 1.0]), plus_region=0, minus_region=1)
        extras["aux_length"] = line_aux.length_in_polygon(domain.polygon)
        extras["aux_cost"] = 2.0 * potential.J_infinity * extras["aux_length"]
        predicted += extras["aux_cost"]

    return _finish(
        domain, u, potential,
        "healing_aux_cut" if aux_cut is not None else "healing_translated_region",
        predicted,
        params={"band": [band_lo, band_hi], "translation": v.tolist(),
                "aux_cut": aux_cut, "aux_opening": aux_opening if aux_cut is not None else None},
        conditions=conditions,
        extras=extras,
    )


def naive_translated_region(domain: LatticeDomain, band_lo: float, band_hi: float,
                            translation, potential: Potential | None = None) -> ConstructionResult:
    """Direct pointwise interpolation of the translated band, without healing."""
    potential = potential or Potential()
    v = np.asarray(translation, dtype=float)
    g = SQRT3 / 2.0 * domain.epsilon
    ys = domain.nodes[:, 1]
    rows = np.round((ys - ys.min()) / g).astype(int)
    row_y = ys.min() + rows * g
    in_band = (row_y > band_lo) & (row_y < band_hi)
    u = domain.nodes.copy().astype(float)
    u[in_band] += v
    return _finish(domain, u, potential, "naive_translated_region", math.inf,
                   params={"band": [band_lo, band_hi], "translation": v.tolist()})
