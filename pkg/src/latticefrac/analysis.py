"""Diagnostics: good/bad triangle classification, slicing lower bound,
rigid-cluster extraction, local crack-opening necessity test, convergence study.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energy import Potential, bond_lengths, total_energy, triangle_energies
from .geometry import perp
from .lattice import LatticeDomain
from .surface import phi

SQRT3 = math.sqrt(3.0)


@dataclass
class TriangleClassification:
    s: float
    bad_triangles: np.ndarray          # indices with energy above s * J_inf
    bad_bonds_per_direction: dict      # k -> bond indices with J >= s * J_inf
    surface_proxy: float               # eps * #bad_triangles

    @property
    def n_bad(self) -> int:
        return len(self.bad_triangles)


@dataclass
class RigidCluster:
    triangles: np.ndarray
    nodes: np.ndarray
    angle: float
    R: np.ndarray
    q: np.ndarray
    rms_residual: float


@dataclass
class RigidPartition:
    clusters: list[RigidCluster] = field(default_factory=list)

    def __len__(self):
        return len(self.clusters)


def classify_triangles(
    domain: LatticeDomain, u: np.ndarray, s: float, potential: Potential | None = None
) -> TriangleClassification:
    """Split triangles at the energy threshold s * J_inf, plus per-direction bad bonds."""
    if not (0.0 < s < 1.0):
        raise ValueError("threshold s must lie in (0, 1)")
    potential = potential or Potential()
    te = triangle_energies(domain, u, potential)
    bad = np.nonzero(te > s * potential.J_infinity)[0]
    r = bond_lengths(domain, u)
    jb = potential(r)
    per_dir = {
        k: np.nonzero((domain.bond_dirs == k) & (jb >= s * potential.J_infinity))[0]
        for k in (1, 2, 3)
    }
    return TriangleClassification(
        s=float(s),
        bad_triangles=bad,
        bad_bonds_per_direction=per_dir,
        surface_proxy=float(domain.epsilon * len(bad)),
    )


def slicing_lower_bound(
    domain: LatticeDomain, u: np.ndarray, s: float, potential: Potential | None = None
) -> float:
    """sum_k s * J_inf * eps * #{direction-k bonds at or above the threshold}.

    Never exceeds the bond energy: every counted bond contributes at least
    s * J_inf * eps to its direction's sum.
    """
    potential = potential or Potential()
    cls = classify_triangles(domain, u, s, potential)
    total = 0.0
    for k in (1, 2, 3):
        total += s * potential.J_infinity * domain.epsilon * len(cls.bad_bonds_per_direction[k])
    return float(total)


def _fit_rotation(X: np.ndarray, Y: np.ndarray):
    """Least-squares rotation + translation mapping reference X onto Y."""
    xc, yc = X.mean(axis=0), Y.mean(axis=0)
    X0, Y0 = X - xc, Y - yc
    num = float(np.sum(X0[:, 0] * Y0[:, 1] - X0[:, 1] * Y0[:, 0]))
    den = float(np.sum(X0 * Y0))
    theta = math.atan2(num, den)
    c, s = math.cos(theta), math.sin(theta)
    R = np.array([[c, -s], [s, c]])
    q = yc - R @ xc
    res = Y - (X @ R.T + q)
    rms = float(np.sqrt(np.mean(np.sum(res**2, axis=1)))) if len(X) else 0.0
    return theta, R, q, rms


def extract_rigid_partition(
    domain: LatticeDomain,
    u: np.ndarray,
    s: float,
    potential: Potential | None = None,
    triangle_subset: np.ndarray | None = None,
) -> RigidPartition:
    """Edge-connected components of good triangles with fitted rigid motions."""
    potential = potential or Potential()
    cls = classify_triangles(domain, u, s, potential)
    good = np.ones(domain.n_triangles, dtype=bool)
    good[cls.bad_triangles] = False
    if triangle_subset is not None:
        sel = np.zeros(domain.n_triangles, dtype=bool)
        sel[triangle_subset] = True
        good &= sel
    tri_ids = np.nonzero(good)[0]
    if len(tri_ids) == 0:
        return RigidPartition()

    # union-find over triangles sharing an edge
    edge_owner: dict[tuple[int, int], int] = {}
    parent = {int(t): int(t) for t in tri_ids}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[rx] = ry

    tris = domain.triangles
    for t in tri_ids:
        vs = tris[t]
        for i in range(3):
            e = (int(min(vs[i], vs[(i + 1) % 3])), int(max(vs[i], vs[(i + 1) % 3])))
            if e in edge_owner:
                union(int(t), edge_owner[e])
            else:
                edge_owner[e] = int(t)

    groups: dict[int, list[int]] = {}
    for t in tri_ids:
        groups.setdefault(find(int(t)), []).append(int(t))

    u = np.asarray(u, float)
    clusters = []
    for members in groups.values():
        nodes = np.unique(tris[members].ravel())
        theta, R, q, rms = _fit_rotation(domain.nodes[nodes], u[nodes])
        clusters.append(
            RigidCluster(
                triangles=np.asarray(sorted(members), dtype=np.int64),
                nodes=nodes,
                angle=theta,
                R=R,
                q=q,
                rms_residual=rms,
            )
        )
    clusters.sort(key=lambda c: -len(c.triangles))
    return RigidPartition(clusters=clusters)


def opening_crack_diagnostic(
    domain: LatticeDomain,
    u: np.ndarray,
    x0,
    rho: float,
    nu,
    s: float = 0.5,
    potential: Potential | None = None,
    tol: float = 0.05,
) -> dict:
    """Local energy density vs phi, and the jump/rotation inner products.

    Restricts the bond measure and the rigid-cluster fit to the square of side
    rho centered at x0 with an edge orthogonal to nu.  When the measured
    density does not exceed (1+tol)*phi(nu), an opening crack is expected:
    both <u+ - u-, R(+/-) nu> should be >= -tol * |jump|.
    """
    potential = potential or Potential()
    if rho <= 2 * domain.epsilon:
        raise ValueError("window must span more than two mesh sizes")
    x0 = np.asarray(x0, float)
    nu = np.asarray(nu, float)
    nu = nu / np.hypot(*nu)
    tau = perp(nu)

    rel = domain.nodes - x0
    coords = np.stack([rel @ tau, rel @ nu], axis=1)
    in_sq = np.all(np.abs(coords) <= rho / 2.0, axis=1)

    rep = total_energy(domain, u, potential)
    mids = 0.5 * (domain.nodes[domain.bonds[:, 0]] + domain.nodes[domain.bonds[:, 1]])
    mrel = mids - x0
    bond_in = (np.abs(mrel @ tau) <= rho / 2.0) & (np.abs(mrel @ nu) <= rho / 2.0)
    local_energy = float(rep.bond_measure[bond_in].sum())
    density = local_energy / rho
    phi_nu = phi(nu, potential.J_infinity)

    tri_nodes_in = in_sq[domain.triangles].all(axis=1)
    subset = np.nonzero(tri_nodes_in)[0]
    part = extract_rigid_partition(domain, u, s, potential, triangle_subset=subset)
    out = {
        "x0": x0.tolist(),
        "rho": float(rho),
        "nu": nu.tolist(),
        "local_energy": local_energy,
        "density": density,
        "phi": phi_nu,
        "density_le_phi": bool(density <= (1 + tol) * phi_nu),
        "n_clusters": len(part),
        "conclusive": False,
    }
    if len(part) < 2:
        out["reason"] = "fewer than two rigid clusters in the window"
        return out
    # identify sides by the cluster centroid's normal coordinate
    best_plus, best_minus = None, None
    for c in part.clusters:
        side = float((domain.nodes[c.nodes].mean(axis=0) - x0) @ nu)
        if side > 0 and (best_plus is None or len(c.nodes) > len(best_plus.nodes)):
            best_plus = c
        if side < 0 and (best_minus is None or len(c.nodes) > len(best_minus.nodes)):
            best_minus = c
    if best_plus is None or best_minus is None:
        out["reason"] = "no cluster pair straddles the line"
        return out
    up = best_plus.R @ x0 + best_plus.q
    um = best_minus.R @ x0 + best_minus.q
    jump = up - um
    out.update(
        {
            "conclusive": True,
            "jump": jump.tolist(),
            "jump_norm": float(np.hypot(*jump)),
            "angle_plus": best_plus.angle,
            "angle_minus": best_minus.angle,
            "dot_R_plus_nu": float(jump @ (best_plus.R @ nu)),
            "dot_R_minus_nu": float(jump @ (best_minus.R @ nu)),
        }
    )
    # record simplex-direction products for the stronger conjectured condition
    from .surface import simplex_decompose
    from .lattice import D_VECTORS

    if not any(
        min(np.linalg.norm(nu - d), np.linalg.norm(nu + d)) < 1e-9 for d in D_VECTORS
    ):
        nu1, nu2, _ = simplex_decompose(nu)
        out["dot_R_plus_nu1"] = float(jump @ (best_plus.R @ nu1))
        out["dot_R_minus_nu1"] = float(jump @ (best_minus.R @ nu1))
        out["dot_R_plus_nu2"] = float(jump @ (best_plus.R @ nu2))
        out["dot_R_minus_nu2"] = float(jump @ (best_minus.R @ nu2))
    if out["density_le_phi"]:
        thresh = -tol * out["jump_norm"]
        out["necessity_holds"] = bool(
            out["dot_R_plus_nu"] >= thresh and out["dot_R_minus_nu"] >= thresh
        )
    return out


def convergence_study(scenario, eps_list, predicted: float | None = None) -> dict:
    """Run scenario(eps) -> ConstructionResult over a decreasing mesh list.

    Returns the table of (eps, measured, predicted, relative error) plus a
    fitted convergence order from a log-log slope where errors allow it.
    """
    eps_list = list(eps_list)
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps_list must be strictly decreasing")
    rows = []
    for eps in eps_list:
        res = scenario(eps)
        pred = predicted if predicted is not None else res.predicted_limit
        err = abs(res.measured - pred) / abs(pred) if pred else abs(res.measured)
        rows.append(
            {
                "eps": float(eps),
                "measured": res.measured,
                "predicted": pred,
                "rel_error": err,
                "admissible": bool(res.admissible),
            }
        )
    errs = np.array([r["rel_error"] for r in rows])
    eps_arr = np.array([r["eps"] for r in rows])
    order = math.nan
    mask = errs > 1e-14
    if mask.sum() >= 2:
        slope, _ = np.polyfit(np.log(eps_arr[mask]), np.log(errs[mask]), 1)
        order = float(slope)
    return {"rows": rows, "order": order}
