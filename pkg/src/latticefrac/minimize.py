"""Constrained minimization of the bond energy over orientation-preserving maps.

A log-barrier on the per-triangle determinant keeps iterates strictly
feasible; the outer loop shrinks the barrier weight, the inner loop runs
gradient descent with Barzilai-Borwein step seeding and a backtracking line
search that never leaves the feasible set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .energy import Potential, total_energy, triangle_dets
from .lattice import LatticeDomain

SQRT3 = math.sqrt(3.0)


@dataclass
class BoundaryCondition:
    """Clamped node set with prescribed positions."""

    clamped: np.ndarray           # bool mask over nodes
    values: np.ndarray            # (N, 2); meaningful where clamped

    @staticmethod
    def from_edges(
        domain: LatticeDomain,
        edges: list[tuple[np.ndarray, np.ndarray]],
        width: float,
        transform,
    ) -> "BoundaryCondition":
        """Clamp nodes within `width` of the given boundary segments and map
        them through `transform` (callable on an (N,2) array)."""
        mask = np.zeros(domain.n_nodes, dtype=bool)
        for p0, p1 in edges:
            p0 = np.asarray(p0, float)
            d = np.asarray(p1, float) - p0
            L2 = float(d @ d)
            rel = domain.nodes - p0
            t = np.clip(rel @ d / L2, 0.0, 1.0)
            dist = np.linalg.norm(rel - t[:, None] * d, axis=1)
            mask |= dist <= width
        vals = domain.nodes.copy()
        vals[mask] = np.atleast_2d(transform(domain.nodes[mask]))
        return BoundaryCondition(clamped=mask, values=vals)


@dataclass
class SolverParams:
    mu0: float = 1e-3
    mu_factor: float = 0.2
    mu_rounds: int = 4
    grad_tol: float = 1e-6
    max_iters: int = 2000
    armijo: float = 1e-4
    backtrack: float = 0.5
    min_step: float = 1e-14
    margin: float = 0.0

    def __post_init__(self):
        if not (0 < self.mu_factor < 1) or self.mu0 <= 0:
            raise ValueError("barrier schedule must be positive and decreasing")


def incremental_minimize(
    domain: LatticeDomain,
    bc_builder,
    loads,
    init: np.ndarray,
    params: SolverParams | None = None,
    potential: Potential | None = None,
):
    """Continuation over a load schedule: minimize at each load from the
    previous solution.  bc_builder(load) -> BoundaryCondition.  Returns the
    final (u, report, combined trace)."""
    u = np.asarray(init, float).copy()
    full_trace = []
    rep = None
    for load in loads:
        bc = bc_builder(load)
        u0 = u.copy()
        u0[bc.clamped] = bc.values[bc.clamped]
        u, rep, tr = minimize_energy(domain, bc, u0, params, potential)
        for row in tr:
            row["load"] = float(load)
        full_trace.extend(tr)
    return u, rep, full_trace


def apply_boundary_condition(domain: LatticeDomain, bc: BoundaryCondition):
    """Identity off the clamps, prescribed on them; flags clamped triangles
    that already violate the orientation constraint."""
    u = domain.nodes.copy()
    u[bc.clamped] = bc.values[bc.clamped]
    dets = triangle_dets(domain, u)
    fully = bc.clamped[domain.triangles].all(axis=1)
    bad = np.nonzero(fully & ~(dets > 0))[0]
    return u, bad


def _energy_grad(domain: LatticeDomain, u: np.ndarray, potential: Potential):
    d = domain.bond_vectors(u)
    r = np.hypot(d[:, 0], d[:, 1]) / domain.epsilon
    e = float(np.sum(domain.epsilon * potential(r)))
    coef = potential.derivative(r) / (r * domain.epsilon)   # d/du of eps*J(|du|/eps)
    f = coef[:, None] * d
    grad = np.zeros_like(u)
    np.add.at(grad, domain.bonds[:, 1], f)
    np.add.at(grad, domain.bonds[:, 0], -f)
    return e, grad


def _barrier_grad(domain: LatticeDomain, u: np.ndarray, mu: float):
    p = domain.triangle_points(u)
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]   # unnormalized
    ref = SQRT3 / 2.0 * domain.epsilon**2
    scaled = det / ref
    if np.any(scaled <= 0):
        return math.inf, None
    val = -mu * float(np.sum(np.log(scaled * 2.0 / SQRT3)))
    # d det / d vertices
    g1 = np.stack([e2[:, 1], -e2[:, 0]], axis=1)    # wrt vertex 1
    g2 = np.stack([-e1[:, 1], e1[:, 0]], axis=1)    # wrt vertex 2
    g0 = -(g1 + g2)
    w = (-mu / det)[:, None]
    grad = np.zeros_like(u)
    np.add.at(grad, domain.triangles[:, 0], w * g0)
    np.add.at(grad, domain.triangles[:, 1], w * g1)
    np.add.at(grad, domain.triangles[:, 2], w * g2)
    return val, grad


def barrier_objective(
    domain: LatticeDomain, u: np.ndarray, mu: float, potential: Potential | None = None
):
    """Value and gradient of  E(u) - mu * sum_T log(det grad u * 2/sqrt3)."""
    potential = potential or Potential()
    e, ge = _energy_grad(domain, u, potential)
    b, gb = _barrier_grad(domain, u, mu)
    if gb is None:
        return math.inf, None
    return e + b, ge + gb


def minimize_energy(
    domain: LatticeDomain,
    bc: BoundaryCondition,
    init: np.ndarray,
    params: SolverParams | None = None,
    potential: Potential | None = None,
):
    """Barrier-continuation descent from a feasible start.

    Returns (displacement, EnergyReport, trace).  Each trace row records the
    barrier weight, objective, gradient norm, smallest determinant and step.
    """
    params = params or SolverParams()
    potential = potential or Potential()
    u = np.asarray(init, float).copy()
    u[bc.clamped] = bc.values[bc.clamped]
    dets = triangle_dets(domain, u)
    if not np.all(dets > params.margin * SQRT3 / 2.0):
        raise ValueError("initial state is not strictly admissible")
    free = ~bc.clamped
    trace = []
    mu = params.mu0
    for _ in range(params.mu_rounds):
        f, g = barrier_objective(domain, u, mu, potential)
        g[bc.clamped] = 0.0
        step = 1e-2 * domain.epsilon / max(1e-30, float(np.abs(g).max()))
        prev_u = None
        prev_g = None
        for it in range(params.max_iters):
            gnorm = float(np.linalg.norm(g[free]))
            trace.append(
                {
                    "mu": mu,
                    "iter": it,
                    "objective": f,
                    "grad_norm": gnorm,
                    "min_det": float(triangle_dets(domain, u).min()),
                    "energy": float(total_energy(domain, u, potential).bond_sum),
                }
            )
            if gnorm <= params.grad_tol:
                break
            if prev_u is not None:
                du = (u - prev_u)[free].ravel()
                dg = (g - prev_g)[free].ravel()
                dgdg = float(dg @ dg)
                if dgdg > 0:
                    step = abs(float(du @ dg)) / dgdg
            step = max(step, params.min_step)
            d = -g
            t = step
            accepted = False
            gd = float(np.sum(g[free] * d[free]))
            while t >= params.min_step:
                u_try = u + t * d
                u_try[bc.clamped] = bc.values[bc.clamped]
                f_try, g_try = barrier_objective(domain, u_try, mu, potential)
                if f_try < f + params.armijo * t * gd and np.isfinite(f_try):
                    prev_u, prev_g = u, g
                    u, f, g = u_try, f_try, g_try
                    g[bc.clamped] = 0.0
                    accepted = True
                    break
                t *= params.backtrack
            if not accepted:
                break
        mu *= params.mu_factor
    report = total_energy(domain, u, potential, margin=params.margin)
    return u, report, trace
