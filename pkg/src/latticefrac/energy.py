"""Interatomic potential, discrete bond energy, and the orientation constraint.

The energy of a displacement u on a clipped lattice is

    E(u) = sum over bonds of  eps * J(|u(i) - u(j)| / eps)

restricted to maps whose piecewise-affine interpolation has det(grad u) > 0 on
every stored triangle.  Inadmissible maps still get full per-bond diagnostics;
only the headline `total` carries the +inf marker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import ETAS, LatticeDomain, lattice_position

SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class Potential:
    """Normalized 12-6 potential J(r) = J_inf * (r^-12 - 2 r^-6 + 1).

    The minimum sits at r = 1 with J(1) = 0, J -> J_inf at infinity and
    J -> +inf at r -> 0+.
    """

    J_infinity: float = 1.0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r <= 0):
            raise ValueError("bond length ratio must be positive")
        inv6 = r ** -6.0
        return self.J_infinity * (inv6 * inv6 - 2.0 * inv6 + 1.0)

    def derivative(self, r):
        r = np.asarray(r, dtype=float)
        return self.J_infinity * (-12.0 * r ** -13.0 + 12.0 * r ** -7.0)

    @property
    def z0(self) -> float:
        return 1.0


def lj_potential(r, J_infinity: float = 1.0):
    """J(r) for scalar or array r; rejects r <= 0."""
    return Potential(J_infinity)(r)


@dataclass
class EnergyReport:
    total: float                    # E(u): bond sum if admissible, +inf otherwise
    bond_sum: float                 # always the finite bond sum
    per_direction: np.ndarray       # (3,) split by bond direction
    bond_measure: np.ndarray        # (B,) atoms eps * J(|du|/eps)
    admissible: bool
    violating_triangles: np.ndarray
    bad_triangles: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    s_threshold: float | None = None

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "bond_sum": self.bond_sum,
            "per_direction": [float(v) for v in self.per_direction],
            "admissible": bool(self.admissible),
            "violating_triangles": [int(t) for t in self.violating_triangles],
            "bad_triangles": [int(t) for t in self.bad_triangles],
            "s_threshold": self.s_threshold,
        }


def _check_sizes(domain: LatticeDomain, u: np.ndarray) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != domain.nodes.shape:
        raise ValueError(f"displacement shape {u.shape} != nodes shape {domain.nodes.shape}")
    if not np.all(np.isfinite(u)):
        raise ValueError("displacement contains non-finite values")
    return u


def bond_lengths(domain: LatticeDomain, u: np.ndarray) -> np.ndarray:
    """Deformed bond lengths divided by eps."""
    d = domain.bond_vectors(u)
    return np.hypot(d[:, 0], d[:, 1]) / domain.epsilon


def triangle_dets(domain: LatticeDomain, u: np.ndarray) -> np.ndarray:
    """det(grad u) on every stored triangle (reference value 1 for the identity)."""
    u = np.asarray(u, dtype=float)
    p = domain.triangle_points(u)
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    num = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    ref = SQRT3 / 2.0 * domain.epsilon ** 2
    return num / ref


def triangle_gradient(domain: LatticeDomain, u: np.ndarray, tri: int) -> np.ndarray:
    """Constant gradient of the affine interpolation on one triangle."""
    return triangle_gradients(domain, u)[tri]


def triangle_gradients(domain: LatticeDomain, u: np.ndarray) -> np.ndarray:
    """(T, 2, 2) gradients: deformed edge matrix times inverse reference edges."""
    u = _check_sizes(domain, u)
    ref = domain.triangle_points()
    dfm = domain.triangle_points(u)
    E = np.stack([ref[:, 1] - ref[:, 0], ref[:, 2] - ref[:, 0]], axis=-1)  # columns
    D = np.stack([dfm[:, 1] - dfm[:, 0], dfm[:, 2] - dfm[:, 0]], axis=-1)
    detE = E[:, 0, 0] * E[:, 1, 1] - E[:, 0, 1] * E[:, 1, 0]
    invE = np.empty_like(E)
    invE[:, 0, 0] = E[:, 1, 1]
    invE[:, 0, 1] = -E[:, 0, 1]
    invE[:, 1, 0] = -E[:, 1, 0]
    invE[:, 1, 1] = E[:, 0, 0]
    invE /= detE[:, None, None]
    return D @ invE


def triangle_energies(domain: LatticeDomain, u: np.ndarray, potential: Potential) -> np.ndarray:
    """Per-triangle sum_k J(|grad u . eta_k|) used for good/bad classification."""
    u = _check_sizes(domain, u)
    p = domain.triangle_points(u)
    # the three deformed side lengths over eps equal |grad u . eta_k|
    e01 = p[:, 1] - p[:, 0]
    e02 = p[:, 2] - p[:, 0]
    e12 = p[:, 2] - p[:, 1]
    out = np.zeros(domain.n_triangles)
    for e in (e01, e02, e12):
        out += potential(np.hypot(e[:, 0], e[:, 1]) / domain.epsilon)
    return out


def is_admissible(domain: LatticeDomain, u: np.ndarray, margin: float = 0.0):
    """Orientation check: det(grad u) > margin * sqrt(3)/2 on every triangle.

    margin = 0 is the strict constraint; the scale factor expresses the margin
    in units of the reference cell's Jacobian.
    """
    if margin < 0:
        raise ValueError("margin must be nonnegative")
    u = _check_sizes(domain, u)
    dets = triangle_dets(domain, u)
    thresh = margin * (SQRT3 / 2.0)
    bad = np.nonzero(~(dets > thresh))[0]
    return len(bad) == 0, bad


def total_energy(
    domain: LatticeDomain,
    u: np.ndarray,
    potential: Potential | None = None,
    s_threshold: float | None = None,
    margin: float = 0.0,
) -> EnergyReport:
    """Assemble the bond energy, its direction split, and the admissibility verdict."""
    potential = potential or Potential()
    u = _check_sizes(domain, u)
    r = bond_lengths(domain, u)
    atoms = domain.epsilon * potential(r)
    per_dir = np.array(
        [float(atoms[domain.bond_dirs == k].sum()) for k in (1, 2, 3)]
    )
    bond_sum = float(atoms.sum())
    ok, violating = is_admissible(domain, u, margin=margin)
    bad = np.empty(0, dtype=np.int64)
    if s_threshold is not None:
        te = triangle_energies(domain, u, potential)
        bad = np.nonzero(te > s_threshold * potential.J_infinity)[0]
    return EnergyReport(
        total=bond_sum if ok else math.inf,
        bond_sum=bond_sum,
        per_direction=per_dir,
        bond_measure=atoms,
        admissible=ok,
        violating_triangles=violating,
        bad_triangles=bad,
        s_threshold=s_threshold,
    )


def directional_energy(
    domain: LatticeDomain, u: np.ndarray, k: int, potential: Potential | None = None
) -> float:
    """Bond sum restricted to direction k in {1,2,3}."""
    if k not in (1, 2, 3):
        raise ValueError("direction index must be 1, 2 or 3")
    potential = potential or Potential()
    u = _check_sizes(domain, u)
    mask = domain.bond_dirs == k
    d = domain.bond_vectors(u)[mask]
    r = np.hypot(d[:, 0], d[:, 1]) / domain.epsilon
    return float(np.sum(domain.epsilon * potential(r)))


def dist_SO2(A: np.ndarray) -> float:
    """Frobenius distance from a 2x2 matrix to the rotation group."""
    A = np.asarray(A, dtype=float)
    s = np.linalg.svd(A, compute_uv=False)
    if np.linalg.det(A) >= 0:
        return float(math.hypot(s[0] - 1.0, s[1] - 1.0))
    return float(math.hypot(s[0] - 1.0, s[1] + 1.0))


def ground_state_scan(
    r_min: float,
    r_max: float,
    samples: int,
    cutoff_radius: float,
    potential: Potential | None = None,
) -> dict:
    """Energy per particle of the uniformly scaled lattice, on a grid of spacings.

    e(r) sums J(r * |k|) over lattice sites k within the cutoff, with the
    shared-bond factor 1/2 so that the nearest-neighbour truncation gives
    3 J(r) per particle.  Also reports the density form f(rho) = rho * e(r).
    """
    if not (0 < r_min < r_max):
        raise ValueError("need 0 < r_min < r_max")
    if cutoff_radius < 3:
        raise ValueError("cutoff_radius must be at least 3")
    if samples < 2:
        raise ValueError("need at least two samples")
    potential = potential or Potential()

    m = int(math.ceil(cutoff_radius)) + 1
    a, b = np.meshgrid(np.arange(-m, m + 1), np.arange(-m, m + 1), indexing="ij")
    pts = lattice_position(a.ravel(), b.ravel(), 1.0)
    norms = np.hypot(pts[:, 0], pts[:, 1])
    norms = norms[(norms > 0) & (norms <= cutoff_radius + 1e-12)]

    rs = np.linspace(r_min, r_max, samples)
    e = np.array([0.5 * float(np.sum(potential(r * norms))) for r in rs])
    i0 = int(np.argmin(e))
    rho = 2.0 / (SQRT3 * rs ** 2)
    return {
        "r": rs,
        "e": e,
        "r_bar": float(rs[i0]),
        "e_min": float(e[i0]),
        "rho": rho,
        "f": rho * e,
        "neighbor_count": int(len(norms)),
        "cutoff_radius": float(cutoff_radius),
    }
