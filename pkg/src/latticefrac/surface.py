"""Anisotropic surface density of the triangular lattice.

psi is the gauge of the hexagon conv(S); psi_star its polar,
psi_star(nu) = max_k |<nu, eta_k>|; the crack energy density is
phi = J_inf * (4/sqrt(3)) * psi_star.  The unit ball {psi_star <= 1} is the
hexagon spanned by the coordinate directions D scaled by 2/sqrt(3); its
vertex-pair (simplex) decomposition drives the staircase constructions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .lattice import ETAS

SQRT3 = math.sqrt(3.0)

# Wulff-polygon vertex directions: the six coordinate directions sorted by
# angle (30, 90, 150, 210, 270, 330 degrees)
WULFF_DIRECTIONS = np.array(
    [
        [math.cos(math.pi / 6 + k * math.pi / 3), math.sin(math.pi / 6 + k * math.pi / 3)]
        for k in range(6)
    ]
)


def psi(xi) -> float:
    """Gauge of the hexagon conv(S): sector-wise linear, 1 on the S directions."""
    xi = np.asarray(xi, dtype=float)
    return float((2.0 / SQRT3) * np.max(np.abs(WULFF_DIRECTIONS[:3] @ xi)))


def psi_star(nu) -> float:
    """Dual norm: max_k |<nu, eta_k>| over the three lattice directions."""
    nu = np.asarray(nu, dtype=float)
    return float(np.max(np.abs(ETAS @ nu)))


def phi(nu, J_infinity: float = 1.0) -> float:
    """Crack energy per unit length for normal nu."""
    return J_infinity * (4.0 / SQRT3) * psi_star(nu)


def dual_identity_residual(nu) -> float:
    """2 psi_star(nu) - sum_k |<nu, eta_k>|; identically zero up to rounding."""
    nu = np.asarray(nu, dtype=float)
    dots = np.abs(ETAS @ nu)
    return 2.0 * float(np.max(dots)) - float(np.sum(dots))


@dataclass(frozen=True)
class WulffPolygon:
    """Unit ball {psi_star <= 1}: hexagon with vertices at (2/sqrt3) * D."""

    vertices: np.ndarray = field(
        default_factory=lambda: (2.0 / SQRT3) * WULFF_DIRECTIONS.copy()
    )

    @property
    def sectors(self) -> list[tuple[int, int]]:
        """Vertex-index pairs bounding each 60-degree sector."""
        return [(k, (k + 1) % 6) for k in range(6)]

    def polar_table(self, n: int = 360, J_infinity: float = 1.0) -> np.ndarray:
        """(n, 2) rows of (angle in radians, phi at that direction)."""
        ang = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
        vals = [phi((math.cos(a), math.sin(a)), J_infinity) for a in ang]
        return np.column_stack([ang, vals])


def simplex_decompose(nu):
    """Adjacent coordinate directions (nu1, nu2) and weight lam for a normal nu.

    Writes nu normalized to the {psi_star = 1} boundary as
    lam*(2/sqrt3)*nu1 + (1-lam)*(2/sqrt3)*nu2.  nu1 is the counterclockwise
    end vertex of nu's sector, so a nu aligned with a coordinate direction
    returns lam = 1 with nu1 that direction (ties resolved toward the lower
    sector).
    """
    nu = np.asarray(nu, dtype=float)
    norm = math.hypot(nu[0], nu[1])
    if norm == 0.0:
        raise ValueError("cannot decompose the zero vector")
    theta = math.atan2(nu[1], nu[0]) % (2.0 * math.pi)
    # vertex angles are pi/6 + k*pi/3; sector k is the arc ending at vertex k
    t = (theta - math.pi / 6.0) / (math.pi / 3.0)
    k_end = int(math.ceil(t - 1e-12)) % 6
    k_start = (k_end - 1) % 6
    nu1 = WULFF_DIRECTIONS[k_end]
    nu2 = WULFF_DIRECTIONS[k_start]
    w1 = (2.0 / SQRT3) * nu1
    w2 = (2.0 / SQRT3) * nu2
    nu_n = nu / psi_star(nu)
    denom = w1[0] * w2[1] - w1[1] * w2[0]
    lam = (nu_n[0] * w2[1] - nu_n[1] * w2[0]) / denom
    return nu1.copy(), nu2.copy(), float(min(1.0, max(0.0, lam)))
