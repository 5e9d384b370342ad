"""Triangular-lattice pair-potential fracture simulator.

Nearest-neighbour 12-6 bonds on a clipped triangular lattice under a strict
positive-determinant constraint, with crack constructions, surface-density
evaluators, diagnostics, and a log-barrier minimizer.
"""

from .lattice import (
    ETA1,
    ETA2,
    ETA3,
    D_VECTORS,
    EmptyLatticeError,
    LatticeDomain,
    LatticeVectors,
    S_VECTORS,
    build_domain,
    direction_index,
    triangles_crossing_segment,
    triple_point_offset,
)
from .energy import (
    EnergyReport,
    Potential,
    directional_energy,
    dist_SO2,
    ground_state_scan,
    is_admissible,
    lj_potential,
    total_energy,
    triangle_dets,
    triangle_gradient,
    triangle_gradients,
)
from .surface import (
    WulffPolygon,
    dual_identity_residual,
    phi,
    psi,
    psi_star,
    simplex_decompose,
)
from .pwrigid import (
    Crack,
    PiecewiseRigidMap,
    PolylineGraph,
    Region,
    check_opening_condition,
    pointwise_interpolation,
    polyline_two_region_map,
    rot,
    two_region_map,
)
from .constructions import (
    ConstructionResult,
    appendix_fold,
    healing_fracture_demo,
    junction_compatibility,
    microdeformed_grid_search,
    microdeformed_triple_point,
    multilayer_fracture,
    naive_translated_region,
    polygonal_crack,
    small_deformation_scaling,
    staircase_approximation,
    staircase_density_identity,
    straight_crack,
    surface_relaxation,
    symmetric_triple_point_data,
    triple_point,
    triple_point_map,
)
from .analysis import (
    RigidPartition,
    TriangleClassification,
    classify_triangles,
    convergence_study,
    extract_rigid_partition,
    opening_crack_diagnostic,
    slicing_lower_bound,
)
from .minimize import (
    BoundaryCondition,
    SolverParams,
    apply_boundary_condition,
    barrier_objective,
    minimize_energy,
)

__version__ = "0.1.0"
