"""Polytopes of behaviors: H/V representations, vertex enumeration and exact LP."""
from .dd import DEFAULT_BUDGET, AffineReduction, enumerate_vertices, extreme_rays, reduce_affine
from .lp import LinearMax, LPResult, max_over_points, maximize_linear, simplex_max
from .polytope import HPolytope, VPolytope, nd_hrep, nsnd_hrep, verify_vertices
from .porta import dumps_ieq, dumps_poi, loads_ieq, loads_poi, read_ieq, read_poi, write_ieq, write_poi
from .vertices import (
    NCycleVertexSpec,
    bob_nd_vertices,
    contextual_sign_vectors,
    deterministic_vertices,
    local_vertices,
    ncycle_contextual_vertices,
    ncycle_nd_vertices,
    ncycle_vertex_specs,
)

__all__ = [
    "DEFAULT_BUDGET",
    "AffineReduction",
    "HPolytope",
    "LPResult",
    "LinearMax",
    "NCycleVertexSpec",
    "VPolytope",
    "bob_nd_vertices",
    "contextual_sign_vectors",
    "deterministic_vertices",
    "dumps_ieq",
    "dumps_poi",
    "enumerate_vertices",
    "extreme_rays",
    "loads_ieq",
    "loads_poi",
    "local_vertices",
    "max_over_points",
    "maximize_linear",
    "ncycle_contextual_vertices",
    "ncycle_nd_vertices",
    "ncycle_vertex_specs",
    "nd_hrep",
    "nsnd_hrep",
    "read_ieq",
    "read_poi",
    "reduce_affine",
    "simplex_max",
    "verify_vertices",
    "write_ieq",
    "write_poi",
]
