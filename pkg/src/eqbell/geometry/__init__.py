"""Exact polyhedral computation."""
from eqbell.geometry.linalg import affine_dimension, exact_rank, hull_equations, nullspace_of
from eqbell.geometry.polytope import (
    HRepresentation,
    InfeasibleError,
    UnboundedError,
    facet_enumeration,
    facetness,
    facetness_value,
    is_facet,
    vertex_enumeration,
)
