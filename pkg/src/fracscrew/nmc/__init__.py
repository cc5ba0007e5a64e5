"""Helicoid geometry, nonlocal mean curvature and fractional perimeter."""

from .geometry import (
    BOUNDARY_TOL, Ball, HalfSpace, RegionLabel, ScrewSurface, classify, classify_many, helicoid_point,
    random_plus_points, screw_motion, symmetry_map,
)
from .pv import NMCError, NMCResult, PVQuadrature, nmc_at, nmc_helicoid_symmetrized, richardson, shell_signed_area
from .perimeter import (
    AngularQuadrature, Box, BoxUnion, InteractionResult, PerimeterError, PerimeterResult, ball_interaction,
    decompose, fractional_perimeter, half_space, halfspace_reference, interaction_L, ray_integrals,
)
