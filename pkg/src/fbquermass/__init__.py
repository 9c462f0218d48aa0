"""Free-boundary quermassintegrals, their cap references and the constrained curvature flow."""
from .capref import CapReference, cap_f, cap_geometry, cap_invert, cap_monotonicity_table
from .flow import FlowConfig, FlowTrace, detect_cap, run, speed_field, step
from .identities import IdentityReport, heintze_karcher, minkowski_residual, newton_slack
from .quermass import (QuermassVector, boundary_body_quermass, gauss_bonnet_check,
                       quermass_vector, variation_check)
from .surface import (AxisymmetricSurface, CurvatureField, MoebiusChart, cap_surface,
                      flat_disk, free_boundary_residual, geometry_eval, random_convex_surface)
from .symfunc import curvature_function_F, newton_maclaurin_margin, sigma_all, sigma_partial

__version__ = "0.1.0"

__all__ = [
    "CapReference",
    "cap_f",
    "cap_geometry",
    "cap_invert",
    "cap_monotonicity_table",
    "FlowConfig",
    "FlowTrace",
    "detect_cap",
    "run",
    "speed_field",
    "step",
    "IdentityReport",
    "heintze_karcher",
    "minkowski_residual",
    "newton_slack",
    "QuermassVector",
    "boundary_body_quermass",
    "gauss_bonnet_check",
    "quermass_vector",
    "variation_check",
    "AxisymmetricSurface",
    "CurvatureField",
    "MoebiusChart",
    "cap_surface",
    "flat_disk",
    "free_boundary_residual",
    "geometry_eval",
    "random_convex_surface",
    "curvature_function_F",
    "newton_maclaurin_margin",
    "sigma_all",
    "sigma_partial",
]
