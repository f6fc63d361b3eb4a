"""Higher traces of linear maps as averages over unit spheres of normed exterior powers."""

from .exterior import (
    char_poly_coeffs,
    compound_matrix,
    hodge_star_3d,
    lambda_k_minors,
    subset_rank,
    subset_unrank,
)
from .bodies import LpBody, PolytopeBody, SmoothSupportBody, polytope_from_halfspaces
from .measures import MeasureSpec, integrate_boundary, sphere_rule
from .isotropy import anisotropy_tensor, compute_T, discrete_trace, trace_average
from .grassmann import eberlein_lambda
from .harmonics import alpha_cone_derivative, first_variation_L, moment2_4

__version__ = "0.1.0"

__all__ = [
    "LpBody",
    "MeasureSpec",
    "PolytopeBody",
    "SmoothSupportBody",
    "alpha_cone_derivative",
    "anisotropy_tensor",
    "char_poly_coeffs",
    "compound_matrix",
    "compute_T",
    "discrete_trace",
    "eberlein_lambda",
    "first_variation_L",
    "hodge_star_3d",
    "integrate_boundary",
    "lambda_k_minors",
    "moment2_4",
    "polytope_from_halfspaces",
    "sphere_rule",
    "subset_rank",
    "subset_unrank",
    "trace_average",
]
