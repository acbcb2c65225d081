"""Polar arcs, gradient canyons and a rescaling-class invariant for plane germs."""

from .equivalence import Decision, EquivalenceReport, delta_equivalent, inv2_equivalent
from .errors import PolarInvError
from .invariant import DeltaL, Inv2, PairData, cstar_transform, delta_L, inv2, pair_data
from .options import Options
from .oracle import Scale, Shear, dgr_sampling, order_sum_check, transform_germ
from .polar import PolarArc, canyons, gradient_degree, polar_arcs
from .polynomial import BivarPoly, parse_poly, resultant_x, tangent_cone
from .puiseux import PuiseuxArc, compose_germ, puiseux_roots
from .scalars import Approx, Exact, univariate_roots

__all__ = [
    "Approx",
    "BivarPoly",
    "Decision",
    "DeltaL",
    "EquivalenceReport",
    "Exact",
    "Inv2",
    "Options",
    "PairData",
    "PolarArc",
    "PolarInvError",
    "PuiseuxArc",
    "Scale",
    "Shear",
    "canyons",
    "compose_germ",
    "cstar_transform",
    "delta_L",
    "delta_equivalent",
    "dgr_sampling",
    "gradient_degree",
    "inv2",
    "inv2_equivalent",
    "order_sum_check",
    "pair_data",
    "parse_poly",
    "polar_arcs",
    "puiseux_roots",
    "resultant_x",
    "tangent_cone",
    "transform_germ",
    "univariate_roots",
]
