"""Random planar shadows of regular polytopes in R^3 and R^4.

Area (chorowidth) and perimeter (periwidth) of the orthogonal projection onto a
uniformly random 2-plane, their joint moments by Monte Carlo and quadrature,
and exact reference constants.
"""
from .closedforms import reference_table
from .errors import ConfigurationError, DegenerateShadowError, DomainError, UnsupportedMethodError
from .estimators import MomentReport, ShadowSample, estimate_mc, estimate_quadrature3, shadow
from .geometry import Polygon, area, convex_hull, perimeter
from .polytopes import Name, Polytope, make_polytope

__all__ = [
    "ConfigurationError", "DegenerateShadowError", "DomainError", "UnsupportedMethodError",
    "MomentReport", "Name", "Polygon", "Polytope", "ShadowSample",
    "area", "convex_hull", "estimate_mc", "estimate_quadrature3", "make_polytope",
    "perimeter", "reference_table", "shadow",
]
