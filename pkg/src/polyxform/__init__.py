"""Numerics for polynomial-graph averaging operators of Radon and k-plane type."""
__version__ = "0.1.0"

from .admissibility import (AdmissibilityReport, ExponentPair, IndexFamily, analyze,
                            exponents, full_family_exponents, kplane_exponents)
from .cov import FlowSpec, i_functional_mc
from .errors import (AdmissibilityError, CertificationError, CoverageError, DegeneracyError,
                     DimensionError, DomainError, FitError, PolyxformError, PreconditionError)
from .gridset import GridSet
from .measures import (ExtremalShape, MonomialWeight, extremal_measure, interpolation_check,
                       lemma_constant, monomial_measure)
from .multiindex import IndexRange, MultiIndex, dict_compare, enumerate_multiindices
from .necessity import (ExtremalFamily, LogGrowthSpec, boundedness_ratio_sweep, classify_point,
                        extremal_sweep, log_growth_fit)
from .riesz import RieszPolygon, polygon_contains, riesz_polygon
from .sampled import SampledFunction, lp_norm
from .symmetrization import (SmoothTestFunction, full_symmetrize, steiner, sublevel_check,
                             sublevel_constant)
from .transform import (DilationSpec, ParamPoint, apply_T, dilation_check, factorization_check,
                        graph_point, john_residual, translation_map)
from .vandermonde import (coercivity_exponent, coercivity_ratio, cofactor_top_coefficient,
                          evaluate_V)
