"""Exact computations for CR maps between real algebraic manifolds.

Polynomials and truncated power series over Q(i), generic real algebraic
manifolds, their tangent CR operators and Segre varieties, the reflection
identities for a CR map, and annihilating polynomials that certify that
each map component is algebraic.
"""

from .core.numbers import GaussianRational, gr
from .core.polynomial import MultiPolynomial, TruncatedSeries, VariableTable, conjugate_swap, series_compose
from .core.rational import RationalFunction
from .engine.annihilator import Annihilator, NotFound, find_annihilator, multivariate_annihilator
from .engine.separate import separate_algebraicity
from .errors import CRAlgError, HypothesisFailed, OrderInsufficientError, ParseError
from .manifold import DefiningSystem, check_defining_system, levi_cone_nondegenerate, normalize_at_point
from .pipeline import extend_map, hypothesis_report
from .reflection import CRMapData
from .segre import segre_variety

__version__ = "0.1.0"

__all__ = [
    "Annihilator",
    "CRAlgError",
    "CRMapData",
    "DefiningSystem",
    "GaussianRational",
    "HypothesisFailed",
    "MultiPolynomial",
    "NotFound",
    "OrderInsufficientError",
    "ParseError",
    "RationalFunction",
    "TruncatedSeries",
    "VariableTable",
    "check_defining_system",
    "conjugate_swap",
    "extend_map",
    "find_annihilator",
    "gr",
    "hypothesis_report",
    "levi_cone_nondegenerate",
    "multivariate_annihilator",
    "normalize_at_point",
    "segre_variety",
    "separate_algebraicity",
    "series_compose",
]
