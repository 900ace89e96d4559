"""Fractional Hankel transform toolkit with numerical checks of its Abelian
and Tauberian theorems."""

__version__ = "0.1.0"

from ._errors import ConfigError, DomainError
from .dsl import FunctionSpec, ParseError, parse_expr
from .quadrature import QuadratureOptions, QuadratureResult
from .special import BesselOrder, HEtaPair, bessel_j, bessel_zeros, gamma_fn, h_constant
from .transform import (FrhtParams, TransformGrid, check_additivity, frht_forward,
                        frht_inverse, frht_via_hankel, hankel_transform, kernel_eval,
                        make_params, tabulate)

__all__ = [
    "BesselOrder", "ConfigError", "DomainError", "FrhtParams", "FunctionSpec", "HEtaPair",
    "ParseError", "QuadratureOptions", "QuadratureResult", "TransformGrid", "bessel_j",
    "bessel_zeros", "check_additivity", "frht_forward", "frht_inverse", "frht_via_hankel",
    "gamma_fn", "h_constant", "hankel_transform", "kernel_eval", "make_params",
    "parse_expr", "tabulate",
]
