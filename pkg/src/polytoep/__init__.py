"""Fredholm theory for Toeplitz tuples with polynomial symbols on polydisc
Hardy spaces: certified boundary criteria, three independent index routes
(operator-theoretic, algebraic zero counting, perturbation/degree oracle),
product-formula shortcuts, and essential-spectrum sampling."""

__version__ = "0.1.0"

from .certify import (
    BoundaryCertificate,
    as_condition_check,
    boundary_lower_bound,
    essential_spectrum_cloud,
    essential_spectrum_membership,
    polydisc_lower_bound,
)
from .koszul import koszul_route, range_sum_check
from .oracle import OracleConfig, perturbed_count, univariate_index, winding_number
from .poly import (
    MultiPoly,
    NotEliminableError,
    SymbolTuple,
    exact_poly,
    float_poly,
    symbols,
    tuple_from_json,
    tuple_to_json,
)
from .report import JobConfig, run_index, run_spectrum
from .tensor import TrigPoly, disc_tuple_index, tensor_tuple_index
from .zeros import algebraic_index, common_zeros, gcd_reduce

__all__ = [
    "BoundaryCertificate",
    "JobConfig",
    "MultiPoly",
    "NotEliminableError",
    "OracleConfig",
    "SymbolTuple",
    "TrigPoly",
    "algebraic_index",
    "as_condition_check",
    "boundary_lower_bound",
    "common_zeros",
    "disc_tuple_index",
    "essential_spectrum_cloud",
    "essential_spectrum_membership",
    "exact_poly",
    "float_poly",
    "gcd_reduce",
    "koszul_route",
    "perturbed_count",
    "polydisc_lower_bound",
    "range_sum_check",
    "run_index",
    "run_spectrum",
    "symbols",
    "tensor_tuple_index",
    "tuple_from_json",
    "tuple_to_json",
    "univariate_index",
    "winding_number",
    "__version__",
]
