"""Root-scale size estimates for integrals of absolute rational powers,
with numerical oracles to check them against."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .polynomial import ComplexPoly, RootSet, roots
from .estimator import (
    ExponentPair,
    SizeEstimate,
    estimate,
    estimate_pure,
    estimate_supform,
    estimate_symmetric,
    is_finite,
    nondegenerate,
)
from .expr import ARPExpr
from .oracle import OracleResult, compare, integrate_disk, integrate_disk_mc
from .scales import absolute_scales, r_discriminant, scale_table
from .stability import Germ, GermFamily, critical_exponent

__all__ = [
    "ARPExpr", "ComplexPoly", "ExponentPair", "Germ", "GermFamily", "OracleResult", "RootSet",
    "SizeEstimate", "absolute_scales", "compare", "critical_exponent", "estimate", "estimate_pure",
    "estimate_supform", "estimate_symmetric", "integrate_disk", "integrate_disk_mc", "is_finite",
    "nondegenerate", "r_discriminant", "roots", "scale_table",
]
