"""
Analysis module for qvariant.
"""

from qvariant.analysis.errors import QVariantError
from qvariant.analysis.qcore import HalfInt, QContext, qpoch, qpow
from qvariant.analysis.qdiff import (
    Params2,
    Params3,
    QDifferenceEquation,
    make_qhypergeometric,
    make_qheun,
    make_variant_deg2,
    make_variant_deg3,
)

__all__ = [
    "QVariantError",
    "HalfInt",
    "QContext",
    "qpoch",
    "qpow",
    "Params2",
    "Params3",
    "QDifferenceEquation",
    "make_qhypergeometric",
    "make_qheun",
    "make_variant_deg2",
    "make_variant_deg3",
]
