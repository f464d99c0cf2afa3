"""Chain complexes of cellular arrangements in the plane and in space."""

from .chains import (
    IntegerMatrix,
    SignedChain,
    SignedOperator,
    UnsignedMatrix,
    apply_operator,
    column_ops,
    filter_entries,
    transpose,
    unsigned_product,
)
from .lar import (
    ChainComplexResult,
    GeometricComplex,
    characteristic_matrix,
    euler_characteristic,
    signed_boundary_1,
    signed_boundary_2,
    signed_measure,
    unsigned_boundary_2,
)
from .planar import arrangement2d, biconnected_filter, intersect_segments
from .pipeline import arrangement3d
from .tgw import cyclic_order, tgw

__all__ = [
    "ChainComplexResult",
    "GeometricComplex",
    "IntegerMatrix",
    "SignedChain",
    "SignedOperator",
    "UnsignedMatrix",
    "apply_operator",
    "arrangement2d",
    "arrangement3d",
    "biconnected_filter",
    "characteristic_matrix",
    "column_ops",
    "cyclic_order",
    "euler_characteristic",
    "filter_entries",
    "intersect_segments",
    "signed_boundary_1",
    "signed_boundary_2",
    "signed_measure",
    "tgw",
    "transpose",
    "unsigned_boundary_2",
    "unsigned_product",
]
