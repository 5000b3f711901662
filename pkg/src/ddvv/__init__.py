"""Numerical verification of the DDVV commutator inequality.

For real symmetric ``B_1..B_m``, ``sum_{r,s} ||[B_r, B_s]||^2 <= (sum_r ||B_r||^2)^2``,
with equality exactly for rotated, conjugated copies of the pair
``mu (E_12 + E_21), mu (E_11 - E_22)``. Geometrically this is
``rho + rho_perp <= |H|^2 + c`` at every point of a submanifold of a space form.
"""
__version__ = "0.1.0"

from .algebra import (
    IndexScheme,
    SymFamily,
    build_basis,
    commutator,
    compound,
    family_coefficients,
    frob_sq,
    gram_entry_basis,
    gram_row_identity,
)
from .core import (
    EqualityCertificate,
    GapReport,
    ReducedForm,
    ddvv_gap,
    detect_equality,
    identity_31_check,
    mixed_gap,
    objective,
    reduce,
    rotate_family,
)
from .errors import DDVVError, InputError, InternalInconsistencyError
from .kernels import BACKEND
