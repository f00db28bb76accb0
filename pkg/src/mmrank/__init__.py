"""Exact-arithmetic workbench for matrix multiplication tensor rank.

Builds multiplication tensors, checks decompositions coefficient by
coefficient over the rationals or any prime field, machine-checks the
symmetry-based derivation that 2 x 2 multiplication has rank at most 7,
searches for low-rank decompositions with flip-graph moves, and compiles
verified decompositions into runnable recursive multiplication programs.
"""

from .fields import F2, FieldElement, MixedFieldError, PrimeField, Q, Rationals, parse_field
from .tensors import (
    Decomposition,
    Matrix,
    RankOneTerm,
    Tensor,
    expand_decomposition,
    expand_term,
    matmul_tensor,
    standard_decomposition,
    verify,
)

__version__ = "0.1.0"
