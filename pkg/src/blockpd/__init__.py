"""Positive definiteness of block correlation matrices with compound-symmetry diagonal blocks."""

from .blockmodel import (
    BlockCorrParams,
    GroupStructure,
    IsoCorrParams,
    alphas,
    block_average,
    block_fill,
    expand,
    phi_matrix,
)
from .matcore import CsSpec, SymMatrix, cholesky_pd, sym_eigenvalues
from .oracle import dense_pd, eigen_curve, pencil_roots
from .pdanalysis import (
    DetPoly,
    NoPdIntervalError,
    PdInterval,
    cs_sufficient_interval,
    equal_size_interval,
    interlaced_roots,
    is_pd,
    pd_interval,
    two_group_bound,
)

__version__ = "0.1.0"
