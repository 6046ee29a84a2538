"""Parametric block correlation structures.

A matrix in this family has ``p`` groups of sizes ``n_1..n_p``. Diagonal
block ``k`` is the CS correlation matrix with within-group correlation
``b_k``; off-diagonal block ``(k, l)`` is the constant ``c_{k,l}``.

The block average map (:func:`block_average`) sends an ``n x n`` matrix to
the ``p x p`` matrix of block means; the block filling map
(:func:`block_fill`) goes the other way. Averaging after filling is the
identity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .matcore import SymMatrix, sym_eigenvalues

__all__ = [
    "GroupStructure",
    "BlockCorrParams",
    "IsoCorrParams",
    "Prop1Decomposition",
    "expand",
    "alphas",
    "phi_matrix",
    "block_average",
    "block_fill",
    "is_member_general",
    "helmert_basis",
    "prop1_compose",
    "prop1_decompose",
]

MEMBER_TOL = 1e-12


@dataclass(frozen=True)
class GroupStructure:
    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes:
            raise ValueError("at least one group is required")
        if any(s != t for s, t in zip(sizes, self.sizes)) or min(sizes) < 1:
            raise ValueError(f"group sizes must be positive integers, got {self.sizes}")
        object.__setattr__(self, "sizes", sizes)

    @property
    def p(self) -> int:
        return len(self.sizes)

    @property
    def n(self) -> int:
        return sum(self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        """Start index of each group in the expanded matrix."""
        return tuple(int(x) for x in np.concatenate(([0], np.cumsum(self.sizes)[:-1])))

    def slice(self, k: int) -> slice:
        start = self.offsets[k]
        return slice(start, start + self.sizes[k])


def _check_open_unit(name: str, value: float) -> None:
    if not (-1.0 < value < 1.0):
        raise ValueError(f"{name} = {value!r} is outside ]-1, 1[")


def _check_b(groups: GroupStructure, b: tuple[float, ...]) -> None:
    if len(b) != groups.p:
        raise ValueError(f"expected {groups.p} within-group correlations, got {len(b)}")
    for k, (nk, bk) in enumerate(zip(groups.sizes, b)):
        _check_open_unit(f"b[{k}]", bk)
        if nk == 1 and bk != 0.0:
            raise ValueError(f"b[{k}] must be 0 for a singleton group, got {bk!r}")


@dataclass(frozen=True, eq=False)
class BlockCorrParams:
    """Within-group correlations ``b`` and a symmetric table ``c`` of between-group ones.

    The diagonal of ``c`` is ignored (stored as zero).
    """

    groups: GroupStructure
    b: tuple[float, ...]
    c: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = tuple(float(x) for x in self.b)
        _check_b(self.groups, b)
        c = np.array(self.c, dtype=float)
        p = self.groups.p
        if c.shape != (p, p):
            raise ValueError(f"c table must be {p}x{p}, got shape {c.shape}")
        if not np.array_equal(c, c.T):
            raise ValueError("c table is not symmetric")
        for k in range(p):
            for l in range(k + 1, p):
                _check_open_unit(f"c[{k},{l}]", c[k, l])
        np.fill_diagonal(c, 0.0)
        c.setflags(write=False)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @classmethod
    def from_upper(cls, groups: GroupStructure, b, upper) -> "BlockCorrParams":
        """Build from the row-major upper triangle ``c_12, c_13, ..., c_{p-1,p}``."""
        p = groups.p
        upper = list(upper)
        if len(upper) != p * (p - 1) // 2:
            raise ValueError(f"expected {p * (p - 1) // 2} between-group values, got {len(upper)}")
        c = np.zeros((p, p))
        iu = np.triu_indices(p, k=1)
        c[iu] = upper
        c = c + c.T
        return cls(groups, tuple(b), c)


@dataclass(frozen=True)
class IsoCorrParams:
    """Block structure with one common between-group correlation ``c``."""

    groups: GroupStructure
    b: tuple[float, ...]
    c: float

    def __post_init__(self):
        b = tuple(float(x) for x in self.b)
        _check_b(self.groups, b)
        _check_open_unit("c", float(self.c))
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", float(self.c))

    def with_c(self, c: float) -> "IsoCorrParams":
        return IsoCorrParams(self.groups, self.b, c)

    def to_block(self) -> BlockCorrParams:
        p = self.groups.p
        table = np.full((p, p), self.c)
        np.fill_diagonal(table, 0.0)
        return BlockCorrParams(self.groups, self.b, table)


Params = Union[BlockCorrParams, IsoCorrParams]


def _as_block(params: Params) -> BlockCorrParams:
    if isinstance(params, IsoCorrParams):
        return params.to_block()
    return params


def alphas(params: Params) -> np.ndarray:
    """Diagonal of the block average: ``1/n_k + (n_k - 1)/n_k * b_k``."""
    n = np.asarray(params.groups.sizes, dtype=float)
    b = np.asarray(params.b, dtype=float)
    return 1.0 / n + (n - 1.0) / n * b


def phi_matrix(params: Params) -> SymMatrix:
    """Block average of ``expand(params)``, built directly from alphas and the c table."""
    block = _as_block(params)
    m = np.array(block.c, dtype=float)
    np.fill_diagonal(m, alphas(params))
    return SymMatrix(m)


def expand(params: Params) -> SymMatrix:
    block = _as_block(params)
    groups = block.groups
    a = block_fill(SymMatrix(block.c), groups).entries.copy()
    for k, bk in enumerate(block.b):
        sl = groups.slice(k)
        a[sl, sl] = bk
    np.fill_diagonal(a, 1.0)
    return SymMatrix(a)


def _check_dim(m: SymMatrix, expected: int, what: str) -> None:
    if m.dim != expected:
        raise ValueError(f"matrix has dimension {m.dim}, expected {expected} ({what})")


def block_average(m: SymMatrix, groups: GroupStructure) -> SymMatrix:
    _check_dim(m, groups.n, "total size of the groups")
    a = np.asarray(m)
    starts = list(groups.offsets)
    sums = np.add.reduceat(np.add.reduceat(a, starts, axis=0), starts, axis=1)
    sizes = np.asarray(groups.sizes, dtype=float)
    avg = sums / np.outer(sizes, sizes)
    # reduceat sums rows and columns in different orders; restore exact symmetry
    avg = np.triu(avg) + np.triu(avg, 1).T
    return SymMatrix(avg)


def block_fill(c: SymMatrix, groups: GroupStructure) -> SymMatrix:
    _check_dim(c, groups.p, "number of groups")
    sizes = groups.sizes
    return SymMatrix(np.repeat(np.repeat(np.asarray(c), sizes, axis=0), sizes, axis=1))


def is_member_general(m: SymMatrix, groups: GroupStructure, tol: float = MEMBER_TOL) -> bool:
    """Test membership in the wider class of block matrices.

    Off-diagonal blocks must be constant within ``tol`` and each diagonal
    block ``A_kk`` must satisfy ``A_kk - mean(A_kk) J >= 0`` (smallest
    eigenvalue at least ``-tol``). Unit diagonal is not required.
    """
    _check_dim(m, groups.n, "total size of the groups")
    a = np.asarray(m)
    for k in range(groups.p):
        rk = groups.slice(k)
        for l in range(k + 1, groups.p):
            blk = a[rk, groups.slice(l)]
            if np.max(np.abs(blk - blk.mean())) > tol:
                return False
        diag = a[rk, rk]
        centered = diag - diag.mean()
        if groups.sizes[k] > 1 and sym_eigenvalues(SymMatrix(_symmetric(centered)))[0] < -tol:
            return False
    return True


def _symmetric(a: np.ndarray) -> np.ndarray:
    # subtracting a scalar keeps exact symmetry; this guards derived arrays only
    return np.triu(a) + np.triu(a, 1).T


def helmert_basis(n: int) -> np.ndarray:
    """Orthonormal ``n x (n-1)`` basis of the complement of the all-ones vector.

    Column ``j`` (1-based) holds ``j`` entries ``1/sqrt(j(j+1))`` followed by
    ``-j/sqrt(j(j+1))`` and zeros.
    """
    r = np.zeros((n, n - 1))
    for j in range(1, n):
        norm = np.sqrt(j * (j + 1.0))
        r[:j, j - 1] = 1.0 / norm
        r[j, j - 1] = -j / norm
    return r


@dataclass(frozen=True, eq=False)
class Prop1Decomposition:
    """``C = mu J + R B R^T`` with ``R = helmert_basis(n)``.

    ``B`` is ``None`` when ``n == 1`` (the complement is empty).
    """

    mu: float
    B: Optional[SymMatrix]
    R: np.ndarray = field(repr=False)


def prop1_compose(mu: float, B: Optional[SymMatrix], n: int, tol: float = 1e-10) -> SymMatrix:
    if n == 1:
        if B is not None:
            raise ValueError("B must be None for n == 1")
        return SymMatrix([[float(mu)]])
    if B is None or B.dim != n - 1:
        raise ValueError(f"B must have dimension {n - 1}")
    if sym_eigenvalues(B)[0] < -tol:
        raise ValueError("B is not positive semidefinite")
    r = helmert_basis(n)
    c = mu * np.ones((n, n)) + r @ np.asarray(B) @ r.T
    return SymMatrix(_symmetric(c))


def prop1_decompose(c: SymMatrix, tol: float = 1e-10) -> Prop1Decomposition:
    a = np.asarray(c)
    n = c.dim
    mu = float(a.mean())
    r = helmert_basis(n)
    if n == 1:
        return Prop1Decomposition(mu, None, r)
    centered = _symmetric(a - mu)
    if sym_eigenvalues(SymMatrix(centered))[0] < -tol:
        raise ValueError("C - mean(C) J has a negative eigenvalue")
    b = _symmetric(r.T @ centered @ r)
    return Prop1Decomposition(mu, SymMatrix(b), r)
