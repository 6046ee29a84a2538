"""Dense symmetric matrix kernel.

Storage, Cholesky-based positive definiteness tests, a cyclic Jacobi
eigensolver and the closed-form facts about compound symmetry (CS)
matrices ``v I + c (J - I)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "ConvergenceError",
    "SymMatrix",
    "CsSpec",
    "cs_matrix",
    "cs_eigenvalues",
    "cs_is_pd",
    "cholesky_pd",
    "sym_eigenvalues",
    "min_eigenvalue",
]

DEFAULT_PIVOT_TOL = 1e-12
DEFAULT_EIG_TOL = 1e-14
MAX_SWEEPS = 100


class ConvergenceError(ArithmeticError):
    """Raised when an iterative routine exhausts its iteration budget."""


class SymMatrix:
    """Immutable dense real symmetric matrix.

    The input must be exactly symmetric; nothing is averaged away.

    >>> SymMatrix([[1.0, 0.5], [0.5, 1.0]]).dim
    2
    """

    __slots__ = ("_a",)

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise ValueError("matrix dimension must be >= 1")
        if not np.array_equal(a, a.T, equal_nan=True):
            raise ValueError("matrix is not exactly symmetric")
        a.setflags(write=False)
        self._a = a

    @classmethod
    def identity(cls, n: int) -> "SymMatrix":
        return cls(np.eye(n))

    @classmethod
    def diag(cls, values) -> "SymMatrix":
        return cls(np.diag(np.asarray(values, dtype=float)))

    @property
    def dim(self) -> int:
        return self._a.shape[0]

    @property
    def entries(self) -> np.ndarray:
        """Read-only view of the underlying array."""
        return self._a

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._a
        return self._a.astype(dtype)

    def __getitem__(self, idx):
        return self._a[idx]

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return np.array_equal(self._a, other._a)

    def __hash__(self):
        return hash(self._a.tobytes())

    def __repr__(self):
        return f"SymMatrix(dim={self.dim})"


@dataclass(frozen=True)
class CsSpec:
    """Compound symmetry matrix of size ``n``: ``v`` on the diagonal, ``c`` elsewhere."""

    n: int
    v: float
    c: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"CS size must be a positive integer, got {self.n}")


def cs_matrix(spec: CsSpec) -> SymMatrix:
    a = np.full((spec.n, spec.n), float(spec.c))
    np.fill_diagonal(a, float(spec.v))
    return SymMatrix(a)


def cs_eigenvalues(spec: CsSpec) -> tuple[float, float, int]:
    """Return ``(lambda_ones, lambda_perp, mult_perp)``.

    ``lambda_ones = v + (n-1) c`` belongs to the all-ones eigenvector and
    ``lambda_perp = v - c`` has multiplicity ``n - 1``.
    """
    return spec.v + (spec.n - 1) * spec.c, spec.v - spec.c, spec.n - 1


def cs_is_pd(spec: CsSpec) -> bool:
    if spec.n == 1:
        return spec.v > 0
    return -spec.v / (spec.n - 1) < spec.c < spec.v


def cholesky_pd(m: SymMatrix, tol: float = DEFAULT_PIVOT_TOL) -> bool:
    """True iff the Cholesky factorization of ``m`` succeeds with every pivot > ``tol``.

    A pivot is the squared diagonal entry of the factor, i.e. the Schur
    complement diagonal value the square root is taken of.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    a = np.asarray(m, dtype=float)
    if not np.all(np.isfinite(a)):
        return False
    try:
        low = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return False
    pivots = np.diagonal(low) ** 2
    return bool(np.all(pivots > tol))


@lru_cache(maxsize=None)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    # Tournament ordering: each round is a set of disjoint (p, q) pairs, and
    # every pair p < q appears exactly once per sweep.
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                pairs.append((min(a, b), max(a, b)))
        if pairs:
            p, q = np.array(pairs, dtype=np.intp).T
            rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(a: np.ndarray) -> float:
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.linalg.norm(off))


def sym_eigenvalues(m: SymMatrix, tol: float = DEFAULT_EIG_TOL) -> np.ndarray:
    """All eigenvalues of ``m`` in ascending order, by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``tol * ||m||_F``. Rotations on disjoint index pairs are applied
    together, which is the same arithmetic as applying them one by one.

    Raises
    ------
    ConvergenceError
        If :data:`MAX_SWEEPS` sweeps do not reach the tolerance.
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    a = np.array(m, dtype=float)
    n = a.shape[0]
    scale = float(np.linalg.norm(a))
    if n == 1 or scale == 0.0:
        return np.sort(np.diagonal(a).copy())
    target = tol * scale
    rounds = _round_robin(n)
    for _ in range(MAX_SWEEPS):
        if _off_norm(a) < target:
            return np.sort(np.diagonal(a).copy())
        for p, q in rounds:
            apq = a[p, q]
            active = apq != 0.0
            if not np.any(active):
                continue
            p, q, apq = p[active], q[active], apq[active]
            app, aqq = a[p, p], a[q, q]
            # tan of the rotation angle, smaller root; stays finite when
            # apq is tiny next to the diagonal gap
            diff = aqq - app
            sign = np.where(diff >= 0.0, 1.0, -1.0)
            t = sign * 2.0 * np.abs(apq) / (np.abs(diff) + np.hypot(diff, 2.0 * apq))
            t = np.where(apq < 0.0, -t, t)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c

            rp, rq = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp, cq = a[:, p].copy(), a[:, q].copy()
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
    if _off_norm(a) < target:
        return np.sort(np.diagonal(a).copy())
    raise ConvergenceError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps (dim={n})")


def min_eigenvalue(m: SymMatrix, tol: float = DEFAULT_EIG_TOL) -> float:
    return float(sym_eigenvalues(m, tol)[0])
