"""Brute-force checks independent of the root-finding path.

* :func:`pencil_roots` gets the PD interval from the extreme eigenvalues
  of ``S = D^{-1/2} (J - I) D^{-1/2}``: ``d(c) = 0`` iff ``-1/c`` is an
  eigenvalue of ``S``.
* :func:`dense_pd` expands to ``n x n`` and looks at the spectrum.
* :func:`eigen_curve` tabulates the smallest eigenvalue of ``A`` and of
  its block average along a grid of ``c``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Sequence, TextIO

import numpy as np

from .blockmodel import IsoCorrParams, Params, expand, phi_matrix
from .matcore import SymMatrix, min_eigenvalue, sym_eigenvalues

__all__ = [
    "DENSE_PD_TOL",
    "EigenCurve",
    "pencil_roots",
    "dense_min_eigenvalue",
    "dense_pd",
    "eigen_curve",
]

DENSE_PD_TOL = 1e-9


def pencil_roots(alphas: Sequence[float]) -> tuple[float, float]:
    """Return ``(-1/lambda_max, -1/lambda_min)`` of ``S``.

    ``S`` has one positive and ``p - 1`` negative eigenvalues, so both
    values are finite and of opposite signs.
    """
    a = np.asarray(alphas, dtype=float)
    if a.ndim != 1 or a.size < 2:
        raise ValueError("need at least two alphas")
    if np.any(a <= 0.0):
        raise ValueError("all alphas must be > 0")
    w = 1.0 / np.sqrt(a)
    s = np.outer(w, w)
    np.fill_diagonal(s, 0.0)
    ev = sym_eigenvalues(SymMatrix(s))
    lam_min, lam_max = ev[0], ev[-1]
    if not (lam_min < 0.0 < lam_max):
        raise ArithmeticError(f"unexpected inertia of S: extremes {lam_min}, {lam_max}")
    return float(-1.0 / lam_max), float(-1.0 / lam_min)


def dense_min_eigenvalue(params: Params) -> float:
    return min_eigenvalue(expand(params))


def dense_pd(params: Params, c: float | None = None) -> bool:
    """Ground-truth PD decision on the full ``n x n`` matrix.

    ``c`` overrides the common correlation of an :class:`IsoCorrParams`.
    """
    if c is not None:
        if not isinstance(params, IsoCorrParams):
            raise TypeError("a c override needs IsoCorrParams")
        params = params.with_c(c)
    return dense_min_eigenvalue(params) > DENSE_PD_TOL


@dataclass(frozen=True)
class EigenCurve:
    c_values: tuple[float, ...]
    lambda_full: tuple[float, ...]
    lambda_avg: tuple[float, ...]

    def __post_init__(self):
        if not (len(self.c_values) == len(self.lambda_full) == len(self.lambda_avg)):
            raise ValueError("curve columns have different lengths")
        if any(b <= a for a, b in zip(self.c_values, self.c_values[1:])):
            raise ValueError("c values must be strictly increasing")

    def write_csv(self, fh: TextIO) -> None:
        fh.write("c,lambda_full,lambda_avg\n")
        for row in zip(self.c_values, self.lambda_full, self.lambda_avg):
            fh.write(",".join(f"{x:.17g}" for x in row) + "\n")

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "EigenCurve":
        lines = text.splitlines()
        if not lines or lines[0] != "c,lambda_full,lambda_avg":
            raise ValueError("missing CSV header")
        cols = [tuple(float(x) for x in line.split(",")) for line in lines[1:] if line]
        c, full, avg = zip(*cols) if cols else ((), (), ())
        return cls(tuple(c), tuple(full), tuple(avg))

    def sign_changes(self, column: str) -> list[tuple[int, int]]:
        """Adjacent row pairs ``(i, i+1)`` where the column changes sign."""
        vals = np.asarray(getattr(self, column))
        pos = vals > 0.0
        return [(i, i + 1) for i in range(len(vals) - 1) if pos[i] != pos[i + 1]]


def eigen_curve(params: IsoCorrParams, c_min: float, c_max: float, steps: int) -> EigenCurve:
    if not c_min < c_max:
        raise ValueError("c_min must be below c_max")
    if steps < 2:
        raise ValueError("steps must be >= 2")
    grid = np.linspace(c_min, c_max, steps)
    full, avg = [], []
    for c in grid:
        at_c = params.with_c(float(c))
        full.append(min_eigenvalue(expand(at_c)))
        avg.append(min_eigenvalue(phi_matrix(at_c)))
    return EigenCurve(tuple(float(c) for c in grid), tuple(full), tuple(avg))
