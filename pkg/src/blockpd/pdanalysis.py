"""Positive definiteness decisions and the PD interval of the common correlation.

For a block correlation matrix ``A`` the question ``A > 0`` reduces to the
``p x p`` block average ``phi(A)``. With a common between-group
correlation ``c``, ``phi(A) = diag(alpha) + c (J - I)`` is a matrix pencil
in ``c`` whose leading minors ``d_k`` have known closed forms and real,
interlaced roots. The PD interval is ``]r_neg, r_pos[`` where ``r_neg`` is
the only root of ``d_p`` in ``]-sqrt(a1 a2), 0[`` and ``r_pos`` the only
root in ``]0, sqrt(a1 a2)]`` (``a1 <= a2`` the two smallest alphas).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .blockmodel import (
    BlockCorrParams,
    GroupStructure,
    IsoCorrParams,
    Params,
    alphas,
    block_average,
    is_member_general,
    phi_matrix,
)
from .matcore import SymMatrix, cholesky_pd, sym_eigenvalues

__all__ = [
    "NoPdIntervalError",
    "DetPoly",
    "PdInterval",
    "PdVerdict",
    "det_poly_recurrence",
    "det_poly_explicit",
    "bracketed_root",
    "pd_interval",
    "interval_from_alphas",
    "decide_pd",
    "is_pd",
    "is_pd_general",
    "is_psd_general",
    "two_group_bound",
    "cs_sufficient_interval",
    "equal_size_interval",
    "interlaced_roots",
]

ROOT_TOL = 1e-13
ENDPOINT_ZERO_RTOL = 1e-13
REPEAT_TOL = 1e-14
PIVOT_TOL = 1e-12


class NoPdIntervalError(ValueError):
    """No value of the between-group correlation makes the matrix PD."""


@dataclass(frozen=True)
class DetPoly:
    """Leading-minor polynomial ``d_k`` of ``diag(alpha) + c (J - I)``.

    ``alphas`` keeps the caller's order (it defines the leading minors);
    ``sorted_alphas`` is the ascending copy used for root localization.
    """

    alphas: tuple[float, ...]

    def __post_init__(self):
        a = tuple(float(x) for x in self.alphas)
        if not a:
            raise ValueError("DetPoly needs at least one alpha")
        object.__setattr__(self, "alphas", a)

    @property
    def k(self) -> int:
        return len(self.alphas)

    @property
    def sorted_alphas(self) -> tuple[float, ...]:
        return tuple(sorted(self.alphas))

    def leading(self, k: int) -> "DetPoly":
        return DetPoly(self.alphas[:k])

    def __call__(self, c: float) -> float:
        return det_poly_recurrence(self, c)


def det_poly_recurrence(poly: DetPoly, c: float) -> float:
    """``d_k(c)`` via ``d_j = (a_j - c) d_{j-1} + c prod_{m<j} (a_m - c)``, ``d_1 = a_1``."""
    a = poly.alphas
    d = a[0]
    prod = a[0] - c
    for aj in a[1:]:
        d = (aj - c) * d + c * prod
        prod *= aj - c
    return d


def det_poly_explicit(poly: DetPoly, c: float) -> float:
    """``d_k(c) = prod_m (a_m - c) + c sum_m prod_{l != m} (a_l - c)``."""
    factors = [aj - c for aj in poly.alphas]
    total = math.prod(factors)
    s = 0.0
    for m in range(len(factors)):
        s += math.prod(f for l, f in enumerate(factors) if l != m)
    return total + c * s


def bracketed_root(f: Callable[[float], float], lo: float, hi: float, tol: float = ROOT_TOL) -> float:
    """Root of ``f`` on ``[lo, hi]`` by Brent's method.

    Requires a strict sign change ``f(lo) * f(hi) < 0``.
    """
    if not lo < hi:
        raise ValueError(f"empty bracket [{lo!r}, {hi!r}]")
    flo, fhi = f(lo), f(hi)
    if not (flo * fhi < 0.0):
        raise ValueError(f"no sign change on [{lo!r}, {hi!r}]: f = ({flo!r}, {fhi!r})")
    return float(brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200))


def _root_in(f: Callable[[float], float], lo: float, hi: float, zero_scale: float,
             tol: float) -> tuple[float, bool]:
    """Root in the closed bracket ``[lo, hi]``; flags whether an endpoint was returned."""
    thresh = ENDPOINT_ZERO_RTOL * zero_scale
    if abs(f(lo)) <= thresh:
        return lo, True
    if abs(f(hi)) <= thresh:
        return hi, True
    return bracketed_root(f, lo, hi, tol), False


@dataclass(frozen=True)
class PdInterval:
    """Open interval ``]lower, upper[`` of admissible common correlations."""

    lower: float
    upper: float
    lower_is_closed_form: bool
    upper_is_closed_form: bool
    bracket: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.bracket
        if not (lo <= self.lower < 0.0 < self.upper <= hi):
            raise ValueError(f"interval ({self.lower}, {self.upper}) escapes bracket {self.bracket}")

    def __contains__(self, c: float) -> bool:
        return self.lower < c < self.upper


def _positive_alphas(params: Params) -> np.ndarray:
    a = alphas(params)
    bad = np.flatnonzero(a <= 0.0)
    if bad.size:
        raise NoPdIntervalError(
            f"no PD interval exists: alpha[{bad[0]}] = {a[bad[0]]!r} <= 0"
        )
    return a


def pd_interval(params: IsoCorrParams, tol: float = ROOT_TOL) -> PdInterval:
    """PD interval of the common between-group correlation.

    The ``c`` stored in ``params`` is ignored. Two groups and all-equal
    alphas have closed forms; otherwise both endpoints are roots of
    ``d_p`` found in their localizing brackets.

    Raises
    ------
    NoPdIntervalError
        If some alpha is not positive.
    """
    if params.groups.p < 2:
        raise ValueError("the PD interval needs at least two groups")
    return interval_from_alphas(_positive_alphas(params), tol)


def interval_from_alphas(alphas: Sequence[float], tol: float = ROOT_TOL) -> PdInterval:
    """PD interval of ``c`` for ``diag(alphas) + c (J - I)``, all alphas > 0."""
    a = np.asarray(alphas, dtype=float)
    p = a.size
    if p < 2:
        raise ValueError("need at least two alphas")
    if np.any(a <= 0.0):
        raise NoPdIntervalError("no PD interval exists: some alpha <= 0")
    srt = np.sort(a)
    s = math.sqrt(srt[0] * srt[1])
    bracket = (-s, s)

    if p == 2:
        return PdInterval(-s, s, True, True, bracket)
    if srt[-1] - srt[0] <= REPEAT_TOL:
        alpha = float(srt[0])
        return PdInterval(max(-alpha / (p - 1), -s), min(alpha, s), True, True, bracket)

    poly = DetPoly(tuple(a))
    scale = det_poly_recurrence(poly, 0.0)
    lower, lo_end = _root_in(poly, -s, 0.0, scale, tol)
    upper, hi_end = _root_in(poly, 0.0, s, scale, tol)
    # an endpoint root is +-sqrt(a1 a2) exactly, i.e. a closed form
    return PdInterval(lower, upper, lo_end, hi_end, bracket)


@dataclass(frozen=True)
class PdVerdict:
    pd: bool
    alphas: tuple[float, ...]
    criterion: str  # "alpha<=0" or "phi-cholesky"


def decide_pd(params: Params, tol: float = PIVOT_TOL) -> PdVerdict:
    """Decide ``expand(params) > 0`` from the ``p x p`` block average only."""
    a = alphas(params)
    if np.any(a <= 0.0):
        return PdVerdict(False, tuple(a.tolist()), "alpha<=0")
    return PdVerdict(cholesky_pd(phi_matrix(params), tol), tuple(a.tolist()), "phi-cholesky")


def is_pd(params: Params, tol: float = PIVOT_TOL) -> bool:
    return decide_pd(params, tol).pd


def _require_member(m: SymMatrix, groups: GroupStructure, tol: float) -> None:
    if not is_member_general(m, groups, tol):
        raise ValueError("matrix is not in the wider block class for these groups")


def _diag_blocks(m: SymMatrix, groups: GroupStructure):
    a = np.asarray(m)
    for k in range(groups.p):
        sl = groups.slice(k)
        yield SymMatrix(a[sl, sl])


def is_pd_general(m: SymMatrix, groups: GroupStructure, tol: float = PIVOT_TOL) -> bool:
    """``A > 0`` iff ``phi(A) > 0`` and every diagonal block ``A_kk > 0``."""
    _require_member(m, groups, tol)
    if not cholesky_pd(block_average(m, groups), tol):
        return False
    return all(cholesky_pd(blk, tol) for blk in _diag_blocks(m, groups))


def is_psd_general(m: SymMatrix, groups: GroupStructure, tol: float = PIVOT_TOL) -> bool:
    """``A >= 0`` iff ``phi(A) >= 0`` and every diagonal block ``A_kk >= 0``."""
    _require_member(m, groups, tol)
    if sym_eigenvalues(block_average(m, groups))[0] < -tol:
        return False
    return all(sym_eigenvalues(blk)[0] >= -tol for blk in _diag_blocks(m, groups))


def two_group_bound(params: BlockCorrParams | IsoCorrParams) -> float:
    """``sqrt(alpha_1 alpha_2)``: two groups are PD iff ``|c_12|`` is below it."""
    if params.groups.p != 2:
        raise ValueError("two_group_bound needs exactly two groups")
    a = _positive_alphas(params)
    return math.sqrt(a[0] * a[1])


def cs_sufficient_interval(params: IsoCorrParams) -> tuple[float, float]:
    """``(-a*/(p-1), a*)`` with ``a* = min alpha``; a guaranteed subset of the PD interval."""
    a = alphas(params)
    # alpha == 1 exactly for singleton groups
    if np.any(a <= 0.0) or np.any(a > 1.0):
        raise ValueError("all alphas must lie in ]0, 1]")
    p = params.groups.p
    if p < 2:
        raise ValueError("need at least two groups")
    amin = float(a.min())
    return -amin / (p - 1), amin


def equal_size_interval(n0: int, p: int, b: float) -> tuple[float, float]:
    """Exact PD interval for ``p`` groups of common size ``n0`` and common ``b``."""
    if p < 2 or n0 < 1:
        raise ValueError("need p >= 2 and n0 >= 1")
    alpha = (1.0 + (n0 - 1) * b) / n0
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"alpha = {alpha!r} outside ]0, 1]")
    return -alpha / (p - 1), alpha


def _distinct_with_counts(values: Sequence[float]) -> tuple[list[float], list[int]]:
    distinct: list[float] = []
    counts: list[int] = []
    for v in values:
        if distinct and abs(v - distinct[-1]) <= REPEAT_TOL:
            counts[-1] += 1
        else:
            distinct.append(v)
            counts.append(1)
    return distinct, counts


def interlaced_roots(poly: DetPoly, tol: float = ROOT_TOL) -> list[float]:
    """All ``k`` real roots of ``d_k`` in ascending order.

    A value repeated ``m`` times among the alphas is a root of multiplicity
    ``m - 1``. Dividing those factors out leaves a polynomial over the
    distinct values with one negative root and one root strictly between
    each pair of consecutive distinct values; those are bracketed.
    ``d_1`` is constant and has no roots.
    """
    srt = poly.sorted_alphas
    if srt[0] <= 0.0:
        raise ValueError("root localization needs all alphas > 0")
    if poly.k == 1:
        return []
    vals, mult = _distinct_with_counts(srt)

    def reduced(c: float) -> float:
        factors = [v - c for v in vals]
        total = math.prod(factors)
        s = 0.0
        for i, m in enumerate(mult):
            s += m * math.prod(f for j, f in enumerate(factors) if j != i)
        return total + c * s

    scale = abs(reduced(0.0))
    s = math.sqrt(srt[0] * srt[1])
    roots = [_root_in(reduced, -s, 0.0, scale, tol)[0]]
    for i in range(len(vals) - 1):
        roots.append(_root_in(reduced, vals[i], vals[i + 1], scale, tol)[0])
    for v, m in zip(vals, mult):
        roots.extend([v] * (m - 1))
    return sorted(roots)
