"""Seeded random instances for property checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blockmodel import GroupStructure, IsoCorrParams, block_fill, prop1_compose
from .matcore import SymMatrix


def _open_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    while True:
        x = float(rng.uniform(lo, hi))
        if lo < x < hi:
            return x


def random_groups(rng: np.random.Generator, p_range=(2, 5), n_range=(1, 6)) -> GroupStructure:
    p = int(rng.integers(p_range[0], p_range[1] + 1))
    sizes = rng.integers(n_range[0], n_range[1] + 1, size=p)
    return GroupStructure(tuple(int(s) for s in sizes))


def random_b(rng: np.random.Generator, groups: GroupStructure) -> tuple[float, ...]:
    """Within-group correlations drawn uniformly where ``alpha_k > 0``, i.e. ``b_k > -1/(n_k-1)``."""
    b = []
    for nk in groups.sizes:
        b.append(0.0 if nk == 1 else _open_uniform(rng, -1.0 / (nk - 1), 1.0))
    return tuple(b)


def random_iso(rng: np.random.Generator, p_range=(2, 5), n_range=(1, 6)) -> IsoCorrParams:
    groups = random_groups(rng, p_range, n_range)
    return IsoCorrParams(groups, random_b(rng, groups), 0.0)


def random_alphas(rng: np.random.Generator, k: int) -> tuple[float, ...]:
    return tuple(_open_uniform(rng, 0.0, 1.0) for _ in range(k))


def alphas_as_instance(alphas) -> IsoCorrParams:
    """Realize alphas in ``]0, 1]``: size-2 groups with ``b = 2 alpha - 1``, singletons for 1."""
    sizes, b = [], []
    for x in alphas:
        bk = 2.0 * float(x) - 1.0
        if bk < 1.0:
            sizes.append(2)
            b.append(bk)
        else:
            sizes.append(1)
            b.append(0.0)
    return IsoCorrParams(GroupStructure(tuple(sizes)), tuple(b), 0.0)


def c_samples(rng: np.random.Generator, lower: float, upper: float, count: int,
              margin: float = 1e-6) -> list[float]:
    """Values of ``c`` in ``]-1, 1[``, alternately inside and outside ``]lower, upper[``.

    Every value stays at least ``margin`` away from both endpoints. Outside
    draws fall back to inside ones when the interval leaves no room.
    """
    out: list[float] = []
    for i in range(count):
        inside = i % 2 == 0
        if not inside:
            left = (-1.0, lower - margin)
            right = (upper + margin, 1.0)
            widths = [max(hi - lo, 0.0) for lo, hi in (left, right)]
            if sum(widths) <= 0.0:
                inside = True
            else:
                lo, hi = left if rng.uniform(0.0, sum(widths)) < widths[0] else right
                out.append(_open_uniform(rng, lo, hi))
                continue
        out.append(_open_uniform(rng, lower + margin, upper - margin))
    return out


def random_psd(rng: np.random.Generator, n: int, rank: int | None = None) -> SymMatrix:
    rank = n if rank is None else rank
    g = rng.normal(size=(n, rank)) / np.sqrt(max(rank, 1))
    a = g @ g.T
    return SymMatrix(np.triu(a) + np.triu(a, 1).T)


@dataclass(frozen=True)
class GeneralMember:
    """A matrix of the wider block class with the ingredients it was built from."""

    matrix: SymMatrix
    groups: GroupStructure
    means: tuple[float, ...]
    singular_blocks: tuple[bool, ...]


def random_general_member(rng: np.random.Generator, p_range=(1, 4), n_range=(1, 5),
                          singular_prob: float = 0.25) -> GeneralMember:
    """Diagonal blocks ``mu_k J + R B_k R^T`` (``B_k`` PSD, sometimes singular), constant off-diagonal blocks."""
    groups = random_groups(rng, p_range, n_range)
    p = groups.p
    means = rng.uniform(-0.2, 1.5, size=p)
    off = rng.uniform(-0.8, 0.8, size=(p, p))
    off = np.triu(off, 1)
    off = off + off.T
    np.fill_diagonal(off, means)
    a = block_fill(SymMatrix(off), groups).entries.copy()
    singular = []
    for k, nk in enumerate(groups.sizes):
        sl = groups.slice(k)
        if nk == 1:
            blk = prop1_compose(float(means[k]), None, 1)
            singular.append(False)
        else:
            sing = bool(rng.random() < singular_prob)
            rank = int(rng.integers(0, nk - 1)) if sing else nk - 1
            blk = prop1_compose(float(means[k]), random_psd(rng, nk - 1, rank), nk)
            singular.append(sing)
        a[sl, sl] = blk.entries
    return GeneralMember(SymMatrix(a), groups, tuple(float(m) for m in means), tuple(singular))
