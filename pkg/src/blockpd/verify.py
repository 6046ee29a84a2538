"""Randomized property harness behind ``blockpd verify``.

Each property draws its own instances from a generator seeded with
``(seed, property index)``, so a report depends on nothing but the seed
and the trial count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .blockmodel import (
    GroupStructure,
    IsoCorrParams,
    alphas,
    block_average,
    block_fill,
    phi_matrix,
    prop1_compose,
    prop1_decompose,
)
from .instance import dump_instance
from .matcore import CsSpec, SymMatrix, cs_eigenvalues, cs_matrix, min_eigenvalue, sym_eigenvalues
from .oracle import dense_pd, pencil_roots
from .pdanalysis import (
    DetPoly,
    cs_sufficient_interval,
    det_poly_explicit,
    det_poly_recurrence,
    equal_size_interval,
    interlaced_roots,
    interval_from_alphas,
    is_pd,
    is_pd_general,
    is_psd_general,
    pd_interval,
)
from . import sampling

EXCLUSION = 1e-6


class PropertyFailure(AssertionError):
    def __init__(self, message: str, instance: str):
        super().__init__(message)
        self.instance = instance


@dataclass
class PropertyResult:
    name: str
    checks: int = 0
    excluded: int = 0
    failure: Optional[PropertyFailure] = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return self.failure is None


def _fail(msg: str, instance: str):
    raise PropertyFailure(msg, instance)


def _matrix_dump(m: SymMatrix, groups: GroupStructure) -> str:
    rows = "\n".join("# " + ", ".join(repr(float(x)) for x in row) for row in np.asarray(m))
    return f"# sizes = {', '.join(map(str, groups.sizes))}\n# matrix rows:\n{rows}\n"


# Each property takes (rng, trials, result) and raises PropertyFailure on a violation.

def _cs_closed_form(rng, trials, res):
    for _ in range(trials):
        spec = CsSpec(int(rng.integers(2, 9)), float(rng.uniform(0.1, 2.0)), float(rng.uniform(-1, 1)))
        ones, perp, mult = cs_eigenvalues(spec)
        expected = np.sort([ones] + [perp] * mult)
        got = sym_eigenvalues(cs_matrix(spec))
        res.checks += 1
        if np.max(np.abs(got - expected)) > 1e-10:
            _fail(f"CS eigenvalues {got} != {expected}", f"# CsSpec{(spec.n, spec.v, spec.c)}\n")


def _average_fill(rng, trials, res):
    for _ in range(trials):
        groups = sampling.random_groups(rng, (1, 5), (1, 6))
        c = sampling.random_psd(rng, groups.p)
        back = block_average(block_fill(c, groups), groups)
        res.checks += 1
        if np.max(np.abs(np.asarray(back) - np.asarray(c))) > 1e-14:
            _fail("block_average(block_fill(C)) != C", _matrix_dump(c, groups))
        m = sampling.random_psd(rng, groups.n)
        res.checks += 1
        if min_eigenvalue(block_average(m, groups)) < -1e-9:
            _fail("block average of a PSD matrix is not PSD", _matrix_dump(m, groups))


def _prop1_roundtrip(rng, trials, res):
    for _ in range(trials):
        n = int(rng.integers(1, 9))
        mu = float(rng.uniform(-1, 1))
        b = sampling.random_psd(rng, n - 1) if n > 1 else None
        c = prop1_compose(mu, b, n)
        dec = prop1_decompose(c)
        again = prop1_compose(dec.mu, dec.B, n)
        res.checks += 1
        if np.max(np.abs(np.asarray(again) - np.asarray(c))) > 1e-10:
            _fail("compose(decompose(C)) != C", _matrix_dump(c, GroupStructure((n,))))


def _recurrence_vs_explicit(rng, trials, res):
    for _ in range(trials):
        k = int(rng.integers(1, 13))
        a = sampling.random_alphas(rng, k)
        poly = DetPoly(a)
        for c in rng.uniform(-1, 1, size=5):
            r, e = det_poly_recurrence(poly, c), det_poly_explicit(poly, c)
            res.checks += 1
            if abs(r - e) > 1e-12 * (1 + abs(r)):
                _fail(f"recurrence {r!r} != explicit {e!r} at c={c!r}",
                      dump_instance(sampling.alphas_as_instance(a).with_c(float(c))))


def _determinant_identity(rng, trials, res):
    for _ in range(trials):
        params = sampling.random_iso(rng)
        iv = pd_interval(params)
        for c in sampling.c_samples(rng, iv.lower, iv.upper, 3):
            at = params.with_c(c)
            d = det_poly_recurrence(DetPoly(tuple(alphas(at))), c)
            det = float(np.linalg.det(np.asarray(phi_matrix(at))))
            res.checks += 1
            if abs(d - det) > 1e-10 * max(abs(det), abs(d), 1e-300) + 1e-15:
                _fail(f"d_p = {d!r} but det(phi) = {det!r}", dump_instance(at))


def _evaluation_identity(rng, trials, res):
    for _ in range(trials):
        k = int(rng.integers(2, 9))
        a = sampling.random_alphas(rng, k)
        poly = DetPoly(a)
        for l, al in enumerate(a):
            expected = al * math.prod(am - al for m, am in enumerate(a) if m != l)
            res.checks += 1
            if abs(det_poly_recurrence(poly, al) - expected) > 1e-12:
                _fail(f"d_k(alpha_{l}) != alpha_l prod(alpha_m - alpha_l)",
                      dump_instance(sampling.alphas_as_instance(a)))


def _leading_term(rng, trials, res):
    for _ in range(trials):
        k = int(rng.integers(2, 13))
        a = sampling.random_alphas(rng, k)
        poly = DetPoly(a)
        lead = (-1) ** (k - 1) * (k - 1)
        for c in (1e6, -1e6):
            res.checks += 1
            ratio = det_poly_recurrence(poly, c) / c**k
            if abs(ratio - lead) > 1e-4 * abs(lead):
                _fail(f"d_k(c)/c^k = {ratio!r}, expected {lead}",
                      dump_instance(sampling.alphas_as_instance(a)))


def _interlacing(rng, trials, res):
    for _ in range(trials):
        k = int(rng.integers(2, 9))
        a = sampling.random_alphas(rng, k)
        inst = dump_instance(sampling.alphas_as_instance(a))
        poly = DetPoly(a)
        prev = None
        for j in range(2, k + 1):
            sub = poly.leading(j)
            roots = interlaced_roots(sub)
            srt = sub.sorted_alphas
            res.checks += 1
            if len(roots) != j:
                _fail(f"d_{j} returned {len(roots)} roots", inst)
            chain = [roots[0], 0.0]
            for i in range(1, j):
                chain += [srt[i - 1], roots[i]]
            chain += [srt[-1], 1.0]
            ok = roots[0] < 0.0 and all(x <= y + 1e-12 for x, y in zip(chain[1:], chain[2:]))
            if not ok:
                _fail(f"interlacing chain broken for d_{j}: roots {roots}", inst)
            if prev is not None and not (prev[0] - 1e-12 <= roots[0] < 0.0 < roots[1] <= prev[1] + 1e-12):
                _fail(f"brackets of d_{j} not nested in those of d_{j - 1}", inst)
            prev = roots


def _average_equivalence(rng, trials, res):
    for _ in range(trials):
        params = sampling.random_iso(rng)
        iv = pd_interval(params)
        for c in sampling.c_samples(rng, iv.lower, iv.upper, 5, EXCLUSION):
            at = params.with_c(c)
            res.checks += 1
            if is_pd(at) != dense_pd(at):
                _fail(f"is_pd = {is_pd(at)} disagrees with the dense spectrum", dump_instance(at))


def _dual_endpoints(rng, trials, res):
    for _ in range(trials):
        params = sampling.random_iso(rng)
        iv = pd_interval(params)
        lo, hi = pencil_roots(alphas(params))
        res.checks += 1
        if abs(lo - iv.lower) > 1e-10 or abs(hi - iv.upper) > 1e-10:
            _fail(f"root search ({iv.lower!r}, {iv.upper!r}) vs pencil ({lo!r}, {hi!r})",
                  dump_instance(params))


def _monotonicity(rng, trials, res):
    for _ in range(trials):
        params = sampling.random_iso(rng)
        a = alphas(params)
        k = int(rng.integers(0, a.size))
        bumped = a.copy()
        bumped[k] += 0.01
        before = interval_from_alphas(a)
        after = interval_from_alphas(bumped)
        res.checks += 1
        if after.lower > before.lower + 1e-10 or after.upper < before.upper - 1e-10:
            _fail(f"raising alpha_{k} shrank the interval", dump_instance(params))


def _two_group(rng, trials, res):
    for _ in range(trials):
        params = sampling.random_iso(rng, p_range=(2, 2))
        a = alphas(params)
        iv = pd_interval(params)
        s = math.sqrt(a[0] * a[1])
        res.checks += 1
        if abs(iv.lower + s) > 1e-14 or abs(iv.upper - s) > 1e-14:
            _fail("two-group interval is not +-sqrt(alpha_1 alpha_2)", dump_instance(params))


def _sufficient(rng, trials, res):
    for _ in range(trials):
        params = sampling.random_iso(rng)
        lo, hi = cs_sufficient_interval(params)
        iv = pd_interval(params)
        res.checks += 1
        if lo < iv.lower - 1e-12 or hi > iv.upper + 1e-12:
            _fail("sufficient interval is not inside the PD interval", dump_instance(params))


def _equal_size(rng, trials, res):
    for _ in range(trials):
        p = int(rng.integers(2, 6))
        n0 = int(rng.integers(1, 7))
        b = 0.0 if n0 == 1 else sampling._open_uniform(rng, -1.0 / (n0 - 1), 1.0)
        params = IsoCorrParams(GroupStructure((n0,) * p), (b,) * p, 0.0)
        lo, hi = equal_size_interval(n0, p, b)
        iv = pd_interval(params)
        res.checks += 1
        if abs(lo - iv.lower) > 1e-12 or abs(hi - iv.upper) > 1e-12:
            _fail("equal-size closed form disagrees with pd_interval", dump_instance(params))


def _general_class(rng, trials, res):
    for _ in range(trials):
        mem = sampling.random_general_member(rng)
        m, groups = mem.matrix, mem.groups
        lam = min_eigenvalue(m)
        inst = _matrix_dump(m, groups)
        if abs(lam) >= EXCLUSION:
            truth = lam > 0.0
            res.checks += 1
            if is_pd_general(m, groups) != truth or is_psd_general(m, groups) != truth:
                _fail(f"general-class verdicts disagree with dense spectrum (min eig {lam!r})", inst)
        elif (any(mem.singular_blocks) and min(mem.means) > EXCLUSION
              and min_eigenvalue(block_average(m, groups)) > EXCLUSION):
            # singular by construction, PSD by construction
            res.checks += 1
            if lam < -1e-9 or not is_psd_general(m, groups) or is_pd_general(m, groups):
                _fail("PSD-but-singular member misclassified", inst)
        else:
            res.excluded += 1


PROPERTIES: list[tuple[str, Callable]] = [
    ("cs_closed_form", _cs_closed_form),
    ("average_fill", _average_fill),
    ("prop1_roundtrip", _prop1_roundtrip),
    ("recurrence_vs_explicit", _recurrence_vs_explicit),
    ("determinant_identity", _determinant_identity),
    ("evaluation_identity", _evaluation_identity),
    ("leading_term", _leading_term),
    ("interlacing_nesting", _interlacing),
    ("average_equivalence", _average_equivalence),
    ("dual_algorithm_endpoints", _dual_endpoints),
    ("interval_monotonicity", _monotonicity),
    ("two_group_closed_form", _two_group),
    ("sufficient_interval_containment", _sufficient),
    ("equal_size_closed_form", _equal_size),
    ("general_class_equivalence", _general_class),
]


def run_properties(seed: int, trials: int) -> list[PropertyResult]:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    results = []
    for idx, (name, check) in enumerate(PROPERTIES):
        rng = np.random.default_rng([seed, idx])
        res = PropertyResult(name)
        try:
            check(rng, trials, res)
        except PropertyFailure as exc:
            res.failure = exc
        results.append(res)
    return results


def format_report(results: list[PropertyResult]) -> str:
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        line = f"{status} {r.name}: {r.checks} checks"
        if r.excluded:
            line += f", {r.excluded} excluded"
        lines.append(line)
        if r.failure is not None:
            lines.append(f"  {r.failure}")
            lines.append("  offending instance:")
            lines.extend("    " + x for x in r.failure.instance.splitlines())
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} properties passed")
    return "\n".join(lines) + "\n"
