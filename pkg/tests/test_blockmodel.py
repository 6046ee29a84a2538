import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockpd.blockmodel import (
    BlockCorrParams,
    GroupStructure,
    IsoCorrParams,
    alphas,
    block_average,
    block_fill,
    expand,
    helmert_basis,
    is_member_general,
    phi_matrix,
    prop1_compose,
    prop1_decompose,
)
from blockpd.matcore import CsSpec, SymMatrix, cs_matrix, sym_eigenvalues
from blockpd.sampling import random_b, random_groups, random_psd

from conftest import dense


def sym(a):
    a = np.asarray(a, dtype=float)
    return SymMatrix(np.triu(a) + np.triu(a, 1).T)


class TestParams:
    def test_group_structure(self):
        g = GroupStructure((2, 4, 3, 6))
        assert (g.p, g.n, g.offsets) == (4, 15, (0, 2, 6, 9))

    @pytest.mark.parametrize("sizes", [(), (0,), (2, -1), (1.5,)])
    def test_bad_groups(self, sizes):
        with pytest.raises(ValueError):
            GroupStructure(sizes)

    def test_bounds(self):
        g = GroupStructure((2, 2))
        with pytest.raises(ValueError):
            IsoCorrParams(g, (1.0, 0.0), 0.0)
        with pytest.raises(ValueError):
            IsoCorrParams(g, (0.0, 0.0), -1.0)
        with pytest.raises(ValueError, match="singleton"):
            IsoCorrParams(GroupStructure((1, 2)), (0.3, 0.0), 0.0)
        with pytest.raises(ValueError):
            BlockCorrParams(g, (0.0, 0.0), [[0.0, 0.2], [0.3, 0.0]])

    def test_from_upper(self):
        p = BlockCorrParams.from_upper(GroupStructure((1, 1, 1)), (0, 0, 0), [0.1, 0.2, 0.3])
        assert p.c.tolist() == [[0.0, 0.1, 0.2], [0.1, 0.0, 0.3], [0.2, 0.3, 0.0]]


class TestExpand:
    def test_single_group_is_cs(self):
        p = IsoCorrParams(GroupStructure((3,)), (0.5,), 0.0)
        assert expand(p) == cs_matrix(CsSpec(3, 1.0, 0.5))

    def test_singletons(self):
        p = IsoCorrParams(GroupStructure((1, 1)), (0.0, 0.0), 0.3)
        assert expand(p).entries.tolist() == [[1.0, 0.3], [0.3, 1.0]]

    def test_example_entries(self, example):
        a = expand(example.with_c(0.25)).entries
        assert a.shape == (15, 15)
        # 1-based (1,2), (1,3), (3,4)
        assert a[0, 1] == -0.1
        assert a[0, 2] == 0.25
        assert a[2, 3] == 0.4

    def test_matches_direct_construction(self, rng):
        for _ in range(50):
            g = random_groups(rng)
            b = random_b(rng, g)
            upper = rng.uniform(-0.9, 0.9, size=g.p * (g.p - 1) // 2)
            params = BlockCorrParams.from_upper(g, b, upper)
            assert np.array_equal(expand(params).entries, dense(g.sizes, b, params.c))

    def test_unit_diagonal_and_range(self, rng):
        for _ in range(50):
            g = random_groups(rng)
            params = IsoCorrParams(g, random_b(rng, g), float(rng.uniform(-0.99, 0.99)))
            a = expand(params).entries
            assert np.all(np.diag(a) == 1.0)
            assert np.all((a > -1.0) & (a <= 1.0))


class TestAlphas:
    def test_singleton(self):
        assert alphas(IsoCorrParams(GroupStructure((1,)), (0.0,), 0.0)).tolist() == [1.0]

    def test_example(self, example):
        # 1/2 - 0.1/2, 1/4 + 3*0.4/4, 1/3 + 2*0.7/3, 1/6 + 5*0.8/6
        assert alphas(example) == pytest.approx([0.45, 0.55, 0.8, 5.0 / 6.0], abs=1e-15)

    def test_lower_endpoint(self):
        eps = 1e-6
        a = alphas(IsoCorrParams(GroupStructure((2,)), (-1.0 + eps,), 0.0))
        assert a[0] == pytest.approx(eps / 2, rel=1e-9)

    def test_range_and_diagonal_of_average(self, rng):
        for _ in range(100):
            g = random_groups(rng, (1, 6), (1, 8))
            b = tuple(float(rng.uniform(-0.999, 0.999)) if n > 1 else 0.0 for n in g.sizes)
            params = IsoCorrParams(g, b, 0.0)
            a = alphas(params)
            sizes = np.asarray(g.sizes)
            single = sizes == 1
            assert np.all(a[single] == 1.0)
            assert np.all((a[~single] > -1.0 + 2.0 / sizes[~single]) & (a[~single] < 1.0))
            avg = np.diag(block_average(expand(params), g).entries)
            assert np.allclose(avg, a, atol=1e-12, rtol=0)


class TestAverageFill:
    def test_singletons_unchanged(self, rng):
        m = random_psd(rng, 5)
        g = GroupStructure((1,) * 5)
        assert np.array_equal(block_average(m, g).entries, m.entries)
        assert np.array_equal(block_fill(m, g).entries, m.entries)

    def test_example_average(self, example):
        # direct block means of an independently built matrix
        a = dense(example.groups.sizes, example.b, 0.1)
        got = block_average(SymMatrix(a), example.groups).entries
        expected = np.full((4, 4), 0.1)
        np.fill_diagonal(expected, [0.45, 0.55, 0.8, 5.0 / 6.0])
        assert np.allclose(got, expected, atol=1e-15, rtol=0)
        assert np.allclose(phi_matrix(example.with_c(0.1)).entries, expected, atol=1e-15, rtol=0)

    def test_fill_identity(self):
        got = block_fill(SymMatrix.identity(2), GroupStructure((2, 2))).entries
        assert got.tolist() == [[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]]

    def test_average_of_fill(self, rng):
        g = GroupStructure((3, 1, 4))
        c = sym(rng.normal(size=(3, 3)))
        assert np.max(np.abs(block_average(block_fill(c, g), g).entries - c.entries)) <= 1e-14

    def test_average_equals_v_congruence(self, rng):
        g = GroupStructure((2, 3, 1))
        m = sym(rng.normal(size=(6, 6)))
        v = np.zeros((6, 3))
        for k in range(3):
            v[g.slice(k), k] = 1.0 / g.sizes[k]
        assert np.allclose(block_average(m, g).entries, v.T @ m.entries @ v, atol=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            block_average(SymMatrix.identity(3), GroupStructure((2, 2)))
        with pytest.raises(ValueError):
            block_fill(SymMatrix.identity(3), GroupStructure((2, 2)))

    @settings(max_examples=200, deadline=None)
    @given(st.lists(st.integers(1, 5), min_size=1, max_size=5), st.integers(0, 2**32 - 1))
    def test_positivity_of_both_maps(self, sizes, seed):
        g = GroupStructure(tuple(sizes))
        r = np.random.default_rng(seed)
        m = random_psd(r, g.n)
        assert sym_eigenvalues(block_average(m, g))[0] >= -1e-9
        c = random_psd(r, g.p)
        assert sym_eigenvalues(block_fill(c, g))[0] >= -1e-9

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.integers(1, 5), min_size=1, max_size=5), st.integers(0, 2**32 - 1))
    def test_fill_after_average_is_idempotent(self, sizes, seed):
        g = GroupStructure(tuple(sizes))
        x = sym(np.random.default_rng(seed).normal(size=(g.n, g.n)))
        once = block_fill(block_average(x, g), g)
        twice = block_fill(block_average(once, g), g)
        assert np.max(np.abs(once.entries - twice.entries)) <= 1e-12


class TestGeneralClass:
    def test_parametric_members(self, rng):
        for _ in range(30):
            g = random_groups(rng)
            params = BlockCorrParams.from_upper(
                g, random_b(rng, g), rng.uniform(-0.9, 0.9, size=g.p * (g.p - 1) // 2))
            assert is_member_general(expand(params), g)

    def test_non_constant_off_block(self, example):
        a = expand(example.with_c(0.2)).entries.copy()
        a[0, 5] = a[5, 0] = 0.21
        assert not is_member_general(SymMatrix(a), example.groups)

    def test_indefinite_diagonal_block(self):
        r = helmert_basis(3)
        block = r @ np.diag([-0.5, 1.0]) @ r.T + 0.3
        assert sym_eigenvalues(sym(block - block.mean()))[0] == pytest.approx(-0.5, abs=1e-12)
        a = np.zeros((5, 5))
        a[:3, :3] = block
        a[3:, 3:] = np.eye(2)
        assert not is_member_general(sym(a), GroupStructure((3, 2)))

    def test_no_unit_diagonal_required(self):
        a = np.full((2, 2), 5.0)
        assert is_member_general(SymMatrix(a), GroupStructure((2,)))


class TestProp1:
    def test_helmert_orthonormal(self):
        for n in range(2, 10):
            r = helmert_basis(n)
            assert np.allclose(r.T @ r, np.eye(n - 1), atol=1e-14)
            assert np.allclose(r.T @ np.ones(n), 0.0, atol=1e-14)

    def test_compose_zero(self):
        assert np.array_equal(prop1_compose(0.0, SymMatrix(np.zeros((2, 2))), 3).entries, np.zeros((3, 3)))

    def test_compose_ones(self):
        got = prop1_compose(1.0, SymMatrix(np.zeros((2, 2))), 3).entries
        assert np.allclose(got, np.ones((3, 3)), atol=1e-15)

    def test_compose_projection(self):
        c = prop1_compose(0.2, SymMatrix.identity(2), 3).entries
        assert c.mean() == pytest.approx(0.2, abs=1e-15)
        assert np.allclose(c - 0.2, np.eye(3) - np.ones((3, 3)) / 3, atol=1e-15)

    def test_compose_rejects_indefinite(self):
        with pytest.raises(ValueError):
            prop1_compose(0.0, SymMatrix.diag([1.0, -0.1]), 3)
        with pytest.raises(ValueError):
            prop1_compose(0.0, SymMatrix.identity(3), 3)

    def test_decompose_ones(self):
        dec = prop1_decompose(SymMatrix(np.ones((3, 3))))
        assert dec.mu == pytest.approx(1.0)
        assert np.allclose(dec.B.entries, 0.0, atol=1e-15)

    def test_decompose_cs(self):
        # C - mean(C) J = 0.7 (I - J/4), and R^T (I - J/4) R = I
        dec = prop1_decompose(cs_matrix(CsSpec(4, 1.0, 0.3)))
        assert dec.mu == pytest.approx(0.475, abs=1e-15)
        assert np.allclose(dec.B.entries, 0.7 * np.eye(3), atol=1e-14)

    def test_decompose_rejects(self):
        with pytest.raises(ValueError):
            prop1_decompose(SymMatrix([[1.0, 2.0], [2.0, 1.0]]))

    def test_size_one(self):
        dec = prop1_decompose(SymMatrix([[0.7]]))
        assert dec.mu == 0.7 and dec.B is None
        assert prop1_compose(0.7, None, 1).entries.tolist() == [[0.7]]

    def test_round_trip(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 9))
            mu = float(rng.uniform(-2, 2))
            b = random_psd(rng, n - 1, int(rng.integers(0, n))) if n > 1 else None
            c = prop1_compose(mu, b, n)
            dec = prop1_decompose(c)
            assert dec.mu == pytest.approx(mu, abs=1e-12)
            again = prop1_compose(dec.mu, dec.B, n)
            assert np.max(np.abs(again.entries - c.entries)) < 1e-10
            if n > 1:
                assert sym_eigenvalues(dec.B)[0] >= -1e-9
