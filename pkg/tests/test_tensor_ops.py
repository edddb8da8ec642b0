import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tensorsr.tensor_ops import (
    FactorSet,
    build_from_factors,
    factor_matricization,
    fold,
    identifiability_bound,
    khatri_rao,
    matricize,
    mode_n_product,
)
from tensorsr.volume import Volume


def random_factors(rng, dims, rank):
    return FactorSet(*(rng.standard_normal((d, rank)) for d in dims))


def build_oracle(factors):
    """Triple-loop evaluation of the rank-F sum of outer products."""
    i, j, k = factors.dims
    out = np.zeros((i, j, k))
    for a in range(i):
        for b in range(j):
            for c in range(k):
                out[a, b, c] = sum(
                    factors.u1[a, f] * factors.u2[b, f] * factors.u3[c, f]
                    for f in range(factors.rank)
                )
    return out


def mode_product_oracle(x, p, axis):
    """Fiber-by-fiber multiplication."""
    dims = list(x.shape)
    dims[axis - 1] = p.shape[0]
    out = np.zeros(dims)
    if axis == 1:
        for j in range(x.shape[1]):
            for k in range(x.shape[2]):
                out[:, j, k] = p @ x[:, j, k]
    elif axis == 2:
        for i in range(x.shape[0]):
            for k in range(x.shape[2]):
                out[i, :, k] = p @ x[i, :, k]
    else:
        for i in range(x.shape[0]):
            for j in range(x.shape[1]):
                out[i, j, :] = p @ x[i, j, :]
    return out


def matricize_oracle(x, axis):
    """Explicit column-by-column unfolding in the documented order."""
    i, j, k = x.shape
    if axis == 1:
        cols = [x[:, b, c] for c in range(k) for b in range(j)]
    elif axis == 2:
        cols = [x[a, :, c] for c in range(k) for a in range(i)]
    else:
        cols = [x[a, b, :] for b in range(j) for a in range(i)]
    return np.stack(cols, axis=1)


def khatri_rao_oracle(a, b):
    m, f = a.shape
    n, _ = b.shape
    out = np.zeros((m * n, f))
    for i in range(m):
        for j in range(n):
            for c in range(f):
                out[i * n + j, c] = a[i, c] * b[j, c]
    return out


def rel_err(got, want):
    return np.linalg.norm(got - want) / max(np.linalg.norm(want), 1e-300)


class TestFactorSet:
    def test_rank_and_dims(self):
        fs = random_factors(np.random.default_rng(0), (3, 4, 5), 2)
        assert fs.rank == 2
        assert fs.dims == (3, 4, 5)

    def test_rank_mismatch(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            FactorSet(rng.standard_normal((3, 2)), rng.standard_normal((4, 3)), rng.standard_normal((5, 2)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            FactorSet(np.full((2, 1), np.nan), np.ones((2, 1)), np.ones((2, 1)))

    def test_with_factor(self):
        fs = random_factors(np.random.default_rng(0), (3, 4, 5), 2)
        new = np.ones((4, 2))
        replaced = fs.with_factor(2, new)
        np.testing.assert_array_equal(replaced.u2, new)
        np.testing.assert_array_equal(replaced.u1, fs.u1)


class TestBuildFromFactors:
    def test_single_voxel_rank1(self):
        fs = FactorSet(np.array([[1.0], [0.0]]), np.array([[0.0], [1.0]]), np.array([[1.0], [0.0]]))
        vol = build_from_factors(fs)
        expected = np.zeros((2, 2, 2))
        expected[0, 1, 0] = 1.0
        np.testing.assert_array_equal(vol.data, expected)

    def test_zero_column_gives_zero_volume(self):
        fs = FactorSet(np.zeros((3, 1)), np.ones((4, 1)), np.ones((5, 1)))
        np.testing.assert_array_equal(build_from_factors(fs).data, np.zeros((3, 4, 5)))

    def test_matches_triple_loop_oracle(self):
        rng = np.random.default_rng(1)
        fs = random_factors(rng, (4, 4, 4), 3)
        assert rel_err(build_from_factors(fs).data, build_oracle(fs)) < 1e-12

    def test_spacing_passthrough(self):
        fs = random_factors(np.random.default_rng(2), (2, 2, 2), 1)
        assert build_from_factors(fs, (0.1, 0.2, 0.3)).spacing == (0.1, 0.2, 0.3)


class TestModeProduct:
    def test_identity_is_exact(self):
        rng = np.random.default_rng(3)
        x = Volume(rng.standard_normal((3, 4, 5)))
        for axis, size in ((1, 3), (2, 4), (3, 5)):
            out = mode_n_product(x, np.eye(size), axis)
            np.testing.assert_array_equal(out.data, x.data)

    def test_block_average_halves_axis(self):
        rng = np.random.default_rng(4)
        x = Volume(rng.standard_normal((4, 3, 2)))
        p = np.array([[0.5, 0.5, 0.0, 0.0], [0.0, 0.0, 0.5, 0.5]])
        out = mode_n_product(x, p, 1)
        assert out.dims == (2, 3, 2)
        np.testing.assert_allclose(out.data[0], 0.5 * (x.data[0] + x.data[1]), rtol=1e-15)
        np.testing.assert_allclose(out.data[1], 0.5 * (x.data[2] + x.data[3]), rtol=1e-15)

    @pytest.mark.parametrize("axis,rows", [(1, 6), (2, 2), (3, 7)])
    def test_matches_fiber_oracle(self, axis, rows):
        rng = np.random.default_rng(5)
        x = Volume(rng.standard_normal((3, 4, 5)))
        p = rng.standard_normal((rows, x.dims[axis - 1]))
        got = mode_n_product(x, p, axis)
        assert rel_err(got.data, mode_product_oracle(x.data, p, axis)) < 1e-13

    def test_dimension_mismatch(self):
        x = Volume(np.zeros((3, 4, 5)))
        with pytest.raises(ValueError):
            mode_n_product(x, np.zeros((2, 4)), 1)

    def test_bad_axis(self):
        x = Volume(np.zeros((2, 2, 2)))
        with pytest.raises(ValueError):
            mode_n_product(x, np.eye(2), 4)

    def test_distinct_axes_commute(self):
        rng = np.random.default_rng(6)
        x = Volume(rng.standard_normal((4, 5, 6)))
        p1 = rng.standard_normal((3, 4))
        p2 = rng.standard_normal((2, 5))
        a = mode_n_product(mode_n_product(x, p1, 1), p2, 2)
        b = mode_n_product(mode_n_product(x, p2, 2), p1, 1)
        assert rel_err(a.data, b.data) < 1e-12


class TestMatricize:
    def test_thin_volume_mode3_is_the_fiber(self):
        rng = np.random.default_rng(7)
        x = Volume(rng.standard_normal((1, 1, 6)))
        np.testing.assert_array_equal(matricize(x, 3), x.data[0, 0][:, None])

    @pytest.mark.parametrize("axis", [1, 2, 3])
    def test_matches_column_oracle(self, axis):
        rng = np.random.default_rng(8)
        x = Volume(rng.standard_normal((3, 4, 5)))
        np.testing.assert_array_equal(matricize(x, axis), matricize_oracle(x.data, axis))

    @pytest.mark.parametrize("axis", [1, 2, 3])
    def test_fold_inverts_matricize(self, axis):
        rng = np.random.default_rng(9)
        x = Volume(rng.standard_normal((3, 4, 5)))
        back = fold(matricize(x, axis), axis, x.dims)
        np.testing.assert_array_equal(back.data, x.data)

    def test_fold_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            fold(np.zeros((3, 10)), 1, (3, 4, 5))


class TestKhatriRao:
    def test_single_column_kronecker(self):
        out = khatri_rao(np.array([[1.0], [2.0]]), np.array([[3.0], [4.0]]))
        np.testing.assert_array_equal(out, np.array([[3.0], [4.0], [6.0], [8.0]]))

    def test_ones_row_returns_other(self):
        rng = np.random.default_rng(10)
        b = rng.standard_normal((4, 3))
        np.testing.assert_array_equal(khatri_rao(np.ones((1, 3)), b), b)

    def test_matches_indexing_oracle(self):
        rng = np.random.default_rng(11)
        a = rng.standard_normal((3, 2))
        b = rng.standard_normal((4, 2))
        np.testing.assert_array_equal(khatri_rao(a, b), khatri_rao_oracle(a, b))

    def test_column_count_mismatch(self):
        with pytest.raises(ValueError):
            khatri_rao(np.zeros((3, 2)), np.zeros((4, 3)))

    @settings(deadline=None, max_examples=25)
    @given(
        m=st.integers(1, 5),
        n=st.integers(1, 5),
        f=st.integers(1, 4),
        seed=st.integers(0, 1000),
    )
    def test_indexing_property(self, m, n, f, seed):
        rng = np.random.default_rng(seed)
        a = rng.standard_normal((m, f))
        b = rng.standard_normal((n, f))
        out = khatri_rao(a, b)
        i, j, c = rng.integers(m), rng.integers(n), rng.integers(f)
        assert out[i * n + j, c] == a[i, c] * b[j, c]


# worked 2x2x2 rank-1 examples with hand-checked unfoldings
RANK1_CASES = [
    ([1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [[0, 1, 0, 0], [0, 0, 0, 0]]),
    ([1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [[0, 1, 0, 1], [0, 0, 0, 0]]),
    ([5.0, 3.0], [1.0, 2.0], [7.0, 0.0], [[35, 70, 0, 0], [21, 42, 0, 0]]),
]


class TestFactorMatricization:
    @pytest.mark.parametrize("u,v,w,expected", RANK1_CASES)
    def test_rank1_unfoldings(self, u, v, w, expected):
        fs = FactorSet(np.array(u)[:, None], np.array(v)[:, None], np.array(w)[:, None])
        vol = build_from_factors(fs)
        np.testing.assert_array_equal(matricize(vol, 1), np.array(expected, dtype=float))
        np.testing.assert_array_equal(factor_matricization(fs, 1), np.array(expected, dtype=float))

    def test_all_ones_rank1(self):
        fs = FactorSet(np.ones((2, 1)), np.ones((2, 1)), np.ones((2, 1)))
        np.testing.assert_array_equal(factor_matricization(fs, 3), np.ones((2, 4)))

    @pytest.mark.parametrize("axis", [1, 2, 3])
    def test_consistent_with_matricize_of_build(self, axis):
        rng = np.random.default_rng(12)
        fs = random_factors(rng, (5, 6, 7), 4)
        direct = factor_matricization(fs, axis)
        via_build = matricize(build_from_factors(fs), axis)
        assert rel_err(direct, via_build) < 1e-10


class TestIdentifiabilityBound:
    def test_reference_dimensions(self):
        assert identifiability_bound(260, 260, 300) == 16384

    def test_smallest_case(self):
        assert identifiability_bound(2, 2, 2) == 1

    def test_order_invariance(self):
        from itertools import permutations

        values = {identifiability_bound(*p) for p in permutations((300, 260, 260))}
        assert values == {16384}

    def test_rejects_small_dimensions(self):
        with pytest.raises(ValueError):
            identifiability_bound(1, 4, 4)


class TestMultilinearIdentity:
    def test_mode_products_act_on_factors(self):
        # X x1 P1 x2 P2 x3 P3 rebuilt from {P1 U1, P2 U2, P3 U3}
        rng = np.random.default_rng(13)
        fs = random_factors(rng, (4, 5, 6), 3)
        p1 = rng.standard_normal((3, 4))
        p2 = rng.standard_normal((2, 5))
        p3 = rng.standard_normal((4, 6))
        x = build_from_factors(fs)
        via_products = mode_n_product(mode_n_product(mode_n_product(x, p1, 1), p2, 2), p3, 3)
        via_factors = build_from_factors(FactorSet(p1 @ fs.u1, p2 @ fs.u2, p3 @ fs.u3))
        assert rel_err(via_products.data, via_factors.data) < 1e-10
