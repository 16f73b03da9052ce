import numpy as np
import pytest
import scipy.linalg

from sdkrylov import (DimensionMismatch, NonSquare, NotPositiveDefinite, Singular, SparseMatrix,
                      dense_solve_oracle, factor_spd, split)
from sdkrylov.linalg import read_matrix_market, read_vector, write_matrix_market, write_vector
from sdkrylov.linalg.cholesky import solve_with_factor
from sdkrylov.problems import gen_ode1d, gen_pde_convection

from conftest import J2, laplacian_1d, random_pd


class TestSparseMatrix:
    def test_csr_invariants(self):
        a = SparseMatrix.from_coo([0, 0, 1, 1, 0], [2, 0, 1, 1, 2], [1.0, 2.0, 3.0, 4.0, 0.5], (2, 3))
        assert a.row_offsets.tolist() == [0, 2, 3]
        assert a.col_indices.tolist() == [0, 2, 1]
        np.testing.assert_array_equal(a.values, [2.0, 1.5, 7.0])

    def test_canonical_drops_zeros(self):
        a = SparseMatrix.from_dense([[1.0, 0.0], [0.0, 0.0]])
        assert a.values.size == 1

    def test_immutable(self):
        a = SparseMatrix.identity(3)
        with pytest.raises(ValueError):
            a.values[0] = 5.0

    def test_identity_matvec(self, rng):
        x = rng.standard_normal(7)
        np.testing.assert_array_equal(SparseMatrix.identity(7) @ x, x)

    def test_rotation(self):
        np.testing.assert_array_equal(SparseMatrix.from_dense(J2) @ np.array([1.0, 0.0]), [0.0, 1.0])

    def test_matvec_matches_dense(self):
        d = np.random.default_rng(0).standard_normal((8, 8))
        x = np.random.default_rng(3).standard_normal(8)
        a = SparseMatrix.from_dense(d)
        np.testing.assert_allclose(a @ x, d @ x, rtol=1e-14, atol=1e-14)
        np.testing.assert_allclose(a.rmatvec(x), d.T @ x, rtol=1e-14, atol=1e-14)

    def test_rectangular_products(self, rng):
        d = rng.standard_normal((3, 5))
        a = SparseMatrix.from_dense(d)
        np.testing.assert_allclose(a @ np.ones(5), d @ np.ones(5))
        np.testing.assert_allclose(a.rmatvec(np.ones(3)), d.T @ np.ones(3))
        np.testing.assert_array_equal(a.transpose().to_dense(), d.T)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            SparseMatrix.identity(3) @ np.ones(4)

    def test_deterministic_repeat(self, rng):
        a = SparseMatrix.from_dense(rng.standard_normal((30, 30)))
        x = rng.standard_normal(30)
        assert (a @ x).tobytes() == (a @ x).tobytes()


class TestSplit:
    def test_example_lower(self):
        eps = 0.3
        sp = split(SparseMatrix.from_dense([[1.0, -1.0], [1.0, -1.0 + eps]]))
        np.testing.assert_array_equal(sp.s.to_dense(), [[1.0, 0.0], [0.0, -1.0 + eps]])
        np.testing.assert_array_equal(sp.k.to_dense(), [[0.0, -1.0], [1.0, 0.0]])

    def test_symmetric_input(self):
        d = random_pd(6, 1, skew_scale=0.0)
        d = 0.5 * (d + d.T)
        sp = split(SparseMatrix.from_dense(d))
        assert sp.k.values.size == 0
        np.testing.assert_array_equal(sp.s.to_dense(), d)

    def test_reconstruction(self):
        d = np.random.default_rng(7).standard_normal((5, 5))
        sp = split(SparseMatrix.from_dense(d))
        s, k = sp.s.to_dense(), sp.k.to_dense()
        np.testing.assert_allclose(s + k, d, rtol=0, atol=np.spacing(np.abs(d)).max())
        assert np.array_equal(s, s.T)
        assert np.array_equal(k, -k.T)
        assert np.all(np.diag(k) == 0.0)

    def test_nonsquare(self):
        with pytest.raises(NonSquare):
            split(SparseMatrix.from_dense(np.ones((2, 3))))

    def test_recompose_is_identity(self, rng):
        g = rng.standard_normal((9, 9))
        s, k = g + g.T, g - g.T
        sp = split(SparseMatrix.from_dense(s + k))
        np.testing.assert_allclose(sp.s.to_dense(), s, atol=4 * np.spacing(np.abs(s).max()))
        np.testing.assert_allclose(sp.k.to_dense(), k, atol=4 * np.spacing(np.abs(k).max()))

    def test_skew_form_vanishes(self, rng):
        sp = split(SparseMatrix.from_dense(rng.standard_normal((12, 12))))
        x = rng.standard_normal(12)
        norm_k = np.linalg.norm(sp.k.to_dense(), 2)
        assert abs(x @ (sp.k @ x)) <= 1e-13 * norm_k * (x @ x)


class TestCholesky:
    def test_diagonal(self):
        f = factor_spd(SparseMatrix.diagonal_matrix([1.0, 2.0, 3.0]))
        np.testing.assert_allclose(f.solve(np.array([0.0, 1.0, 0.0])), [0.0, 0.5, 0.0])

    def test_indefinite(self):
        s = split(SparseMatrix.from_dense([[1.0, -1.0], [1.0, -0.5]])).s
        with pytest.raises(NotPositiveDefinite) as info:
            factor_spd(s)
        assert info.value.index is not None

    def test_laplacian_oracle(self, rng):
        a = laplacian_1d(10)
        b = rng.standard_normal(10)
        y = factor_spd(a).solve(b)
        np.testing.assert_allclose(y, np.linalg.solve(a.to_dense(), b), rtol=1e-12)

    def test_solve_with_factor_identity(self, rng):
        b = rng.standard_normal(4)
        np.testing.assert_allclose(solve_with_factor(factor_spd(SparseMatrix.identity(4)), b), b)

    def test_solve_with_factor_diag(self):
        f = factor_spd(SparseMatrix.diagonal_matrix([2.0, 4.0]))
        np.testing.assert_allclose(solve_with_factor(f, np.array([2.0, 4.0])), [1.0, 1.0])

    def test_tridiag_16(self, rng):
        a = laplacian_1d(16, scaled=True)
        b = rng.standard_normal(16)
        y = factor_spd(a).solve(b)
        ref = np.linalg.solve(a.to_dense(), b)
        assert np.linalg.norm(y - ref) / np.linalg.norm(ref) < 1e-12

    def test_dimension_check(self):
        with pytest.raises(DimensionMismatch):
            factor_spd(SparseMatrix.identity(3)).solve(np.ones(2))

    @pytest.mark.parametrize("ordering", ["mindeg", "natural"])
    def test_sparse_path_on_2d_laplacian(self, ordering):
        # n = 225 exceeds the dense cutoff, so the sparse kernels run
        s = split(gen_pde_convection(0.0, 225).a).s
        f = factor_spd(s, ordering=ordering)
        r = np.random.default_rng(1).standard_normal(225)
        assert np.linalg.norm(s @ f.solve(r) - r) / np.linalg.norm(r) <= 1e-10

    def test_mindeg_reduces_fill(self):
        s = split(gen_pde_convection(0.0, 400).a).s
        # permute rows/cols randomly so natural ordering is a bad choice
        perm = np.random.default_rng(0).permutation(400)
        d = s.to_dense()[np.ix_(perm, perm)]
        m = SparseMatrix.from_dense(d)
        assert factor_spd(m, "mindeg", dense_cutoff=0).nnz_l < factor_spd(m, "natural", dense_cutoff=0).nnz_l

    def test_half_solves_compose(self, rng):
        a = split(gen_ode1d(1e-2, 100).a).s
        f = factor_spd(a)
        v = rng.standard_normal(100)
        np.testing.assert_allclose(f.half_solve_transpose(f.half_solve(v)), f.solve(v), rtol=1e-10)

    def test_relative_pivot_floor(self):
        # tiny but positive-definite scale must not trip the floor
        f = factor_spd(SparseMatrix.diagonal_matrix([1e-200, 2e-200]))
        np.testing.assert_allclose(f.solve(np.array([1e-200, 2e-200])), [1.0, 1.0])
        with pytest.raises(NotPositiveDefinite):
            factor_spd(SparseMatrix.diagonal_matrix([1.0, 1e-16]))


class TestDenseOracle:
    def test_identity(self, rng):
        b = rng.standard_normal(5)
        np.testing.assert_array_equal(dense_solve_oracle(np.eye(5), b), b)

    def test_hand_example(self):
        x = dense_solve_oracle(np.array([[1.0, -1.0], [1.0, -0.5]]), np.array([0.0, 0.5]))
        np.testing.assert_allclose(x, [1.0, 1.0], rtol=1e-15)

    def test_hilbert(self):
        h = scipy.linalg.hilbert(4)
        np.testing.assert_allclose(dense_solve_oracle(h, h @ np.ones(4)), np.ones(4), rtol=1e-9)

    def test_singular(self):
        with pytest.raises(Singular):
            dense_solve_oracle(np.zeros((2, 2)), np.ones(2))


class TestFiles:
    def test_matrix_roundtrip_bitwise(self, tmp_path):
        a = gen_pde_convection(100.0, 49).a
        path = tmp_path / "a.mtx"
        write_matrix_market(str(path), a)
        back = read_matrix_market(str(path))
        assert np.array_equal(back.row_offsets, a.row_offsets)
        assert np.array_equal(back.col_indices, a.col_indices)
        assert back.values.tobytes() == a.values.tobytes()

    def test_vector_roundtrip_bitwise(self, tmp_path, rng):
        x = rng.standard_normal(20) * 10.0 ** rng.integers(-200, 200, 20)
        write_vector(str(tmp_path / "x.rhs"), x)
        assert read_vector(str(tmp_path / "x.rhs")).tobytes() == x.tobytes()
