import numpy as np
import pytest
import scipy.sparse as sp

from dec2d.dual import dual_metrics
from dec2d.exceptions import CGBreakdownError, ConvergenceError
from dec2d.linalg import (
    DENSE_LIMIT,
    cg_solve,
    csr_from_triplets,
    dense_solve,
    matvec,
    read_matrix_market,
    transpose,
    triple_product,
    write_matrix_market,
)
from dec2d.chains import derivative_0_1
from dec2d.hodge import hodge_1_1
from dec2d.mesh import gen_disk_mesh
from dec2d.poisson import assemble
from dec2d.study import disk_problem

import meshes


def random_spd(n, rng, density=0.2):
    A = sp.random(n, n, density=density, random_state=np.random.RandomState(rng.integers(2**31)))
    return (A @ A.T + n * sp.identity(n)).tocsr()


def test_one_by_one():
    x, it, res = cg_solve(sp.csr_matrix([[4.0]]), np.array([8.0]))
    assert x.tolist() == [2.0]
    assert it == 1
    assert res == 0.0


def test_two_by_two():
    A = sp.csr_matrix([[4.0, 1.0], [1.0, 3.0]])
    x, it, _ = cg_solve(A, np.array([1.0, 2.0]))
    assert x == pytest.approx([1 / 11, 7 / 11], rel=1e-12)
    assert it <= 2


def test_zero_rhs():
    x, it, res = cg_solve(sp.identity(3, format="csr"), np.zeros(3))
    assert not x.any() and it == 0 and res == 0.0


def test_matvec_matches_triplet_oracle(rng):
    for _ in range(10):
        n, m = rng.integers(5, 40, size=2)
        k = rng.integers(1, n * m)
        rows, cols = rng.integers(0, n, k), rng.integers(0, m, k)
        vals = rng.normal(size=k)
        A = csr_from_triplets(rows, cols, vals, (n, m))
        x = rng.normal(size=m)
        expected = np.zeros(n)
        for r, c, v in zip(rows, cols, vals):
            expected[r] += v * x[c]
        assert np.allclose(matvec(A, x), expected, rtol=1e-14, atol=1e-14)
    with pytest.raises(ValueError):
        matvec(A, np.ones(m + 1))


def test_cg_iteration_bound(rng):
    for n in (5, 20, 80):
        A = random_spd(n, rng)
        b = rng.normal(size=n)
        x, it, res = cg_solve(A, b, tol=1e-10)
        assert it <= 4 * n
        assert res <= 1e-10
        assert np.linalg.norm(A @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_jacobi_matches_plain(rng):
    A = random_spd(30, rng)
    b = rng.normal(size=30)
    x1 = cg_solve(A, b, tol=1e-12).x
    x2 = cg_solve(A, b, tol=1e-12, jacobi=True).x
    assert np.allclose(x1, x2, rtol=1e-9)


def test_breakdown_on_indefinite():
    A = sp.csr_matrix(np.diag([1.0, -1.0]))
    with pytest.raises(CGBreakdownError) as info:
        cg_solve(A, np.array([1.0, 1.0]))
    assert info.value.iterations is not None


def test_non_convergence(rng):
    A = random_spd(50, rng)
    with pytest.raises(ConvergenceError) as info:
        cg_solve(A, rng.normal(size=50), tol=1e-14, max_iter=2)
    assert info.value.iterations == 2
    assert info.value.residual > 1e-14


def test_invalid_arguments():
    A = sp.identity(2, format="csr")
    with pytest.raises(ValueError):
        cg_solve(A, np.ones(2), tol=0.0)
    with pytest.raises(ValueError):
        cg_solve(A, np.ones(3))
    with pytest.raises(ValueError):
        cg_solve(A, np.array([1.0, np.nan]))


def test_deterministic(rng):
    A = random_spd(40, rng)
    b = rng.normal(size=40)
    assert np.array_equal(cg_solve(A, b).x, cg_solve(A, b).x)


def test_triple_product_identity():
    eye = sp.identity(2, format="csr")
    assert np.array_equal(triple_product(eye, np.array([2.0, 3.0])).toarray(), np.diag([2.0, 3.0]))
    with pytest.raises(ValueError):
        triple_product(eye, np.ones(3))


def test_triple_product_rhombus(rhombus):
    d0 = derivative_0_1(rhombus)
    w = hodge_1_1(rhombus, dual_metrics(rhombus))
    K = triple_product(d0, w).toarray()
    assert K.shape == (4, 4)
    assert np.array_equal(K, K.T)
    assert np.allclose(K.sum(axis=1), 0.0, atol=1e-15)
    # hand assembly: shared edge weight 1/sqrt(3), outer edges 1/(2 sqrt(3))
    c = 1.0 / (2.0 * np.sqrt(3.0))
    assert K[0, 1] == pytest.approx(-2 * c)
    assert K[2, 3] == 0.0
    assert K[0, 0] == pytest.approx(4 * c)
    assert K[2, 2] == pytest.approx(2 * c)


def test_triple_product_exactly_symmetric(rng):
    m = meshes.random_delaunay_disk(rng)
    K = triple_product(derivative_0_1(m), hodge_1_1(m, dual_metrics(m)))
    assert (K != K.T).nnz == 0
    A = csr_from_triplets([0, 1], [0, 1], [1.0, 1.0], (2, 2))
    B = csr_from_triplets([0, 1], [1, 0], [2.0, 5.0], (2, 2))
    assert np.array_equal(triple_product(A, np.ones(2), B).toarray(), B.toarray())


def test_disk_rings1_matches_dense_oracle():
    m = gen_disk_mesh(1)
    K, b = assemble(m, dual_metrics(m), disk_problem(m))
    x = cg_solve(K, b).x
    assert np.allclose(x, np.linalg.solve(K.toarray(), b), rtol=0, atol=1e-9)
    assert np.allclose(dense_solve(K, b), np.linalg.solve(K.toarray(), b), atol=1e-12)


def test_dense_limit():
    with pytest.raises(ValueError):
        dense_solve(sp.identity(DENSE_LIMIT + 1, format="csr"), np.ones(DENSE_LIMIT + 1))


def test_transpose_and_matrix_market(tmp_path, rng):
    A = csr_from_triplets([0, 2, 1], [1, 0, 2], [1.5, -2.0, 0.25], (3, 3))
    assert np.array_equal(transpose(A).toarray(), A.toarray().T)
    path = tmp_path / "a.mtx"
    write_matrix_market(A, path)
    assert "real" in path.read_text().splitlines()[0]
    assert np.array_equal(read_matrix_market(path).toarray(), A.toarray())
