"""Sparse real linear algebra for the assembled Poisson systems.

Storage is ``scipy.sparse.csr_matrix`` (canonical: sorted, duplicate-free
column indices).  The conjugate gradient solver is implemented here so that
iteration counts, breakdown detection and the stopping rule are under our
control; a dense LU path is kept as a test oracle and small-system fallback.
"""

from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.io
import scipy.linalg
import scipy.sparse as sp

from .exceptions import CGBreakdownError, ConvergenceError

DEFAULT_TOL = 1e-10
DENSE_LIMIT = 2000


def csr_from_triplets(rows, cols, values, shape):
    """Triplets to canonical CSR; duplicate ``(row, col)`` entries are summed."""
    m = sp.csr_matrix(
        (np.asarray(values, dtype=float), (np.asarray(rows), np.asarray(cols))), shape=shape
    )
    m.sum_duplicates()
    m.sort_indices()
    return m


def as_csr(matrix, dtype=float):
    if hasattr(matrix, "matrix"):  # IncidenceMatrix
        matrix = matrix.matrix
    m = sp.csr_matrix(matrix, dtype=dtype)
    m.sum_duplicates()
    m.sort_indices()
    return m


def matvec(A, x):
    x = np.asarray(x, dtype=float)
    if A.shape[1] != x.shape[0]:
        raise ValueError(f"matvec dimension mismatch: {A.shape} @ {x.shape}")
    return A @ x


def transpose(A):
    return as_csr(A.T, dtype=A.dtype)


def triple_product(A, D, B=None):
    """Sparse ``A^T diag(D) B``; with ``B`` omitted (or ``B is A``) the result
    is exactly symmetric.

    ``D`` may be a :class:`~dec2d.hodge.DiagonalOperator` or a 1-D array.
    """
    if not isinstance(D, np.ndarray) and hasattr(D, "diagonal"):  # DiagonalOperator
        D = D.diagonal
    d = np.asarray(D, dtype=float)
    A = as_csr(A)
    same = B is None or B is A
    B = A if same else as_csr(B)
    if A.shape[0] != d.shape[0] or B.shape[0] != d.shape[0]:
        raise ValueError(
            f"triple_product dimension mismatch: A{A.shape}, D({d.shape[0]}), B{B.shape}"
        )
    K = (A.T @ sp.diags(d) @ B).tocsr()
    if same:
        upper = sp.triu(K, format="csr")
        K = upper + sp.triu(K, k=1, format="csr").T
    K = as_csr(K)
    K.eliminate_zeros()
    return K


class CGResult(NamedTuple):
    x: np.ndarray
    iterations: int
    residual: float


def cg_solve(A, b, tol=DEFAULT_TOL, max_iter=None, *, x0=None, jacobi=False):
    """Conjugate gradient for symmetric positive definite ``A``.

    Stops when ``||b - A x||_2 <= tol * ||b||_2``.  ``max_iter`` defaults to
    ``10 * n``.  With ``jacobi=True`` the diagonal of ``A`` is used as a
    preconditioner.  Raises :class:`CGBreakdownError` when ``p^T A p <= 0``
    and :class:`ConvergenceError` when the iteration budget runs out.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    if A.shape != (n, n):
        raise ValueError(f"system dimension mismatch: A{A.shape}, b({n})")
    if not np.all(np.isfinite(b)):
        raise ValueError("right-hand side has non-finite entries")
    if max_iter is None:
        max_iter = 10 * n
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return CGResult(np.zeros(n), 0, 0.0)
    if jacobi:
        diag = A.diagonal()
        if (diag <= 0).any():
            raise CGBreakdownError("non-positive diagonal entry; Jacobi preconditioner undefined")
        inv_diag = 1.0 / diag

    r = b - A @ x
    z = r * inv_diag if jacobi else r
    p = z.copy()
    rz = r @ z
    rel = np.linalg.norm(r) / bnorm
    it = 0
    while rel > tol:
        if it >= max_iter:
            raise ConvergenceError(
                "conjugate gradient did not converge", iterations=it, residual=rel
            )
        Ap = A @ p
        pAp = p @ Ap
        if not pAp > 0.0:
            raise CGBreakdownError(
                "p^T A p <= 0: system matrix is not positive definite",
                iterations=it, residual=rel,
            )
        alpha = rz / pAp
        x += alpha * p
        r -= alpha * Ap
        it += 1
        rel = np.linalg.norm(r) / bnorm
        z = r * inv_diag if jacobi else r
        rz_new = r @ z
        p *= rz_new / rz
        p += z
        rz = rz_new
    true_rel = np.linalg.norm(b - A @ x) / bnorm
    return CGResult(x, it, float(true_rel))


def dense_solve(A, b):
    """Dense LU solve, for systems up to :data:`DENSE_LIMIT` unknowns."""
    n = A.shape[0]
    if n > DENSE_LIMIT:
        raise ValueError(f"dense solve limited to {DENSE_LIMIT} unknowns, got {n}")
    dense = A.toarray() if sp.issparse(A) else np.asarray(A, dtype=float)
    lu, piv = scipy.linalg.lu_factor(dense)
    return scipy.linalg.lu_solve((lu, piv), np.asarray(b, dtype=float))


def write_matrix_market(matrix, path, comment=""):
    """MatrixMarket coordinate dump; integer matrices keep the integer field."""
    if hasattr(matrix, "matrix"):  # IncidenceMatrix
        comment = comment or matrix.role
        matrix = matrix.matrix
    coo = sp.coo_matrix(matrix)
    field = "integer" if np.issubdtype(coo.dtype, np.integer) else "real"
    scipy.io.mmwrite(str(Path(path)), coo, comment=comment, field=field, symmetry="general")


def read_matrix_market(path):
    return as_csr(scipy.io.mmread(str(Path(path))), dtype=None)
