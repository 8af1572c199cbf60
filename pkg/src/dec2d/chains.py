"""Boundary operators and discrete exterior derivatives as integer matrices.

Rows always index the lower-dimensional cells of a boundary operator:
``boundary_2_1`` is edges x triangles and ``boundary_1_0`` is vertices x
edges.  The derivatives are exact transposes (``d = boundary^T``), and the
dual-mesh boundary is ``-boundary_1_0^T``.  Entries are kept as integers so
identities such as ``boundary_1_0 @ boundary_2_1 == 0`` hold exactly.

Edge orientation is the canonical ``[min, max]`` rule of
:mod:`dec2d.mesh`.  To reproduce matrices written with some other edge
orientation and ordering, call :func:`incidence_matrices` directly with that
ordering.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .linalg import read_matrix_market, write_matrix_market  # noqa: F401  MatrixMarket dumps

ROLES = ("boundary_2_1", "boundary_1_0", "derivative_0_1", "derivative_1_2_dual")


@dataclass(frozen=True, eq=False)
class IncidenceMatrix:
    """Sparse integer matrix with entries in {-1, +1} and a role tag."""

    matrix: sp.csr_matrix
    role: str

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")

    @property
    def shape(self):
        return self.matrix.shape

    @property
    def rows(self):
        return self.matrix.shape[0]

    @property
    def cols(self):
        return self.matrix.shape[1]

    @property
    def entries(self):
        """``(row, col, value)`` triplets in row-major order."""
        coo = self.matrix.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def toarray(self):
        return self.matrix.toarray()

    def astype(self, dtype):
        return self.matrix.astype(dtype)

    def __matmul__(self, other):
        if isinstance(other, IncidenceMatrix):
            other = other.matrix
        return self.matrix @ other


def _csr(rows, cols, vals, shape):
    m = sp.csr_matrix(
        (np.asarray(vals, dtype=np.int64), (np.asarray(rows), np.asarray(cols))), shape=shape
    )
    m.sum_duplicates()
    m.sort_indices()
    return m


def incidence_matrices(triangles, edges, n_vertices=None):
    """Build ``(boundary_2_1, boundary_1_0)`` for arbitrary oriented lists.

    ``edges`` is a list of oriented vertex pairs ``[tail, head]`` in any order
    and direction; ``triangles`` a list of oriented vertex triples.  The
    boundary of ``[a, b, c]`` is ``[b, c] - [a, c] + [a, b]``, so an edge gets
    +1 in a triangle's column when its direction agrees with the triangle's
    cyclic traversal and -1 otherwise.
    """
    triangles = np.asarray(triangles, dtype=np.int64)
    edges = np.asarray(edges, dtype=np.int64)
    if n_vertices is None:
        n_vertices = int(max(triangles.max(), edges.max())) + 1
    lookup = {}
    for e, (i, j) in enumerate(edges):
        key = (min(i, j), max(i, j))
        if key in lookup:
            raise ValueError(f"edge {[int(i), int(j)]} listed twice")
        lookup[key] = (e, 1 if i < j else -1)

    rows, cols, vals = [], [], []
    for t, tri in enumerate(triangles):
        for k in range(3):
            tail, head = int(tri[(k + 1) % 3]), int(tri[(k + 2) % 3])
            key = (min(tail, head), max(tail, head))
            if key not in lookup:
                raise ValueError(f"triangle {t} uses edge {[tail, head]} missing from edge list")
            e, stored = lookup[key]
            rows.append(e)
            cols.append(t)
            vals.append(stored * (1 if tail < head else -1))
    b21 = _csr(rows, cols, vals, (len(edges), len(triangles)))

    n_e = len(edges)
    b10 = _csr(
        np.concatenate([edges[:, 0], edges[:, 1]]),
        np.concatenate([np.arange(n_e), np.arange(n_e)]),
        np.concatenate([-np.ones(n_e, dtype=np.int64), np.ones(n_e, dtype=np.int64)]),
        (n_vertices, n_e),
    )
    return b21, b10


def boundary_2_1(mesh):
    """Edges x triangles boundary operator, 3 nonzeros per column."""
    m = mesh.n_triangles
    return IncidenceMatrix(
        _csr(
            mesh.edge_of_triangle.ravel(),
            np.repeat(np.arange(m), 3),
            mesh.edge_sign.ravel(),
            (mesh.n_edges, m),
        ),
        "boundary_2_1",
    )


def boundary_1_0(mesh):
    """Vertices x edges boundary operator: -1 at the tail, +1 at the head."""
    n_e = mesh.n_edges
    e = mesh.edges
    return IncidenceMatrix(
        _csr(
            np.concatenate([e[:, 0], e[:, 1]]),
            np.concatenate([np.arange(n_e), np.arange(n_e)]),
            np.repeat(np.array([-1, 1], dtype=np.int64), n_e),
            (mesh.n_vertices, n_e),
        ),
        "boundary_1_0",
    )


def derivative_0_1(mesh):
    """Discrete gradient on vertex values: the transpose of ``boundary_1_0``."""
    return IncidenceMatrix(boundary_1_0(mesh).matrix.T.tocsr(), "derivative_0_1")


def dual_boundary_2_1(mesh):
    """Boundary of dual cells in terms of dual edges: ``-boundary_1_0^T``.

    Column ``v`` is the dual cell around primal vertex ``v``; row ``e`` is the
    dual edge crossing primal edge ``e``.
    """
    return IncidenceMatrix((-boundary_1_0(mesh).matrix.T).tocsr(), "derivative_1_2_dual")
