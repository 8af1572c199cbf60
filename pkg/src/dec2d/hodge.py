"""Diagonal discrete Hodge stars built from signed dual measures."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .exceptions import DegenerateGeometryError

HODGE_ROLES = ("hodge_1_1", "hodge_0_2", "hodge_2_0")


@dataclass(frozen=True, eq=False)
class DiagonalOperator:
    """A diagonal matrix stored only as its diagonal."""

    diagonal: np.ndarray
    role: str

    def __post_init__(self):
        if self.role not in HODGE_ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        d = np.asarray(self.diagonal, dtype=float)
        if d.ndim != 1:
            raise ValueError("diagonal must be one-dimensional")
        d = d.copy()
        d.setflags(write=False)
        object.__setattr__(self, "diagonal", d)

    @property
    def size(self):
        return len(self.diagonal)

    @property
    def shape(self):
        return (self.size, self.size)

    def to_sparse(self):
        return sp.diags(self.diagonal, format="csr")

    def toarray(self):
        return np.diag(self.diagonal)

    def __matmul__(self, other):
        if isinstance(other, DiagonalOperator):
            return self.diagonal * other.diagonal
        if sp.issparse(other):
            return self.to_sparse() @ other
        other = np.asarray(other)
        if other.ndim == 1:
            return self.diagonal * other
        return self.diagonal[:, None] * other


def hodge_1_1(mesh, metrics):
    """Per-edge ratio dual length / primal length (may be <= 0 for obtuse meshes)."""
    lengths = mesh.edge_lengths
    if (lengths <= 0).any():
        raise DegenerateGeometryError(f"edge {int(np.argmin(lengths))} has zero length")
    return DiagonalOperator(metrics.dual_edge_length / lengths, "hodge_1_1")


def hodge_0_2(mesh, metrics):
    """Per-vertex signed dual cell area; a zero area is an error."""
    area = np.asarray(metrics.dual_vertex_area, dtype=float)
    zero = np.flatnonzero(area == 0.0)
    if len(zero):
        raise DegenerateGeometryError(f"dual cell of vertex {int(zero[0])} has zero area")
    return DiagonalOperator(area, "hodge_0_2")


def hodge_2_0(mesh, metrics):
    """Inverse of :func:`hodge_0_2`."""
    return DiagonalOperator(1.0 / hodge_0_2(mesh, metrics).diagonal, "hodge_2_0")


def write_hodge_csv(mesh, metrics, path):
    """Write ``kind,index,value`` rows for M_1,1 (edges) and M_0,2 (vertices)."""
    m11 = hodge_1_1(mesh, metrics).diagonal
    m02 = metrics.dual_vertex_area
    with open(path, "w", newline="") as fh:
        fh.write("kind,index,value\n")
        for e, v in enumerate(m11):
            fh.write(f"hodge_1_1,{e},{v:.17g}\n")
        for i, v in enumerate(m02):
            fh.write(f"hodge_0_2,{i},{v:.17g}\n")
