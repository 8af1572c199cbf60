"""Circumcentric dual mesh measures with signs.

Every measure here is assembled from 2x2 determinants, so a circumcenter
that falls outside an obtuse triangle automatically contributes negative
length and area; no well-centeredness test is needed to get the signs right.
Per triangle ``t`` and local edge ``k`` (opposite local vertex ``k``):

* the dual edge contribution is the signed distance from the circumcenter
  to the line of edge ``k``, positive on the side of vertex ``k``;
* each corner ``v`` owns the two signed triangles
  ``(v, midpoint(edge), circumcenter)`` for the two edges at ``v``.

Boundary dual edges end at the primal edge midpoint, and boundary dual cells
are closed through the midpoints and the primal vertex itself.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateGeometryError
from .mesh import DEGENERATE_AREA_TOL, Point2


def _cross(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def circumcenter(a, b, c):
    """Circumcenter of the triangle ``a, b, c`` as a :class:`Point2`.

    Solves the two perpendicular-bisector equations relative to ``a``.
    Raises :class:`DegenerateGeometryError` for collinear points.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float) - a
    c = np.asarray(c, dtype=float) - a
    det = 2.0 * _cross(b, c)
    scale = max(b @ b, c @ c)
    if abs(det) <= 2.0 * DEGENERATE_AREA_TOL * scale:
        raise DegenerateGeometryError("circumcenter of collinear points is undefined")
    bb = b @ b
    cc = c @ c
    ux = (c[1] * bb - b[1] * cc) / det
    uy = (b[0] * cc - c[0] * bb) / det
    return Point2(float(a[0] + ux), float(a[1] + uy))


def circumcenters(vertices, triangles):
    """Vectorised :func:`circumcenter` over an ``(m, 3)`` triangle array."""
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]] - a
    c = vertices[triangles[:, 2]] - a
    det = 2.0 * _cross(b, c)
    bb = np.einsum("ij,ij->i", b, b)
    cc = np.einsum("ij,ij->i", c, c)
    scale = np.maximum(bb, cc)
    bad = np.abs(det) <= 2.0 * DEGENERATE_AREA_TOL * scale
    if bad.any():
        t = int(np.flatnonzero(bad)[0])
        raise DegenerateGeometryError(f"triangle {t} is degenerate; no circumcenter")
    ux = (c[:, 1] * bb - b[:, 1] * cc) / det
    uy = (b[:, 0] * cc - c[:, 0] * bb) / det
    return a + np.column_stack([ux, uy])


def _edge_contributions(vertices, triangles, centers):
    """(m, 3) signed circumcenter-to-edge distances, local edge k opposite k."""
    out = np.empty(triangles.shape, dtype=float)
    for k in range(3):
        p = vertices[triangles[:, (k + 1) % 3]]
        q = vertices[triangles[:, (k + 2) % 3]]
        d = q - p
        out[:, k] = _cross(d, centers - p) / np.hypot(d[:, 0], d[:, 1])
    return out


def _corner_areas(vertices, triangles, centers):
    """(m, 3) signed dual-cell area owned by each triangle corner."""
    out = np.zeros(triangles.shape, dtype=float)
    for k in range(3):
        v = vertices[triangles[:, k]]
        nxt = vertices[triangles[:, (k + 1) % 3]]
        prv = vertices[triangles[:, (k + 2) % 3]]
        m_next = 0.5 * (v + nxt)
        m_prev = 0.5 * (v + prv)
        # (v, m_next, c) and (v, c, m_prev), both CCW for a well-centered corner
        out[:, k] = 0.5 * (_cross(m_next - v, centers - v) + _cross(centers - v, m_prev - v))
    return out


def signed_dual_edge_contribution(tri, edge, mesh):
    """Signed distance from triangle ``tri``'s circumcenter to edge ``edge``.

    Positive iff the circumcenter lies on the same side of the edge as the
    triangle's third vertex.  Raises ``ValueError`` if the edge is not one of
    the triangle's.
    """
    local = np.flatnonzero(mesh.edge_of_triangle[tri] == edge)
    if len(local) == 0:
        raise ValueError(f"edge {edge} is not an edge of triangle {tri}")
    k = int(local[0])
    t = mesh.triangles[tri : tri + 1]
    centers = circumcenters(mesh.vertices, t)
    return float(_edge_contributions(mesh.vertices, t, centers)[0, k])


@dataclass(frozen=True, eq=False)
class DualMetrics:
    """Signed measures of the circumcentric dual.

    Attributes
    ----------
    circumcenters : (m, 2) array, one dual vertex per triangle
    dual_edge_length : (E,) signed length of the dual of each primal edge
    dual_vertex_area : (n,) signed area of the dual cell of each primal vertex
    edge_contribution : (m, 3) per-triangle terms summed into dual_edge_length
    corner_area : (m, 3) per-corner terms summed into dual_vertex_area
    """

    circumcenters: np.ndarray
    dual_edge_length: np.ndarray
    dual_vertex_area: np.ndarray
    edge_contribution: np.ndarray
    corner_area: np.ndarray

    def non_well_centered(self):
        """Indices of triangles whose circumcenter is strictly outside."""
        return np.flatnonzero((self.edge_contribution < 0).any(axis=1))


def dual_metrics(mesh):
    centers = circumcenters(mesh.vertices, mesh.triangles)
    contrib = _edge_contributions(mesh.vertices, mesh.triangles, centers)
    corners = _corner_areas(mesh.vertices, mesh.triangles, centers)
    lengths = np.bincount(
        mesh.edge_of_triangle.ravel(), weights=contrib.ravel(), minlength=mesh.n_edges
    )
    areas = np.bincount(
        mesh.triangles.ravel(), weights=corners.ravel(), minlength=mesh.n_vertices
    )
    return DualMetrics(
        circumcenters=centers,
        dual_edge_length=lengths,
        dual_vertex_area=areas,
        edge_contribution=contrib,
        corner_area=corners,
    )


def well_centered_report(mesh, metrics=None):
    """Describe triangles whose circumcenter lies outside.

    Returns a list of ``(triangle, local_edges_with_negative_contribution)``.
    Negative Hodge entries on those edges are expected, not errors.
    """
    if metrics is None:
        metrics = dual_metrics(mesh)
    bad = metrics.non_well_centered()
    return [
        (int(t), np.flatnonzero(metrics.edge_contribution[t] < 0).tolist()) for t in bad
    ]
