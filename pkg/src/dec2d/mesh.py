"""Triangle meshes: validation, orientation and the canonical edge table.

Conventions used by every other module:

* triangles are stored counter-clockwise (positive signed area); clockwise
  input is flipped at construction and recorded in ``TriangleMesh.reoriented``;
* edges are stored as ``[min, max]`` vertex pairs sorted lexicographically,
  so operator matrices do not depend on the order triangles were listed in;
* local edge ``k`` of a triangle ``[a, b, c]`` is the edge opposite local
  vertex ``k``, traversed in CCW order: ``k=0 -> b->c``, ``k=1 -> c->a``,
  ``k=2 -> a->b``.  ``edge_sign[t, k]`` is +1 when that traversal agrees with
  the canonical ``[min, max]`` direction and -1 otherwise.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .exceptions import DegenerateGeometryError, MeshError
from .triangle_io import format_ele, format_node, parse_ele, parse_node

DEGENERATE_AREA_TOL = 1e-14

OUTER_MARKER = 1


class Point2(NamedTuple):
    x: float
    y: float


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _signed_areas(vertices, triangles):
    a = vertices[triangles[:, 0]]
    b = vertices[triangles[:, 1]]
    c = vertices[triangles[:, 2]]
    ab = b - a
    ac = c - a
    return 0.5 * (ab[:, 0] * ac[:, 1] - ab[:, 1] * ac[:, 0])


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    """Validated, immutable 2D triangle mesh.

    Build one with :meth:`from_arrays`, :func:`load_mesh`, :func:`read_mesh`
    or :func:`gen_disk_mesh`; the derived fields are filled in for you.

    Attributes
    ----------
    vertices : (n, 2) float array
    triangles : (m, 3) int array, every row counter-clockwise
    edges : (E, 2) int array of ``[i, j]`` with ``i < j``, lexicographic
    edge_of_triangle : (m, 3) int array, local edge k opposite local vertex k
    edge_sign : (m, 3) int array of +-1, see module docstring
    boundary_edges : sorted int array of edges lying on exactly one triangle
    boundary_vertices : sorted int array of vertices touching a boundary edge
    markers : (n,) int array of boundary markers (0 means unmarked)
    reoriented : int array of triangle indices flipped from CW at load
    """

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    edge_of_triangle: np.ndarray
    edge_sign: np.ndarray
    boundary_edges: np.ndarray
    boundary_vertices: np.ndarray
    markers: np.ndarray
    reoriented: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))

    @classmethod
    def from_arrays(cls, vertices, triangles, markers=None):
        """Validate raw arrays and derive the edge table.

        Raises :class:`MeshError` (or its subclass
        :class:`DegenerateGeometryError`) on out-of-range indices, zero-area
        triangles, non-manifold or inconsistently overlapping edges, isolated
        vertices and disconnected meshes.
        """
        vertices = np.array(vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise MeshError(f"vertices must have shape (n, 2), got {vertices.shape}")
        if not np.all(np.isfinite(vertices)):
            bad = int(np.flatnonzero(~np.all(np.isfinite(vertices), axis=1))[0])
            raise MeshError(f"vertex {bad} has a non-finite coordinate")
        tri_in = np.asarray(triangles)
        if tri_in.size == 0:
            raise MeshError("mesh has no triangles")
        if tri_in.ndim != 2 or tri_in.shape[1] != 3:
            raise MeshError(f"triangles must have shape (m, 3), got {tri_in.shape}")
        if not np.issubdtype(tri_in.dtype, np.integer):
            if not np.all(np.equal(np.mod(tri_in, 1), 0)):
                raise MeshError("triangle vertex indices must be integers")
        tri = tri_in.astype(np.int64)
        n = len(vertices)
        out_of_range = (tri < 0) | (tri >= n)
        if out_of_range.any():
            t, k = np.argwhere(out_of_range)[0]
            raise MeshError(
                f"triangle {t} references vertex {tri[t, k]}, valid range is 0..{n - 1}"
            )
        if markers is None:
            markers = np.zeros(n, dtype=np.int64)
        else:
            markers = np.asarray(markers, dtype=np.int64)
            if markers.shape != (n,):
                raise MeshError(f"markers must have shape ({n},), got {markers.shape}")

        area = _signed_areas(vertices, tri)
        span = vertices.max(axis=0) - vertices.min(axis=0)
        diag2 = float(span @ span)
        degenerate = np.abs(area) <= DEGENERATE_AREA_TOL * diag2
        if degenerate.any():
            t = int(np.flatnonzero(degenerate)[0])
            raise DegenerateGeometryError(
                f"triangle {t} {tri[t].tolist()} has zero area ({area[t]:.3e})"
            )
        flipped = np.flatnonzero(area < 0)
        tri = tri.copy()
        tri[flipped, 1], tri[flipped, 2] = tri[flipped, 2].copy(), tri[flipped, 1].copy()

        dup = np.unique(np.sort(tri, axis=1), axis=0, return_counts=True)[1]
        if (dup > 1).any():
            raise MeshError("mesh contains duplicate triangles")

        m = len(tri)
        tails = tri[:, [1, 2, 0]]
        heads = tri[:, [2, 0, 1]]
        lo = np.minimum(tails, heads).ravel()
        hi = np.maximum(tails, heads).ravel()
        edges, inverse, counts = np.unique(
            np.column_stack([lo, hi]), axis=0, return_inverse=True, return_counts=True
        )
        inverse = inverse.ravel()
        if (counts > 2).any():
            e = int(np.flatnonzero(counts > 2)[0])
            raise MeshError(
                f"non-manifold edge {edges[e].tolist()} shared by {counts[e]} triangles"
            )
        edge_of_triangle = inverse.reshape(m, 3)
        edge_sign = np.where(tails < heads, 1, -1).astype(np.int64)

        sign_sum = np.bincount(inverse, weights=edge_sign.ravel(), minlength=len(edges))
        folded = (counts == 2) & (sign_sum != 0)
        if folded.any():
            e = int(np.flatnonzero(folded)[0])
            raise MeshError(
                f"edge {edges[e].tolist()} is traversed in the same direction by both of "
                "its triangles (overlapping or folded mesh)"
            )

        used = np.zeros(n, dtype=bool)
        used[tri.ravel()] = True
        if not used.all():
            v = int(np.flatnonzero(~used)[0])
            raise MeshError(f"vertex {v} is not used by any triangle")

        # triangle adjacency through shared edges
        t_of = np.repeat(np.arange(m), 3)
        order = np.argsort(inverse, kind="stable")
        e_sorted = inverse[order]
        pair = np.flatnonzero(e_sorted[1:] == e_sorted[:-1])
        t1 = t_of[order[pair]]
        t2 = t_of[order[pair + 1]]
        adj = coo_matrix((np.ones(len(t1)), (t1, t2)), shape=(m, m))
        n_comp, _ = connected_components(adj, directed=False)
        if n_comp > 1:
            raise MeshError(f"mesh has {n_comp} edge-connected components, expected 1")

        boundary_edges = np.flatnonzero(counts == 1)
        boundary_vertices = np.unique(edges[boundary_edges].ravel())
        return cls(
            vertices=_frozen(vertices),
            triangles=_frozen(tri),
            edges=_frozen(edges.astype(np.int64)),
            edge_of_triangle=_frozen(edge_of_triangle.astype(np.int64)),
            edge_sign=_frozen(edge_sign),
            boundary_edges=_frozen(boundary_edges.astype(np.int64)),
            boundary_vertices=_frozen(boundary_vertices.astype(np.int64)),
            markers=_frozen(markers),
            reoriented=_frozen(flipped.astype(np.int64)),
        )

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def signed_areas(self):
        return _signed_areas(self.vertices, self.triangles)

    @property
    def area(self):
        return float(self.signed_areas.sum())

    @property
    def edge_lengths(self):
        d = self.vertices[self.edges[:, 1]] - self.vertices[self.edges[:, 0]]
        return np.hypot(d[:, 0], d[:, 1])

    @property
    def bbox_diagonal(self):
        span = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        return float(np.hypot(*span))

    @property
    def is_boundary_edge(self):
        mask = np.zeros(self.n_edges, dtype=bool)
        mask[self.boundary_edges] = True
        return mask

    @property
    def notes(self):
        """Human-readable load notes, e.g. which triangles were reoriented."""
        if len(self.reoriented) == 0:
            return []
        return [f"reoriented {len(self.reoriented)} clockwise triangle(s) to CCW: "
                f"{self.reoriented.tolist()}"]

    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_triangles

    def boundary_loops(self):
        """Split the boundary into closed vertex loops.

        Raises :class:`MeshError` if a boundary vertex does not have exactly
        two incident boundary edges.
        """
        bedges = self.edges[self.boundary_edges]
        deg = np.bincount(bedges.ravel(), minlength=self.n_vertices)
        bad = np.flatnonzero((deg != 0) & (deg != 2))
        if len(bad):
            raise MeshError(
                f"boundary vertex {int(bad[0])} has {int(deg[bad[0]])} boundary edges"
            )
        # follow the CCW traversal direction of each boundary edge
        nxt = {}
        for t, k in zip(*np.nonzero(self.is_boundary_edge[self.edge_of_triangle])):
            tri = self.triangles[t]
            nxt[int(tri[(k + 1) % 3])] = int(tri[(k + 2) % 3])
        loops = []
        seen = set()
        for start in sorted(nxt):
            if start in seen:
                continue
            loop = [start]
            seen.add(start)
            v = nxt[start]
            while v != start:
                loop.append(v)
                seen.add(v)
                v = nxt[v]
            loops.append(loop)
        return loops

    def vertices_with_marker(self, marker):
        return np.flatnonzero(self.markers == marker)

    def boundary_edges_with_marker(self, marker):
        """Boundary edges whose two endpoints both carry ``marker``."""
        be = self.boundary_edges
        ends = self.markers[self.edges[be]]
        return be[(ends[:, 0] == marker) & (ends[:, 1] == marker)]


def signed_area(tri, mesh):
    """Signed area of the vertex triple ``tri``; positive iff CCW."""
    a, b, c = (mesh.vertices[i] for i in tri)
    return 0.5 * float((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def load_mesh(node_text, ele_text, *, node_source="<node>", ele_source="<ele>"):
    """Parse Triangle ``.node``/``.ele`` texts into a validated mesh."""
    vertices, markers, base = parse_node(node_text, source=node_source)
    triangles = parse_ele(ele_text, base=base, source=ele_source)
    return TriangleMesh.from_arrays(vertices, triangles, markers)


def _mesh_paths(path):
    path = Path(path)
    if path.suffix in (".node", ".ele"):
        path = path.with_suffix("")
    return path.with_suffix(".node"), path.with_suffix(".ele")


def read_mesh(path):
    """Read ``<stem>.node`` and ``<stem>.ele``; ``path`` may name either file."""
    node_path, ele_path = _mesh_paths(path)
    for p in (node_path, ele_path):
        if not p.is_file():
            raise FileNotFoundError(f"mesh file not found: {p}")
    return load_mesh(
        node_path.read_text(), ele_path.read_text(),
        node_source=str(node_path), ele_source=str(ele_path),
    )


def save_mesh(mesh):
    """Return ``(node_text, ele_text)``, 0-based, full-precision coordinates."""
    return format_node(mesh.vertices, mesh.markers), format_ele(mesh.triangles)


def write_mesh(mesh, path):
    node_path, ele_path = _mesh_paths(path)
    node_text, ele_text = save_mesh(mesh)
    node_path.write_text(node_text)
    ele_path.write_text(ele_text)
    return node_path, ele_path


def _ring_triangles(inner, outer):
    """Triangulate the band between two concentric rings of vertex ids.

    Both rings start at angle 0 and are evenly spaced; vertices are merged in
    angular order, advancing the outer ring first on ties.
    """
    ni, no = len(inner), len(outer)
    tris = []
    i = j = 0
    while i < ni or j < no:
        # compare next angles (i+1)/ni vs (j+1)/no exactly in integers
        advance_outer = j < no and (i == ni or (j + 1) * ni <= (i + 1) * no)
        if advance_outer:
            tris.append((inner[i % ni], outer[j], outer[(j + 1) % no]))
            j += 1
        else:
            tris.append((inner[i], outer[j % no], inner[(i + 1) % ni]))
            i += 1
    return tris


def gen_disk_mesh(rings):
    """Structured mesh of the unit disk.

    A center vertex plus ring ``k`` (``k = 1..rings``) of ``8k`` evenly spaced
    vertices at radius ``k / rings``.  Outer-ring vertices get marker
    :data:`OUTER_MARKER`.  ``rings=1`` gives 9 nodes and 8 triangles.
    """
    rings = int(rings)
    if rings < 1:
        raise ValueError(f"rings must be >= 1, got {rings}")
    pts = [(0.0, 0.0)]
    ids = [[0]]
    for k in range(1, rings + 1):
        count = 8 * k
        theta = 2.0 * np.pi * np.arange(count) / count
        r = k / rings
        start = len(pts)
        pts.extend(zip(r * np.cos(theta), r * np.sin(theta)))
        ids.append(list(range(start, start + count)))
    tris = [(0, ids[1][j], ids[1][(j + 1) % 8]) for j in range(8)]
    for k in range(2, rings + 1):
        tris.extend(_ring_triangles(ids[k - 1], ids[k]))
    markers = np.zeros(len(pts), dtype=np.int64)
    markers[ids[rings]] = OUTER_MARKER
    return TriangleMesh.from_arrays(np.array(pts), np.array(tris), markers)
