"""DEC discretisation of the Poisson equation ``kappa * Laplace(u) = q``.

The assembled system is::

    K u = -M_0,2 q + n,        K = kappa * d0^T M_1,1 d0

where ``d0`` is :func:`~dec2d.chains.derivative_0_1`, ``M_1,1`` and
``M_0,2`` the diagonal Hodge stars and ``n`` the Neumann load.  Written this
way ``K`` is positive semidefinite (constants span its kernel) and a
negative source produces a positive bump.

Neumann data ``h`` on a boundary edge is the inward normal heat flux density,
``h = kappa * du/dn`` with ``n`` the outward normal; each Neumann edge adds
``h * length / 2`` to both of its endpoint rows.  Dirichlet values are
eliminated symmetrically so conjugate gradient can be used.
"""

import time
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .chains import derivative_0_1
from .dual import dual_metrics
from .exceptions import ProblemError
from .hodge import hodge_0_2, hodge_1_1
from .linalg import DEFAULT_TOL, cg_solve, dense_solve, triple_product

BARYCENTRIC_SLACK = 1e-12


@dataclass
class PoissonProblem:
    """Coefficients and boundary data.

    Parameters
    ----------
    kappa : float
        Diffusion constant, > 0.
    source : float or array of shape (n_vertices,)
        Nodal values of ``q``.
    dirichlet : dict
        ``vertex index -> prescribed value``.  At least one is required.
    neumann : dict
        ``boundary edge index -> inward flux density h``.
    """

    kappa: float = 1.0
    source: object = 0.0
    dirichlet: dict = field(default_factory=dict)
    neumann: dict = field(default_factory=dict)

    @classmethod
    def from_markers(cls, mesh, *, kappa=1.0, source=0.0, dirichlet=None, neumann=None):
        """Build a problem from ``marker -> value`` maps over .node markers."""
        d = {}
        for marker, value in (dirichlet or {}).items():
            verts = mesh.vertices_with_marker(marker)
            if len(verts) == 0:
                raise ProblemError(f"no vertex carries Dirichlet marker {marker}")
            d.update((int(v), float(value)) for v in verts)
        nm = {}
        for marker, value in (neumann or {}).items():
            edges = mesh.boundary_edges_with_marker(marker)
            if len(edges) == 0:
                raise ProblemError(f"no boundary edge carries Neumann marker {marker}")
            nm.update((int(e), float(value)) for e in edges)
        return cls(kappa=kappa, source=source, dirichlet=d, neumann=nm)

    def source_vector(self, n):
        q = np.asarray(self.source, dtype=float)
        if q.ndim == 0:
            return np.full(n, float(q))
        if q.shape != (n,):
            raise ProblemError(f"source has shape {q.shape}, expected ({n},)")
        return q

    def validate(self, mesh):
        if not (np.isfinite(self.kappa) and self.kappa > 0):
            raise ProblemError(f"kappa must be a positive finite number, got {self.kappa}")
        q = self.source_vector(mesh.n_vertices)
        if not np.all(np.isfinite(q)):
            raise ProblemError("source has non-finite values")
        if not self.dirichlet:
            raise ProblemError("at least one Dirichlet vertex is required (pure Neumann is singular)")
        for v, value in self.dirichlet.items():
            if not 0 <= int(v) < mesh.n_vertices:
                raise ProblemError(f"Dirichlet vertex {v} is not a mesh vertex")
            if not np.isfinite(value):
                raise ProblemError(f"Dirichlet value at vertex {v} is not finite")
        on_boundary = mesh.is_boundary_edge
        for e, value in self.neumann.items():
            if not 0 <= int(e) < mesh.n_edges or not on_boundary[int(e)]:
                raise ProblemError(f"Neumann edge {e} is not a boundary edge")
            if not np.isfinite(value):
                raise ProblemError(f"Neumann value on edge {e} is not finite")


def boundary_values(mesh, fn, vertices=None):
    """``{vertex: fn(x, y)}`` over ``vertices`` (default: all boundary vertices)."""
    if vertices is None:
        vertices = mesh.boundary_vertices
    return {int(v): float(fn(*mesh.vertices[v])) for v in vertices}


def neumann_vector(mesh, neumann):
    """Nodal Neumann load: each edge adds ``h * length / 2`` to both ends."""
    out = np.zeros(mesh.n_vertices)
    if not neumann:
        return out
    edges = np.fromiter(neumann.keys(), dtype=np.int64)
    h = np.fromiter(neumann.values(), dtype=float)
    share = 0.5 * h * mesh.edge_lengths[edges]
    ends = mesh.edges[edges]
    np.add.at(out, ends[:, 0], share)
    np.add.at(out, ends[:, 1], share)
    return out


def apply_dirichlet(K, b, dirichlet):
    """Symmetric elimination of prescribed values.

    Constrained rows and columns are zeroed with a unit diagonal; the known
    columns are moved to the right-hand side.
    """
    n = K.shape[0]
    if not dirichlet:
        return K.tocsr(), np.asarray(b, dtype=float).copy()
    fixed = np.fromiter(dirichlet.keys(), dtype=np.int64)
    values = np.fromiter(dirichlet.values(), dtype=float)
    u_d = np.zeros(n)
    u_d[fixed] = values
    is_fixed = np.zeros(n, dtype=bool)
    is_fixed[fixed] = True
    keep = sp.diags((~is_fixed).astype(float))
    b = np.asarray(b, dtype=float) - K @ u_d
    b[fixed] = values
    Kc = (keep @ K @ keep + sp.diags(is_fixed.astype(float))).tocsr()
    Kc.eliminate_zeros()
    Kc.sort_indices()
    return Kc, b


def stiffness_matrix(mesh, metrics, kappa=1.0):
    """Unconstrained ``kappa * d0^T M_1,1 d0``."""
    d0 = derivative_0_1(mesh)
    return kappa * triple_product(d0, hodge_1_1(mesh, metrics))


def load_vector(mesh, metrics, problem):
    """``-M_0,2 q`` plus the Neumann load, before Dirichlet elimination."""
    q = problem.source_vector(mesh.n_vertices)
    return -(hodge_0_2(mesh, metrics) @ q) + neumann_vector(mesh, problem.neumann)


def assemble(mesh, metrics, problem):
    """Constrained DEC system ``(K, b)`` ready for :func:`~dec2d.linalg.cg_solve`."""
    problem.validate(mesh)
    K = stiffness_matrix(mesh, metrics, problem.kappa)
    b = load_vector(mesh, metrics, problem)
    return apply_dirichlet(K, b, problem.dirichlet)


def flux_field(mesh, solution, kappa=1.0):
    """Per-triangle flux ``-kappa * grad(u_h)`` and per-vertex magnitudes.

    The vertex magnitude is the norm of the area-weighted mean of the fluxes
    of the incident triangles.
    """
    u = np.asarray(solution, dtype=float)
    if u.shape != (mesh.n_vertices,):
        raise ValueError(f"solution has shape {u.shape}, expected ({mesh.n_vertices},)")
    tri = mesh.triangles
    area = mesh.signed_areas
    grad = np.zeros((mesh.n_triangles, 2))
    for k in range(3):
        p = mesh.vertices[tri[:, (k + 1) % 3]]
        q = mesh.vertices[tri[:, (k + 2) % 3]]
        d = q - p
        # gradient of the hat function of local vertex k
        grad += u[tri[:, k], None] * np.column_stack([-d[:, 1], d[:, 0]])
    grad /= (2.0 * area)[:, None]
    flux = -kappa * grad

    weights = np.bincount(tri.ravel(), weights=np.repeat(area, 3), minlength=mesh.n_vertices)
    avg = np.column_stack([
        np.bincount(tri.ravel(), weights=np.repeat(area * flux[:, i], 3),
                    minlength=mesh.n_vertices)
        for i in range(2)
    ]) / weights[:, None]
    return flux, np.hypot(avg[:, 0], avg[:, 1])


def locate_points(mesh, points, slack=BARYCENTRIC_SLACK, chunk=200_000):
    """Containing triangle and barycentric coordinates for each point.

    Returns ``(tri_index, bary)``; points outside the mesh get index -1 and
    NaN coordinates.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    tri = mesh.triangles
    a = mesh.vertices[tri[:, 0]]
    e1 = mesh.vertices[tri[:, 1]] - a
    e2 = mesh.vertices[tri[:, 2]] - a
    det = e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0]
    index = np.full(len(pts), -1, dtype=np.int64)
    bary = np.full((len(pts), 3), np.nan)
    step = max(1, chunk // max(1, len(tri)))
    for start in range(0, len(pts), step):
        p = pts[start : start + step, None, :] - a[None, :, :]
        l1 = (p[..., 0] * e2[:, 1] - p[..., 1] * e2[:, 0]) / det
        l2 = (e1[:, 0] * p[..., 1] - e1[:, 1] * p[..., 0]) / det
        l0 = 1.0 - l1 - l2
        inside = (l0 >= -slack) & (l1 >= -slack) & (l2 >= -slack)
        found = inside.any(axis=1)
        first = inside.argmax(axis=1)
        rows = np.flatnonzero(found)
        idx = start + rows
        t = first[rows]
        index[idx] = t
        bary[idx] = np.column_stack([l0[rows, t], l1[rows, t], l2[rows, t]])
    return index, bary


def interpolate(mesh, values, points):
    """Piecewise-linear interpolation of nodal ``values``; NaN outside the mesh."""
    values = np.asarray(values, dtype=float)
    index, bary = locate_points(mesh, points)
    out = np.full(len(index), np.nan)
    hit = index >= 0
    out[hit] = np.einsum("ij,ij->i", bary[hit], values[mesh.triangles[index[hit]]])
    return out


def sample_line(mesh, values, p0, p1, n):
    """``n`` evenly spaced samples on the segment ``p0 -> p1``.

    Returns an ``(n, 4)`` array of ``(t, x, y, value)`` with ``t`` in [0, 1];
    samples outside the mesh carry NaN as the gap marker.
    """
    if n < 2:
        raise ValueError("need at least 2 samples")
    t = np.linspace(0.0, 1.0, int(n))
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    xy = p0[None, :] + t[:, None] * (p1 - p0)[None, :]
    return np.column_stack([t, xy, interpolate(mesh, values, xy)])


class SolverOptions(NamedTuple):
    tol: float = DEFAULT_TOL
    max_iter: int = None
    jacobi: bool = False
    solver: str = "cg"


@dataclass
class SolveReport:
    """Solution, derived flux fields and solver diagnostics."""

    method: str
    solution: np.ndarray
    flux_per_triangle: np.ndarray
    flux_magnitude_per_vertex: np.ndarray
    iterations: int
    residual: float
    wall_time: float = 0.0

    @property
    def min_solution(self):
        return float(self.solution.min())

    @property
    def max_solution(self):
        return float(self.solution.max())

    @property
    def max_flux_magnitude(self):
        """Largest per-triangle flux norm (the quantity tabulated for comparisons)."""
        return float(np.hypot(*self.flux_per_triangle.T).max())

    @property
    def max_vertex_flux_magnitude(self):
        return float(self.flux_magnitude_per_vertex.max())

    @property
    def n_nodes(self):
        return len(self.solution)

    @property
    def n_elements(self):
        return len(self.flux_per_triangle)

    def summary(self):
        return (
            f"method={self.method} max_u={self.max_solution:.6g} min_u={self.min_solution:.6g} "
            f"max_flux={self.max_flux_magnitude:.6g} iterations={self.iterations} "
            f"residual={self.residual:.3g} time={self.wall_time:.3g}s"
        )


def solve_system(K, b, options=None):
    """Solve ``K x = b`` with CG (default) or dense LU; returns ``(x, iters, residual)``."""
    options = options or SolverOptions()
    if options.solver == "dense":
        x = dense_solve(K, b)
        bn = np.linalg.norm(b)
        res = float(np.linalg.norm(b - K @ x) / bn) if bn else 0.0
        return x, 0, res
    if options.solver != "cg":
        raise ValueError(f"unknown solver {options.solver!r}")
    return cg_solve(K, b, options.tol, options.max_iter, jacobi=options.jacobi)


def finish_report(method, mesh, problem, K, b, options, started):
    x, iterations, residual = solve_system(K, b, options)
    flux, mag = flux_field(mesh, x, problem.kappa)
    return SolveReport(
        method=method,
        solution=x,
        flux_per_triangle=flux,
        flux_magnitude_per_vertex=mag,
        iterations=int(iterations),
        residual=float(residual),
        wall_time=time.perf_counter() - started,
    )


def solve_problem(mesh, problem, options=None, metrics=None):
    """Assemble and solve the DEC system, returning a :class:`SolveReport`."""
    started = time.perf_counter()
    if metrics is None:
        metrics = dual_metrics(mesh)
    K, b = assemble(mesh, metrics, problem)
    return finish_report("dec", mesh, problem, K, b, options, started)
