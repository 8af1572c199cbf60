"""Linear (P1) finite elements for the same Poisson problem.

Stiffness comes from element gradients, not cotangents, so comparing it with
the DEC matrix is an independent check.  The load uses a lumped mass (one
third of each incident triangle's area per vertex); constraints, solver and
flux post-processing are shared with :mod:`dec2d.poisson`.
"""

import time

import numpy as np
import scipy.sparse as sp

from .linalg import csr_from_triplets
from .poisson import apply_dirichlet, finish_report, neumann_vector


def _hat_gradients(mesh):
    """(m, 3, 2) gradients of the three hat functions on each triangle."""
    tri = mesh.triangles
    v = mesh.vertices
    area = mesh.signed_areas
    grads = np.empty((mesh.n_triangles, 3, 2))
    for k in range(3):
        d = v[tri[:, (k + 2) % 3]] - v[tri[:, (k + 1) % 3]]
        grads[:, k, 0] = -d[:, 1]
        grads[:, k, 1] = d[:, 0]
    return grads / (2.0 * area)[:, None, None]


def element_matrices(mesh, kappa=1.0):
    """(m, 3, 3) element stiffness ``kappa * area * grad(phi_i) . grad(phi_j)``."""
    g = _hat_gradients(mesh)
    return kappa * mesh.signed_areas[:, None, None] * np.einsum("tik,tjk->tij", g, g)


def p1_stiffness(mesh, kappa=1.0):
    """Assembled, unconstrained P1 stiffness matrix."""
    ke = element_matrices(mesh, kappa)
    tri = mesh.triangles
    rows = np.repeat(tri, 3, axis=1).ravel()
    cols = np.tile(tri, (1, 3)).ravel()
    K = csr_from_triplets(rows, cols, ke.ravel(), (mesh.n_vertices, mesh.n_vertices))
    # summation order can leave last-bit asymmetry; mirror the upper triangle
    upper = sp.triu(K, format="csr")
    K = (upper + sp.triu(K, k=1, format="csr").T).tocsr()
    K.sort_indices()
    return K


def lumped_mass(mesh):
    """Vertex weights: one third of the summed incident triangle areas."""
    return np.bincount(
        mesh.triangles.ravel(),
        weights=np.repeat(mesh.signed_areas / 3.0, 3),
        minlength=mesh.n_vertices,
    )


def p1_load(mesh, source, neumann=None):
    """``-lumped_mass * q`` plus the shared Neumann load."""
    q = np.asarray(source, dtype=float)
    if q.ndim == 0:
        q = np.full(mesh.n_vertices, float(q))
    return -lumped_mass(mesh) * q + neumann_vector(mesh, neumann or {})


def assemble_fem(mesh, problem):
    problem.validate(mesh)
    K = p1_stiffness(mesh, problem.kappa)
    b = p1_load(mesh, problem.source_vector(mesh.n_vertices), problem.neumann)
    return apply_dirichlet(K, b, problem.dirichlet)


def solve_fem(mesh, problem, options=None):
    """Assemble and solve the P1 system, returning a :class:`~dec2d.poisson.SolveReport`."""
    started = time.perf_counter()
    K, b = assemble_fem(mesh, problem)
    return finish_report("fem", mesh, problem, K, b, options, started)
