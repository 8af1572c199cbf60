"""Refinement studies on the structured unit-disk family.

The benchmark problem is ``kappa = 1``, ``q = -1`` and ``u = 10`` on the
unit circle, whose exact solution is ``(1 - x^2 - y^2) / 4 + 10``.
"""

import numpy as np

from .estimators import make_solver
from .linalg import DENSE_LIMIT
from .mesh import OUTER_MARKER, gen_disk_mesh
from .poisson import PoissonProblem

DISK_KAPPA = 1.0
DISK_SOURCE = -1.0
DISK_BOUNDARY_VALUE = 10.0

# Nodal errors below this are treated as round-off: the method reproduced the
# exact solution and an observed order is not measurable.
ROUNDOFF_FLOOR = 1e-10

STUDY_TOL = 1e-13

COMPARE_COLUMNS = (
    "rings", "nodes", "elements", "dec_max_u", "fem_max_u", "dec_max_flux", "fem_max_flux",
)
CONVERGENCE_COLUMNS = ("method", "rings", "nodes", "h", "linf_error", "l2_error", "order")


def disk_exact(x, y):
    return 0.25 * (1.0 - x * x - y * y) + DISK_BOUNDARY_VALUE


def disk_problem(mesh):
    return PoissonProblem.from_markers(
        mesh, kappa=DISK_KAPPA, source=DISK_SOURCE,
        dirichlet={OUTER_MARKER: DISK_BOUNDARY_VALUE},
    )


def _solver(method, n):
    if n <= DENSE_LIMIT:
        return make_solver(method, solver="dense")
    return make_solver(method, tol=STUDY_TOL)


def _check_family(rings_list):
    rings_list = [int(r) for r in rings_list]
    if not rings_list:
        raise ValueError("refinement family is empty")
    if any(r < 1 for r in rings_list):
        raise ValueError("rings must be >= 1")
    return rings_list


def compare_table(rings_list, solver_params=None):
    """DEC vs FEM maximum temperature and flux over a disk refinement family."""
    rows = []
    for rings in _check_family(rings_list):
        mesh = gen_disk_mesh(rings)
        problem = disk_problem(mesh)
        row = {"rings": rings, "nodes": mesh.n_vertices, "elements": mesh.n_triangles}
        for method in ("dec", "fem"):
            params = solver_params or {}
            solver = make_solver(method, **params) if params else _solver(method, mesh.n_vertices)
            report = solver.fit(mesh, problem).report_
            row[f"{method}_max_u"] = report.max_solution
            row[f"{method}_max_flux"] = report.max_flux_magnitude
        rows.append(row)
    return rows


def observed_order(e_coarse, e_fine, h_coarse, h_fine):
    """``log(e_c / e_f) / log(h_c / h_f)``; ``inf`` when both errors are round-off."""
    if e_coarse <= ROUNDOFF_FLOOR and e_fine <= ROUNDOFF_FLOOR:
        return float("inf")
    if e_fine <= 0.0 or e_coarse <= 0.0:
        return float("nan")
    return float(np.log(e_coarse / e_fine) / np.log(h_coarse / h_fine))


def convergence_table(rings_list, methods=("dec", "fem")):
    """Nodal L-infinity / RMS errors against the exact disk solution.

    ``h`` is the longest edge.  ``order`` compares each level with the
    previous one of the same method (NaN on the first level).
    """
    rings_list = _check_family(rings_list)
    rows = []
    for method in methods:
        prev = None
        for rings in rings_list:
            mesh = gen_disk_mesh(rings)
            report = _solver(method, mesh.n_vertices).fit(mesh, disk_problem(mesh)).report_
            err = report.solution - disk_exact(mesh.vertices[:, 0], mesh.vertices[:, 1])
            linf = float(np.abs(err).max())
            l2 = float(np.sqrt(np.mean(err**2)))
            h = float(mesh.edge_lengths.max())
            order = float("nan") if prev is None else observed_order(prev[0], linf, prev[1], h)
            rows.append({
                "method": method, "rings": rings, "nodes": mesh.n_vertices, "h": h,
                "linf_error": linf, "l2_error": l2, "order": order,
            })
            prev = (linf, h)
    return rows
