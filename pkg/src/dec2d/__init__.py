"""Discrete exterior calculus for the 2D Poisson equation on triangle meshes."""

__version__ = "0.1.0"

from .chains import (
    IncidenceMatrix,
    boundary_1_0,
    boundary_2_1,
    derivative_0_1,
    dual_boundary_2_1,
    incidence_matrices,
)
from .dual import DualMetrics, circumcenter, dual_metrics, signed_dual_edge_contribution
from .estimators import DECPoissonSolver, FEMPoissonSolver
from .exceptions import (
    CGBreakdownError,
    ConvergenceError,
    Dec2dError,
    DegenerateGeometryError,
    MeshError,
    MeshFormatError,
    ProblemError,
    SolverError,
)
from .femref import p1_load, p1_stiffness, solve_fem
from .hodge import DiagonalOperator, hodge_0_2, hodge_1_1, hodge_2_0
from .linalg import cg_solve, dense_solve, triple_product
from .mesh import Point2, TriangleMesh, gen_disk_mesh, load_mesh, read_mesh, save_mesh, signed_area
from .poisson import (
    PoissonProblem,
    SolveReport,
    SolverOptions,
    assemble,
    flux_field,
    sample_line,
    solve_problem,
)

__all__ = [
    "CGBreakdownError", "ConvergenceError", "DECPoissonSolver", "Dec2dError",
    "DegenerateGeometryError", "DiagonalOperator", "DualMetrics", "FEMPoissonSolver",
    "IncidenceMatrix", "MeshError", "MeshFormatError", "Point2", "PoissonProblem",
    "ProblemError", "SolveReport", "SolverError", "SolverOptions", "TriangleMesh",
    "assemble", "boundary_1_0", "boundary_2_1", "cg_solve", "circumcenter", "dense_solve",
    "derivative_0_1", "dual_boundary_2_1", "dual_metrics", "flux_field", "gen_disk_mesh",
    "hodge_0_2", "hodge_1_1", "hodge_2_0", "incidence_matrices", "load_mesh", "p1_load",
    "p1_stiffness", "read_mesh", "sample_line", "save_mesh", "signed_area",
    "signed_dual_edge_contribution", "solve_fem", "solve_problem", "triple_product",
]
