"""scikit-learn style wrappers around the DEC and P1 Poisson solvers.

``fit(mesh, problem)`` assembles and solves; ``predict(points)`` returns the
piecewise-linear solution at arbitrary points (NaN outside the mesh), so a
fitted solver can be scored against an exact solution like any regressor::

    solver = DECPoissonSolver(tol=1e-12).fit(mesh, problem)
    solver.score(points, exact(points))
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.metrics import r2_score
from sklearn.utils.validation import check_is_fitted

from ._validation import check_mesh, check_points, check_positive
from .dual import dual_metrics
from .femref import solve_fem
from .poisson import PoissonProblem, SolverOptions, interpolate, sample_line, solve_problem


class _PoissonSolver(RegressorMixin, BaseEstimator):
    method = None

    def __init__(self, tol=1e-10, max_iter=None, jacobi=False, solver="cg"):
        self.tol = tol
        self.max_iter = max_iter
        self.jacobi = jacobi
        self.solver = solver

    def _options(self):
        if self.solver not in ("cg", "dense"):
            raise ValueError(f"solver must be 'cg' or 'dense', got {self.solver!r}")
        max_iter = None if self.max_iter is None else check_positive(
            "max_iter", self.max_iter, integer=True
        )
        return SolverOptions(
            tol=check_positive("tol", self.tol), max_iter=max_iter,
            jacobi=bool(self.jacobi), solver=self.solver,
        )

    def fit(self, mesh, problem):
        """Solve ``problem`` on ``mesh``.

        Parameters
        ----------
        mesh : TriangleMesh or (vertices, triangles)
        problem : PoissonProblem

        Returns
        -------
        self
        """
        if not isinstance(problem, PoissonProblem):
            raise TypeError(f"problem must be a PoissonProblem, got {type(problem).__name__}")
        options = self._options()
        self.mesh_ = check_mesh(mesh)
        self.problem_ = problem
        self.report_ = self._solve(self.mesh_, problem, options)
        self.solution_ = self.report_.solution
        self.n_features_in_ = 2
        return self

    def predict(self, X):
        """Interpolated solution at points ``X`` of shape (n, 2)."""
        check_is_fitted(self, "solution_")
        return interpolate(self.mesh_, self.solution_, check_points(X))

    def sample_line(self, p0, p1, n=200):
        check_is_fitted(self, "solution_")
        return sample_line(self.mesh_, self.solution_, p0, p1, n)

    def flux_magnitude(self, X):
        """Interpolated per-vertex flux magnitude at points ``X``."""
        check_is_fitted(self, "report_")
        return interpolate(
            self.mesh_, self.report_.flux_magnitude_per_vertex, check_points(X)
        )

    def score(self, X, y, sample_weight=None):
        """R^2 of the interpolated solution; points outside the mesh are dropped."""
        pred = self.predict(X)
        keep = ~np.isnan(pred)
        y = np.asarray(y, dtype=float)
        w = None if sample_weight is None else np.asarray(sample_weight)[keep]
        return r2_score(y[keep], pred[keep], sample_weight=w)


class DECPoissonSolver(_PoissonSolver):
    """Discrete exterior calculus solver (circumcentric dual, diagonal Hodge stars).

    Attributes set by ``fit``: ``mesh_``, ``problem_``, ``metrics_``,
    ``report_``, ``solution_``.
    """

    method = "dec"

    def _solve(self, mesh, problem, options):
        self.metrics_ = dual_metrics(mesh)
        return solve_problem(mesh, problem, options, metrics=self.metrics_)


class FEMPoissonSolver(_PoissonSolver):
    """Linear finite elements with a lumped-mass load (reference solver)."""

    method = "fem"

    def _solve(self, mesh, problem, options):
        return solve_fem(mesh, problem, options)


def make_solver(method, **params):
    solvers = {"dec": DECPoissonSolver, "fem": FEMPoissonSolver}
    try:
        return solvers[method](**params)
    except KeyError:
        raise ValueError(f"method must be one of {sorted(solvers)}, got {method!r}") from None
