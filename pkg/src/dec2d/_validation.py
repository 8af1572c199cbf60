"""Input validation helpers shared by the estimators and the CLI."""

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import MeshError
from .mesh import TriangleMesh


def check_mesh(mesh):
    """Accept a :class:`TriangleMesh` or a ``(vertices, triangles)`` pair."""
    if isinstance(mesh, TriangleMesh):
        return mesh
    if isinstance(mesh, (tuple, list)) and len(mesh) in (2, 3):
        return TriangleMesh.from_arrays(*mesh)
    raise MeshError(
        f"expected a TriangleMesh or (vertices, triangles), got {type(mesh).__name__}"
    )


def check_points(X):
    """2D float array of shape (n, 2) with finite entries."""
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 2:
        raise ValueError(f"points must have 2 columns (x, y), got {X.shape[1]}")
    return X


def check_positive(name, value, *, integer=False):
    if integer:
        if int(value) != value or value < 1:
            raise ValueError(f"{name} must be a positive integer, got {value!r}")
        return int(value)
    value = float(value)
    if not (np.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value
