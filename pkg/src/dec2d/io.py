"""Field/dual-mesh writers (CSV, legacy ASCII VTK) and the problem config reader.

All real numbers are written with ``%.17g`` so files round-trip exactly and
identical inputs give byte-identical output.
"""

import csv
import re
from pathlib import Path

import numpy as np

from .exceptions import ProblemError
from .mesh import OUTER_MARKER

MARKER_NAMES = {"outer": OUTER_MARKER, "inner": 2}


def _g(x):
    return f"{x:.17g}"


def write_field_csv(path, mesh, solution, flux_magnitude):
    with open(path, "w", newline="") as fh:
        fh.write("vertex,x,y,u,flux_mag\n")
        for i, ((x, y), u, f) in enumerate(zip(mesh.vertices, solution, flux_magnitude)):
            fh.write(f"{i},{_g(x)},{_g(y)},{_g(u)},{_g(f)}\n")


def _vtk_header(fh, title, points):
    fh.write("# vtk DataFile Version 3.0\n")
    fh.write(f"{title}\nASCII\nDATASET UNSTRUCTURED_GRID\n")
    fh.write(f"POINTS {len(points)} double\n")
    for x, y in points:
        fh.write(f"{_g(x)} {_g(y)} 0\n")


def _vtk_cells(fh, cells, types):
    size = sum(len(c) + 1 for c in cells)
    fh.write(f"CELLS {len(cells)} {size}\n")
    for c in cells:
        fh.write(f"{len(c)} " + " ".join(str(int(i)) for i in c) + "\n")
    fh.write(f"CELL_TYPES {len(cells)}\n")
    fh.write("\n".join(str(t) for t in types) + "\n")


def write_field_vtk(path, mesh, solution, flux_magnitude, flux):
    """Triangles with POINT_DATA ``u``, ``flux_magnitude`` and CELL_DATA ``flux``."""
    with open(path, "w", newline="\n") as fh:
        _vtk_header(fh, "dec2d solution", mesh.vertices)
        _vtk_cells(fh, mesh.triangles, [5] * mesh.n_triangles)
        fh.write(f"POINT_DATA {mesh.n_vertices}\n")
        for name, data in (("u", solution), ("flux_magnitude", flux_magnitude)):
            fh.write(f"SCALARS {name} double 1\nLOOKUP_TABLE default\n")
            fh.write("\n".join(_g(v) for v in data) + "\n")
        fh.write(f"CELL_DATA {mesh.n_triangles}\nVECTORS flux double\n")
        for fx, fy in flux:
            fh.write(f"{_g(fx)} {_g(fy)} 0\n")


def dual_edge_segments(mesh, metrics):
    """Endpoints of each dual edge: two circumcenters, or circumcenter to midpoint."""
    segs = np.empty((mesh.n_edges, 2, 2))
    filled = np.zeros(mesh.n_edges, dtype=int)
    for t, row in enumerate(mesh.edge_of_triangle):
        for e in row:
            segs[e, filled[e]] = metrics.circumcenters[t]
            filled[e] += 1
    mids = 0.5 * (mesh.vertices[mesh.edges[:, 0]] + mesh.vertices[mesh.edges[:, 1]])
    boundary = filled == 1
    segs[boundary, 1] = mids[boundary]
    return segs


def write_dual_vtk(path, mesh, metrics):
    """Primal triangles plus dual edges as line cells.

    Points are primal vertices, then circumcenters, then boundary-edge
    midpoints.  CELL_DATA ``kind`` is 0 for primal triangles and 1 for dual
    edges; ``signed_dual_length`` is set on dual edges.
    """
    n, m = mesh.n_vertices, mesh.n_triangles
    be = mesh.boundary_edges
    mids = 0.5 * (mesh.vertices[mesh.edges[be, 0]] + mesh.vertices[mesh.edges[be, 1]])
    points = np.vstack([mesh.vertices, metrics.circumcenters, mids])
    mid_index = {int(e): n + m + j for j, e in enumerate(be)}
    owners = [[] for _ in range(mesh.n_edges)]
    for t, row in enumerate(mesh.edge_of_triangle):
        for e in row:
            owners[e].append(n + t)
    lines = [o if len(o) == 2 else [o[0], mid_index[e]] for e, o in enumerate(owners)]
    cells = [list(t) for t in mesh.triangles] + lines
    types = [5] * m + [3] * mesh.n_edges
    with open(path, "w", newline="\n") as fh:
        _vtk_header(fh, "dec2d primal and circumcentric dual mesh", points)
        _vtk_cells(fh, cells, types)
        fh.write(f"CELL_DATA {len(cells)}\nSCALARS kind int 1\nLOOKUP_TABLE default\n")
        fh.write("\n".join(["0"] * m + ["1"] * mesh.n_edges) + "\n")
        fh.write("SCALARS signed_dual_length double 1\nLOOKUP_TABLE default\n")
        fh.write("\n".join(["0"] * m + [_g(v) for v in metrics.dual_edge_length]) + "\n")


def write_dual_csv(edges_path, vertices_path, mesh, metrics):
    lengths = mesh.edge_lengths
    with open(edges_path, "w", newline="") as fh:
        fh.write("edge,i,j,primal_length,dual_length\n")
        for e, ((i, j), lp, ld) in enumerate(zip(mesh.edges, lengths, metrics.dual_edge_length)):
            fh.write(f"{e},{i},{j},{_g(lp)},{_g(ld)}\n")
    with open(vertices_path, "w", newline="") as fh:
        fh.write("vertex,x,y,dual_area\n")
        for v, ((x, y), a) in enumerate(zip(mesh.vertices, metrics.dual_vertex_area)):
            fh.write(f"{v},{_g(x)},{_g(y)},{_g(a)}\n")


def write_table_csv(path, rows, columns):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_g(row[c]) if isinstance(row[c], float) else row[c] for c in columns])


def format_table(rows, columns, digits=6):
    """Right-aligned text table with ``digits`` significant digits."""
    def cell(v):
        return f"{v:.{digits}g}" if isinstance(v, float) else str(v)

    body = [[cell(r[c]) for c in columns] for r in rows]
    widths = [max(len(c), *(len(b[i]) for b in body)) if body else len(c)
              for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(b, widths)) for b in body]
    return "\n".join(lines)


def parse_marker(token):
    token = token.strip().lower()
    if token in MARKER_NAMES:
        return MARKER_NAMES[token]
    try:
        return int(token)
    except ValueError:
        raise ProblemError(f"unknown boundary marker {token!r}") from None


def parse_marker_values(spec):
    """``"outer:10, 2:5"`` -> ``{1: 10.0, 2: 5.0}``."""
    out = {}
    for item in re.split(r"[,\s]+", spec.strip()):
        if not item:
            continue
        if ":" not in item:
            raise ProblemError(f"expected marker:value, got {item!r}")
        marker, value = item.split(":", 1)
        try:
            out[parse_marker(marker)] = float(value)
        except ValueError:
            raise ProblemError(f"bad value in {item!r}") from None
    return out


def read_source_csv(path, n_vertices):
    """Per-vertex source values: ``vertex,q`` rows (header optional) or one value per line."""
    q = np.full(n_vertices, np.nan)
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and r[0].strip() and not r[0].startswith("#")]
    if rows and not re.match(r"^[-+.\d]", rows[0][0].strip()):
        rows = rows[1:]
    try:
        if rows and len(rows[0]) >= 2:
            for r in rows:
                q[int(r[0])] = float(r[1])
        else:
            for i, r in enumerate(rows):
                q[i] = float(r[0])
    except (ValueError, IndexError) as exc:
        raise ProblemError(f"{path}: malformed source file ({exc})") from None
    if np.isnan(q).any():
        raise ProblemError(f"{path}: source values missing for some vertices")
    return q


def read_problem_config(path):
    """Parse a ``key = value`` problem file.

    Keys: ``kappa``, ``source`` (a number or a CSV path relative to the
    config file), ``dirichlet`` and ``neumann`` (``marker:value`` lists).
    Returns a dict with the raw pieces; the source path is resolved but not
    read, since the vertex count is needed for that.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"problem config not found: {path}")
    cfg = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ProblemError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key == "kappa":
            try:
                cfg["kappa"] = float(value)
            except ValueError:
                raise ProblemError(f"{path}:{lineno}: kappa must be a number") from None
        elif key == "source":
            try:
                cfg["source"] = float(value)
            except ValueError:
                src = Path(value)
                cfg["source"] = src if src.is_absolute() else path.parent / src
        elif key in ("dirichlet", "neumann"):
            cfg[key] = parse_marker_values(value)
        else:
            raise ProblemError(f"{path}:{lineno}: unknown key {key!r}")
    return cfg
