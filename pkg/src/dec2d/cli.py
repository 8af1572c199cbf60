"""Command-line interface: ``dec2d <subcommand> ...``.

Exit status is 0 on success, 1 when the numerical pipeline fails (bad mesh,
solver breakdown) and 2 for configuration errors (bad flags, missing files,
invalid boundary data).
"""

import argparse
import json
import os
import sys
from pathlib import Path

from threadpoolctl import threadpool_limits

from . import __version__
from .dual import dual_metrics, well_centered_report
from .estimators import make_solver
from .exceptions import Dec2dError, MeshFormatError, ProblemError
from .io import (
    format_table,
    parse_marker_values,
    read_problem_config,
    read_source_csv,
    write_dual_csv,
    write_dual_vtk,
    write_field_csv,
    write_field_vtk,
    write_table_csv,
)
from .mesh import gen_disk_mesh, read_mesh, write_mesh
from .poisson import PoissonProblem, sample_line
from .study import COMPARE_COLUMNS, CONVERGENCE_COLUMNS, compare_table, convergence_table


class ConfigError(Exception):
    """Bad command-line configuration (exit status 2)."""


def _int_list(text):
    try:
        return [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a list of integers, got {text!r}") from None


def _point(text):
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y got {text!r}") from None
    return (x, y)


def _threads():
    raw = os.environ.get("DEC2D_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"DEC2D_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"DEC2D_THREADS must be a positive integer, got {raw!r}")
    return n


def _add_mesh_args(p):
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--mesh", help="mesh stem or path to the .node/.ele file")
    g.add_argument("--gen-disk", type=int, metavar="RINGS", help="use the structured unit disk")


def _add_problem_args(p):
    p.add_argument("--config", help="key = value problem file")
    p.add_argument("--kappa", type=float)
    p.add_argument("--source", help="constant source q, or a per-vertex CSV path")
    p.add_argument("--dirichlet", action="append", default=[], metavar="MARKER:VALUE")
    p.add_argument("--neumann", action="append", default=[], metavar="MARKER:VALUE")


def _add_solver_args(p):
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--jacobi", action="store_true", help="Jacobi-preconditioned CG")
    p.add_argument("--solver", choices=("cg", "dense"), default="cg")


def build_parser():
    parser = argparse.ArgumentParser(prog="dec2d", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-disk", help="write the structured unit-disk mesh")
    p.add_argument("--rings", type=int, required=True)
    p.add_argument("--out", required=True, help="output stem (writes STEM.node, STEM.ele)")

    p = sub.add_parser("solve", help="solve a Poisson problem")
    _add_mesh_args(p)
    _add_problem_args(p)
    _add_solver_args(p)
    p.add_argument("--method", choices=("dec", "fem", "both"), default="dec")
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("compare", help="DEC vs FEM table over a disk refinement family")
    p.add_argument("--rings", type=_int_list, default=[1, 2, 4, 8])
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("dual", help="export the circumcentric dual mesh")
    _add_mesh_args(p)
    p.add_argument("--out-dir", default=".")

    p = sub.add_parser("convergence", help="error and observed order on the disk family")
    p.add_argument("--rings", type=_int_list, default=[2, 4, 8, 16])
    p.add_argument("--method", choices=("dec", "fem", "both"), default="both")
    p.add_argument("--out", default="convergence.csv")

    p = sub.add_parser("sample", help="solve, then sample the solution along a segment")
    _add_mesh_args(p)
    _add_problem_args(p)
    _add_solver_args(p)
    p.add_argument("--method", choices=("dec", "fem"), default="dec")
    p.add_argument("--p0", type=_point, default=(-1.0, 0.0))
    p.add_argument("--p1", type=_point, default=(1.0, 0.0))
    p.add_argument("-n", "--n", type=int, default=200)
    p.add_argument("--out", default="samples.csv")
    return parser


def _load_mesh(args):
    if args.gen_disk is not None:
        if args.gen_disk < 1:
            raise ConfigError("--gen-disk needs rings >= 1")
        return gen_disk_mesh(args.gen_disk)
    try:
        return read_mesh(args.mesh)
    except FileNotFoundError as exc:
        raise ConfigError(str(exc)) from None
    except MeshFormatError as exc:
        raise ConfigError(str(exc)) from None


def _problem(args, mesh):
    cfg = read_problem_config(args.config) if args.config else {}
    dirichlet = dict(cfg.get("dirichlet", {}))
    neumann = dict(cfg.get("neumann", {}))
    for item in args.dirichlet:
        dirichlet.update(parse_marker_values(item))
    for item in args.neumann:
        neumann.update(parse_marker_values(item))
    kappa = args.kappa if args.kappa is not None else cfg.get("kappa", 1.0)
    source = cfg.get("source", 0.0)
    if args.source is not None:
        try:
            source = float(args.source)
        except ValueError:
            source = Path(args.source)
    if isinstance(source, Path):
        if not source.is_file():
            raise ConfigError(f"source file not found: {source}")
        source = read_source_csv(source, mesh.n_vertices)
    problem = PoissonProblem.from_markers(
        mesh, kappa=kappa, source=source, dirichlet=dirichlet, neumann=neumann
    )
    problem.validate(mesh)
    return problem


def _solver_params(args):
    if args.tol <= 0:
        raise ConfigError("--tol must be positive")
    if args.max_iter is not None and args.max_iter < 1:
        raise ConfigError("--max-iter must be >= 1")
    return {"tol": args.tol, "max_iter": args.max_iter, "jacobi": args.jacobi,
            "solver": args.solver}


def _out_dir(path):
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_gen_disk(args):
    if args.rings < 1:
        raise ConfigError("--rings must be >= 1")
    mesh = gen_disk_mesh(args.rings)
    node, ele = write_mesh(mesh, args.out)
    print(f"wrote {node} and {ele}: {mesh.n_vertices} nodes, {mesh.n_triangles} elements")
    return 0


def cmd_solve(args):
    mesh = _load_mesh(args)
    problem = _problem(args, mesh)
    params = _solver_params(args)
    out = _out_dir(args.out_dir)
    methods = ("dec", "fem") if args.method == "both" else (args.method,)
    for note in mesh.notes:
        print(f"note: {note}", file=sys.stderr)
    for method in methods:
        report = make_solver(method, **params).fit(mesh, problem).report_
        write_field_csv(out / f"solution_{method}.csv", mesh, report.solution,
                        report.flux_magnitude_per_vertex)
        write_field_vtk(out / f"solution_{method}.vtk", mesh, report.solution,
                        report.flux_magnitude_per_vertex, report.flux_per_triangle)
        summary = {
            "method": method, "nodes": mesh.n_vertices, "elements": mesh.n_triangles,
            "max_u": report.max_solution, "min_u": report.min_solution,
            "max_flux": report.max_flux_magnitude, "iterations": report.iterations,
            "residual": report.residual, "wall_time": report.wall_time,
        }
        (out / f"report_{method}.json").write_text(json.dumps(summary, indent=2) + "\n")
        print(report.summary())
    return 0


def cmd_compare(args):
    if not args.rings:
        raise ConfigError("--rings must list at least one refinement level")
    rows = compare_table(args.rings)
    out = _out_dir(args.out_dir)
    write_table_csv(out / "compare.csv", rows, COMPARE_COLUMNS)
    text = format_table(rows, COMPARE_COLUMNS)
    (out / "compare.txt").write_text(text + "\n")
    print(text)
    return 0


def cmd_dual(args):
    mesh = _load_mesh(args)
    metrics = dual_metrics(mesh)
    out = _out_dir(args.out_dir)
    write_dual_vtk(out / "dual.vtk", mesh, metrics)
    write_dual_csv(out / "dual_edges.csv", out / "dual_vertices.csv", mesh, metrics)
    obtuse = well_centered_report(mesh, metrics)
    print(f"dual vertices={mesh.n_triangles} dual edges={mesh.n_edges} "
          f"dual cells={mesh.n_vertices} non-well-centered triangles={len(obtuse)}")
    return 0


def cmd_convergence(args):
    if not args.rings:
        raise ConfigError("--rings must list at least one refinement level")
    methods = ("dec", "fem") if args.method == "both" else (args.method,)
    rows = convergence_table(args.rings, methods)
    write_table_csv(args.out, rows, CONVERGENCE_COLUMNS)
    print(format_table(rows, CONVERGENCE_COLUMNS))
    return 0


def cmd_sample(args):
    if args.n < 2:
        raise ConfigError("-n must be >= 2")
    mesh = _load_mesh(args)
    problem = _problem(args, mesh)
    solver = make_solver(args.method, **_solver_params(args)).fit(mesh, problem)
    samples = sample_line(mesh, solver.solution_, args.p0, args.p1, args.n)
    flux = sample_line(mesh, solver.report_.flux_magnitude_per_vertex, args.p0, args.p1, args.n)
    with open(args.out, "w", newline="") as fh:
        fh.write("t,x,y,u,flux_mag\n")
        for (t, x, y, u), f in zip(samples, flux[:, 3]):
            fh.write(f"{t:.17g},{x:.17g},{y:.17g},{u:.17g},{f:.17g}\n")
    print(f"wrote {args.n} samples to {args.out}; max u={max(samples[:, 3]):.6g}")
    return 0


COMMANDS = {
    "gen-disk": cmd_gen_disk,
    "solve": cmd_solve,
    "compare": cmd_compare,
    "dual": cmd_dual,
    "convergence": cmd_convergence,
    "sample": cmd_sample,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        with threadpool_limits(limits=_threads()):
            return COMMANDS[args.command](args)
    except (ConfigError, ProblemError, FileNotFoundError) as exc:
        print(f"dec2d: error: {exc}", file=sys.stderr)
        return 2
    except (Dec2dError, ValueError, OSError) as exc:
        print(f"dec2d: {args.command} failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
