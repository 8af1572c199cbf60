import json
import subprocess
import sys

import numpy as np
import pytest

from dec2d.cli import main
from dec2d.mesh import read_mesh, write_mesh

import meshes


def run(args, capsys):
    code = main([str(a) for a in args])
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_disk(tmp_path, capsys):
    code, out, _ = run(["gen-disk", "--rings", 2, "--out", tmp_path / "disk"], capsys)
    assert code == 0 and "25 nodes, 32 elements" in out
    assert read_mesh(tmp_path / "disk").n_triangles == 32


def test_solve_both_methods(tmp_path, capsys):
    code, out, _ = run(["solve", "--gen-disk", 4, "--kappa", 1, "--source", -1,
                        "--dirichlet", "outer:10", "--method", "both", "--tol", 1e-12,
                        "--out-dir", tmp_path], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 2
    for line, method in zip(lines, ("dec", "fem")):
        assert line.startswith(f"method={method}")
        max_u = float(line.split("max_u=")[1].split()[0])
        assert max_u == pytest.approx(10.250, abs=5e-3)
    report = json.loads((tmp_path / "report_dec.json").read_text())
    assert report["nodes"] == 81 and report["max_u"] == pytest.approx(10.25)
    for name in ("solution_dec.csv", "solution_fem.vtk"):
        assert (tmp_path / name).stat().st_size > 0


def test_solve_hole_with_neumann_config(tmp_path, capsys):
    write_mesh(meshes.holed_disk(32, 6), tmp_path / "hole")
    cfg = tmp_path / "problem.cfg"
    cfg.write_text("kappa = 80.2\nsource = 20.2\ndirichlet = outer:10\nneumann = inner:100\n")
    code, out, _ = run(["solve", "--mesh", tmp_path / "hole.node", "--config", cfg,
                        "--method", "both", "--out-dir", tmp_path], capsys)
    assert code == 0
    u = np.loadtxt(tmp_path / "solution_dec.csv", delimiter=",", skiprows=1)[:, 3]
    assert np.isfinite(u).all() and u.max() > 10.0


def test_missing_ele_names_path(tmp_path, capsys):
    (tmp_path / "m.node").write_text("3 2 0 0\n0 0 0\n1 1 0\n2 0 1\n")
    code, _, err = run(["solve", "--mesh", tmp_path / "m", "--dirichlet", "1:0"], capsys)
    assert code == 2
    assert str(tmp_path / "m.ele") in err


def test_config_errors_exit_2(tmp_path, capsys):
    assert run(["solve", "--gen-disk", 2, "--dirichlet", "7:1"], capsys)[0] == 2
    assert run(["solve", "--gen-disk", 2], capsys)[0] == 2          # no Dirichlet data
    assert run(["compare", "--rings", "", "--out-dir", tmp_path], capsys)[0] == 2
    assert run(["solve", "--gen-disk", 2, "--dirichlet", "outer:1", "--tol", 0], capsys)[0] == 2


def test_pipeline_error_exit_1(tmp_path, capsys):
    (tmp_path / "bad.node").write_text("3 2 0 0\n0 0 0\n1 1 0\n2 2 0\n")
    (tmp_path / "bad.ele").write_text("1 3 0\n0 0 1 2\n")
    code, _, err = run(["dual", "--mesh", tmp_path / "bad"], capsys)
    assert code == 1 and "failed" in err
    code, _, _ = run(["solve", "--gen-disk", 3, "--dirichlet", "outer:1", "--source", -1,
                      "--max-iter", 1], capsys)
    assert code == 1


def test_compare(tmp_path, capsys):
    code, out, _ = run(["compare", "--rings", "1,2,4,8", "--out-dir", tmp_path], capsys)
    assert code == 0
    data = np.genfromtxt(tmp_path / "compare.csv", delimiter=",", names=True)
    assert data["nodes"].tolist() == [9, 25, 81, 289]
    for col in ("dec_max_flux", "fem_max_flux"):
        assert (np.diff(data[col]) > 0).all() and (data[col] < 0.5).all()
    # methods agree to three decimals on the finest level
    assert abs(data["dec_max_u"][-1] - data["fem_max_u"][-1]) < 1e-3
    assert abs(data["dec_max_flux"][-1] - data["fem_max_flux"][-1]) < 1e-3
    assert "dec_max_u" in (tmp_path / "compare.txt").read_text()


def test_dual_hexagon(tmp_path, capsys):
    write_mesh(meshes.hexagon_mesh(), tmp_path / "hex")
    code, out, _ = run(["dual", "--mesh", tmp_path / "hex", "--out-dir", tmp_path], capsys)
    assert code == 0
    assert "dual vertices=6 dual edges=12" in out
    assert len((tmp_path / "dual_edges.csv").read_text().splitlines()) == 1 + 12
    assert (tmp_path / "dual.vtk").exists()


def test_convergence_columns(tmp_path, capsys):
    out_csv = tmp_path / "conv.csv"
    code, _, _ = run(["convergence", "--rings", "2,4", "--method", "fem", "--out", out_csv], capsys)
    assert code == 0
    header, first, second = out_csv.read_text().splitlines()
    assert header == "method,rings,nodes,h,linf_error,l2_error,order"
    assert first.endswith(",nan") and float(second.split(",")[-1]) > 1.0


def test_sample_profile(tmp_path, capsys):
    out_csv = tmp_path / "s.csv"
    code, _, _ = run(["sample", "--gen-disk", 8, "--source", -1, "--dirichlet", "outer:10",
                      "--p0=-1,0", "--p1=1,0", "-n", 200, "--out", out_csv], capsys)
    assert code == 0
    s = np.loadtxt(out_csv, delimiter=",", skiprows=1)
    assert s.shape == (200, 5)
    assert s[:, 3].max() == pytest.approx(10.25, abs=1e-3)
    assert np.allclose(s[:, 3], 0.25 * (1 - s[:, 1] ** 2) + 10, atol=2e-3)


def test_byte_identical_outputs(tmp_path, capsys):
    for d in ("a", "b"):
        assert run(["solve", "--gen-disk", 5, "--source", -1, "--dirichlet", "outer:10",
                    "--method", "both", "--out-dir", tmp_path / d], capsys)[0] == 0
        assert run(["compare", "--rings", "1,3", "--out-dir", tmp_path / d], capsys)[0] == 0
    for name in ("solution_dec.csv", "solution_fem.csv", "solution_dec.vtk", "compare.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_threads_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("DEC2D_THREADS", "0")
    assert run(["gen-disk", "--rings", 1, "--out", tmp_path / "d"], capsys)[0] == 2
    monkeypatch.setenv("DEC2D_THREADS", "2")
    assert run(["gen-disk", "--rings", 1, "--out", tmp_path / "d"], capsys)[0] == 0


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "dec2d", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "dec2d" in proc.stdout
