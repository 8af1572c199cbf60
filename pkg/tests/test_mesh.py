import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dec2d.exceptions import DegenerateGeometryError, MeshError, MeshFormatError
from dec2d.mesh import TriangleMesh, gen_disk_mesh, load_mesh, save_mesh, signed_area

import meshes


def shoelace(points):
    x, y = np.asarray(points, dtype=float).T
    return 0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


class TestSignedArea:
    def test_unit_right(self, unit_right):
        assert signed_area([0, 1, 2], unit_right) == 0.5

    def test_flip_negates(self, unit_right):
        assert signed_area([0, 2, 1], unit_right) == -0.5

    def test_equilateral_side_two(self):
        m = meshes.single_triangle((0, 0), (2, 0), (1, np.sqrt(3)))
        expected = shoelace([(0, 0), (2, 0), (1, np.sqrt(3))])
        assert signed_area([0, 1, 2], m) == pytest.approx(expected, rel=1e-15)
        assert expected == pytest.approx(1.7320508, abs=1e-7)


class TestLoad:
    def test_single_triangle(self):
        m = load_mesh("3 2 0 0\n0 0 0\n1 1 0\n2 0 1\n", "1 3 0\n0 0 1 2\n")
        assert m.n_edges == 3
        assert sorted(m.boundary_edges.tolist()) == [0, 1, 2]
        assert m.edges.tolist() == [[0, 1], [0, 2], [1, 2]]

    def test_clockwise_input_is_reoriented(self):
        m = load_mesh("3 2 0 0\n0 0 0\n1 1 0\n2 0 1\n", "1 3 0\n0 0 2 1\n")
        assert m.triangles.tolist() == [[0, 1, 2]]
        assert m.reoriented.tolist() == [0]
        assert "reoriented" in m.notes[0]

    def test_hexagon_counts(self, hexagon):
        assert (hexagon.n_vertices, hexagon.n_triangles, hexagon.n_edges) == (7, 6, 12)
        assert len(hexagon.boundary_edges) == 6
        assert hexagon.boundary_vertices.tolist() == [0, 1, 2, 3, 4, 5]

    def test_one_based_files(self):
        node = "# one based\n3 2 0 1\n1 0.0 0.0 1\n2 1.0 0.0 1\n3 0.0 1.0 1\n"
        ele = "1 3 0\n1 1 2 3\n"
        m = load_mesh(node, ele)
        assert m.triangles.tolist() == [[0, 1, 2]]
        assert m.markers.tolist() == [1, 1, 1]

    def test_parse_error_reports_position(self):
        with pytest.raises(MeshFormatError) as info:
            load_mesh("3 2 0 0\n0 0 0\n1 1 x\n2 0 1\n", "1 3 0\n0 0 1 2\n")
        assert info.value.line == 3
        assert info.value.column == 5

    def test_index_out_of_range(self):
        with pytest.raises(MeshError, match="valid range"):
            load_mesh("3 2 0 0\n0 0 0\n1 1 0\n2 0 1\n", "1 3 0\n0 0 1 3\n")

    def test_zero_area(self):
        with pytest.raises(DegenerateGeometryError):
            load_mesh("3 2 0 0\n0 0 0\n1 1 0\n2 2 0\n", "1 3 0\n0 0 1 2\n")

    def test_non_manifold_edge(self):
        verts = [(0, 0), (1, 0), (0.5, 1), (0.5, -1), (1.5, 0.5)]
        tris = [[0, 1, 2], [0, 3, 1], [0, 1, 4]]
        with pytest.raises(MeshError, match="non-manifold|same direction"):
            TriangleMesh.from_arrays(verts, tris)

    def test_multiple_components(self):
        verts = [(0, 0), (1, 0), (0, 1), (5, 5), (6, 5), (5, 6)]
        with pytest.raises(MeshError, match="components"):
            TriangleMesh.from_arrays(verts, [[0, 1, 2], [3, 4, 5]])

    def test_vertex_sharing_only_is_disconnected(self):
        verts = [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)]
        with pytest.raises(MeshError, match="components"):
            TriangleMesh.from_arrays(verts, [[0, 1, 2], [0, 3, 4]])

    def test_isolated_vertex(self):
        with pytest.raises(MeshError, match="not used"):
            TriangleMesh.from_arrays([(0, 0), (1, 0), (0, 1), (3, 3)], [[0, 1, 2]])

    def test_arrays_are_read_only(self, hexagon):
        with pytest.raises(ValueError):
            hexagon.vertices[0, 0] = 5.0


class TestDisk:
    @pytest.mark.parametrize("rings, nodes, elements", [(1, 9, 8), (2, 25, 32), (4, 81, 128)])
    def test_counts(self, rings, nodes, elements):
        m = gen_disk_mesh(rings)
        assert (m.n_vertices, m.n_triangles) == (nodes, elements)

    @pytest.mark.parametrize("rings", [1, 2, 3, 5, 8])
    def test_positive_orientation(self, rings):
        m = gen_disk_mesh(rings)
        assert (m.signed_areas > 0).all()
        assert len(m.reoriented) == 0

    def test_outer_marker(self):
        m = gen_disk_mesh(3)
        outer = m.vertices_with_marker(1)
        assert len(outer) == 24
        assert np.allclose(np.hypot(*m.vertices[outer].T), 1.0)
        assert set(outer.tolist()) == set(m.boundary_vertices.tolist())

    def test_rejects_zero_rings(self):
        with pytest.raises(ValueError):
            gen_disk_mesh(0)


def _disk_like(rng):
    return [gen_disk_mesh(r) for r in (1, 2, 5)] + [
        meshes.perturbed_disk(3, rng), meshes.random_delaunay_disk(rng), meshes.hexagon_mesh(),
        meshes.square_grid(4),
    ]


def test_invariants_on_disk_like_meshes(rng):
    for m in _disk_like(rng):
        assert m.euler_characteristic() == 1
        (loop,) = m.boundary_loops()
        outer_area = shoelace(m.vertices[loop])
        assert m.area == pytest.approx(outer_area, rel=1e-12)
        bedges = m.edges[m.boundary_edges]
        assert (np.bincount(bedges.ravel())[m.boundary_vertices] == 2).all()
        assert (m.edges[:, 0] < m.edges[:, 1]).all()
        assert np.array_equal(m.edges, np.unique(m.edges, axis=0))


def test_holed_disk_has_two_loops():
    m = meshes.holed_disk(n_theta=16, n_layers=3)
    assert m.euler_characteristic() == 0
    assert len(m.boundary_loops()) == 2


def test_edge_sign_matches_traversal(rng):
    m = meshes.random_delaunay_disk(rng)
    for t, tri in enumerate(m.triangles):
        for k in range(3):
            tail, head = tri[(k + 1) % 3], tri[(k + 2) % 3]
            i, j = m.edges[m.edge_of_triangle[t, k]]
            assert {tail, head} == {i, j}
            assert m.edge_sign[t, k] == (1 if tail == i else -1)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_save_load_round_trip(rings, seed):
    m = meshes.perturbed_disk(rings, np.random.default_rng(seed))
    node, ele = save_mesh(m)
    back = load_mesh(node, ele)
    assert np.array_equal(back.vertices, m.vertices)
    assert np.array_equal(back.triangles, m.triangles)
    assert np.array_equal(back.markers, m.markers)
    assert save_mesh(back) == (node, ele)
