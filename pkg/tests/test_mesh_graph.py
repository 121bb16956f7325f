import numpy as np
import pytest

from specmatch.errors import DegenerateFaceError, DisconnectedGraphError, MeshParseError
from specmatch.mesh_graph import (
    Graph,
    Mesh,
    build_graph,
    connected_components,
    load_mesh,
    save_mesh,
)

from conftest import tetrahedron_mesh

TETRA_OFF = """OFF
4 4 0
0 0 0
1 0 0
0.5 1 0
0.5 0.5 1
3 0 1 2
3 0 1 3
3 0 2 3
3 1 2 3
"""


def test_load_off_tetrahedron(tmp_path):
    path = tmp_path / "tetra.off"
    path.write_text(TETRA_OFF)
    mesh = load_mesh(str(path))
    assert mesh.n_vertices == 4
    assert mesh.n_faces == 4


def test_load_off_truncated_vertices(tmp_path):
    bad = TETRA_OFF.replace("4 4 0", "5 4 0")
    path = tmp_path / "bad.off"
    path.write_text(bad)
    with pytest.raises(MeshParseError):
        load_mesh(str(path))


def test_ply_cube_round_trip(tmp_path):
    # axis-aligned unit cube split into 12 triangles
    v = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)],
                 dtype=float)
    faces = np.array([
        [0, 1, 3], [0, 3, 2], [4, 6, 7], [4, 7, 5],
        [0, 4, 5], [0, 5, 1], [2, 3, 7], [2, 7, 6],
        [0, 2, 6], [0, 6, 4], [1, 5, 7], [1, 7, 3],
    ])
    mesh = Mesh(vertices=v, faces=faces)
    path = tmp_path / "cube.ply"
    save_mesh(mesh, str(path))
    loaded = load_mesh(str(path))
    assert loaded.n_vertices == 8
    assert loaded.n_faces == 12
    np.testing.assert_allclose(loaded.vertices, mesh.vertices)
    np.testing.assert_array_equal(loaded.faces, mesh.faces)


def test_off_round_trip(tmp_path, tetra):
    path = tmp_path / "t.off"
    save_mesh(tetra, str(path))
    loaded = load_mesh(str(path))
    np.testing.assert_allclose(loaded.vertices, tetra.vertices)
    np.testing.assert_array_equal(loaded.faces, tetra.faces)


def test_degenerate_face_rejected():
    with pytest.raises(DegenerateFaceError):
        Mesh(vertices=np.zeros((3, 3)), faces=np.array([[0, 1, 1]]))


def test_face_index_out_of_range():
    with pytest.raises(ValueError):
        Mesh(vertices=np.zeros((3, 3)), faces=np.array([[0, 1, 3]]))


def test_p3_degrees_and_volume(p3):
    np.testing.assert_allclose(p3.degrees, [1, 2, 1])
    assert p3.volume == pytest.approx(4.0)


def test_tetrahedron_uniform_is_k4(tetra):
    graph = build_graph(tetra, "uniform")
    assert graph.n == 4
    np.testing.assert_allclose(graph.degrees, [3, 3, 3, 3])
    assert graph.volume == pytest.approx(12.0)


def test_gaussian_weights_closed_form():
    # a single triangle with edge lengths 1, 2, sqrt(5)
    mesh = Mesh(
        vertices=np.array([[0.0, 0, 0], [1.0, 0, 0], [0.0, 2, 0]]),
        faces=np.array([[0, 1, 2]]),
    )
    graph = build_graph(mesh, "gaussian", sigma=1.0)
    A = graph.adjacency.toarray()
    assert A[0, 1] == pytest.approx(np.exp(-1.0))
    assert A[0, 2] == pytest.approx(np.exp(-4.0))
    assert A[1, 2] == pytest.approx(np.exp(-5.0))


def test_gaussian_weights_in_unit_interval(tetra):
    graph = build_graph(tetra, "gaussian")
    w = graph.adjacency.data
    assert np.all(w > 0.0)
    assert np.all(w <= 1.0)


def test_graph_invariants(tetra):
    graph = build_graph(tetra, "gaussian")
    A = graph.adjacency
    assert (A != A.T).nnz == 0
    assert not A.diagonal().any()
    np.testing.assert_allclose(
        graph.degrees, np.asarray(A.sum(axis=1)).ravel(), rtol=1e-12
    )
    assert graph.volume == pytest.approx(float(graph.degrees.sum()), rel=1e-12)


def test_build_graph_deterministic(tetra):
    g1 = build_graph(tetra, "gaussian")
    g2 = build_graph(tetra, "gaussian")
    assert np.array_equal(g1.adjacency.toarray(), g2.adjacency.toarray())


def test_disconnected_mesh_rejected():
    # two separate triangles
    v = np.vstack([np.eye(3), np.eye(3) + 10.0])
    faces = np.array([[0, 1, 2], [3, 4, 5]])
    with pytest.raises(DisconnectedGraphError) as exc:
        build_graph(Mesh(vertices=v, faces=faces), "uniform")
    assert exc.value.n_components == 2


def test_connected_components_k4(tetra):
    graph = build_graph(tetra, "uniform")
    comps = connected_components(graph)
    assert comps == [{0, 1, 2, 3}]


def test_connected_components_two_edges():
    adj = np.zeros((4, 4))
    adj[0, 1] = adj[1, 0] = 1.0
    adj[2, 3] = adj[3, 2] = 1.0
    comps = connected_components(Graph.from_adjacency(adj))
    assert sorted(map(sorted, comps)) == [[0, 1], [2, 3]]


def test_connected_components_empty_adjacency():
    comps = connected_components(Graph.from_adjacency(np.zeros((3, 3))))
    assert comps == [{0}, {1}, {2}]


def test_mean_edge_length():
    mesh = tetrahedron_mesh()
    lengths = mesh.edge_lengths()
    assert mesh.mean_edge_length() == pytest.approx(float(lengths.mean()))
    assert lengths.shape == (6,)
