import pytest

from gossip_flooding.common.errors import EdgeListParseError, EmptyGraphError, InvalidSizeError
from gossip_flooding.graphs import (Graph, from_edge_list, graph_from_family, is_connected, make_complete,
                                    make_erdos_renyi, make_path, make_ring, make_star, read_edge_list,
                                    render_edge_list)


def test_complete_graph_has_every_pair_in_order():
    g = make_complete(4)
    assert g.n == 4
    assert g.edges == ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
    assert g.edge_count == 6


def test_star_edges_all_touch_the_hub():
    g = make_star(3)
    assert g.n == 4
    assert g.edge_count == 3
    assert all(0 in edge for edge in g.edges)
    assert g.degree(0) == 3


@pytest.mark.parametrize("n", [3, 5, 8])
def test_ring_is_two_regular(n):
    g = make_ring(n)
    assert g.edge_count == n
    assert all(g.degree(x) == 2 for x in range(n))


def test_path_edges():
    assert make_path(3).edges == ((0, 1), (1, 2))


def test_edges_are_canonicalized():
    assert Graph(3, ((2, 1), (1, 0))) == Graph(3, ((0, 1), (1, 2)))


@pytest.mark.parametrize("n, edges, error", [
    (3, ((1, 1),), InvalidSizeError),
    (3, ((0, 1), (1, 0)), InvalidSizeError),
    (3, ((0, 3),), InvalidSizeError),
    (3, (), EmptyGraphError),
    (1, ((0, 1),), InvalidSizeError),
])
def test_invalid_graphs_are_rejected(n, edges, error):
    with pytest.raises(error):
        Graph(n, edges)


@pytest.mark.parametrize("factory, size", [(make_complete, 1), (make_star, 0), (make_ring, 2), (make_path, 1)])
def test_generators_reject_small_sizes(factory, size):
    with pytest.raises(InvalidSizeError):
        factory(size)


def test_erdos_renyi_is_deterministic_per_seed():
    assert make_erdos_renyi(20, 0.3, 9) == make_erdos_renyi(20, 0.3, 9)


@pytest.mark.parametrize("seed", [0, 1, 99])
def test_erdos_renyi_with_p_one_is_complete(seed):
    assert make_erdos_renyi(5, 1.0, seed) == make_complete(5)


def test_erdos_renyi_edge_count_is_near_its_mean():
    # mean C(50, 2) * 0.2 = 245, sd 14
    assert 100 <= make_erdos_renyi(50, 0.2, 1).edge_count <= 390


@pytest.mark.parametrize("p", [0.0, 1.5, -0.1])
def test_erdos_renyi_rejects_bad_probability(p):
    with pytest.raises(InvalidSizeError):
        make_erdos_renyi(10, p, 1)


def test_connectivity():
    assert is_connected(make_path(5))
    assert not is_connected(Graph(4, ((0, 1), (2, 3))))


def test_edge_list_round_trip():
    g = make_ring(6)
    assert from_edge_list(render_edge_list(g)) == g


def test_edge_list_header_comments_and_isolated_sites():
    g = from_edge_list("# two edges\nn 5\n\n0 1\n1 2\n")
    assert g.n == 5
    assert g.edges == ((0, 1), (1, 2))
    assert not is_connected(g)


def test_edge_list_without_header_uses_largest_label():
    assert from_edge_list("3 0\n").n == 4


@pytest.mark.parametrize("text, line", [
    ("0 1\n0 0\n", 2),
    ("0 1\n1 0\n", 2),
    ("0 1\n\n0 x\n", 3),
    ("0 1 2\n", 1),
    ("n 2\n0 3\n", 1),
    ("0 1\n1 \u00b2\n", 2),
    ("n \u00b3\n0 1\n", 1),
])
def test_edge_list_errors_name_the_line(text, line):
    with pytest.raises(EdgeListParseError) as info:
        from_edge_list(text)
    assert info.value.line_number == line
    assert str(info.value).startswith(f"line {line}:")


def test_edge_list_file_that_is_not_utf8_names_the_line(tmp_path):
    path = tmp_path / "bad.edges"
    path.write_bytes(b"0 1\n1 \xff2\n")
    with pytest.raises(EdgeListParseError) as info:
        read_edge_list(path)
    assert info.value.line_number == 2


def test_read_edge_list_names_graph_after_file(tmp_path):
    path = tmp_path / "tri.edges"
    path.write_text("0 1\n1 2\n0 2\n")
    g = read_edge_list(path)
    assert g == make_complete(3)
    assert g.name == "tri"


def test_connectivity_is_computed_once_per_graph():
    g = make_ring(6)
    assert is_connected(g)
    assert "connected" in vars(g)
    assert is_connected(g) is g.connected
    assert not Graph(4, ((0, 1), (2, 3))).connected


def test_edge_list_without_edges():
    with pytest.raises(EmptyGraphError):
        from_edge_list("# nothing\nn 3\n")


def test_graph_from_family():
    assert graph_from_family("star", leaves=2) == make_star(2)
    with pytest.raises(InvalidSizeError):
        graph_from_family("complete")
    with pytest.raises(InvalidSizeError):
        graph_from_family("hypercube", n=4)
