import pytest

from conftest import C3, K4, naive_count
from sinkfree.graph import (Graph, GraphError, GraphFormatError, Orientation, check_orientation,
                            components, degree, is_sink, min_degree, omega_empty, parse_graph,
                            path_graph, require_min_degree, MinDegreeError, serialize_graph)
from sinkfree.harness.generators import multigraphs


def test_parse_triangle():
    G = parse_graph("p 3 3\ne 0 1\ne 1 2\ne 2 0")
    assert G.n == 3 and G.m == 3
    assert G.edges == ((0, 1), (1, 2), (2, 0))


def test_parse_k4_matches_family():
    G = parse_graph("p 4 6\ne 0 1\ne 0 2\ne 0 3\ne 1 2\ne 1 3\ne 2 3")
    assert G == K4


def test_parse_bytes_and_comments():
    G = parse_graph(b"# a comment\n\np 2 2\n# another\ne 0 1\ne 1 0\n")
    assert G.edges == ((0, 1), (1, 0))


@pytest.mark.parametrize("text, line, word", [
    ("p 2 1\ne 0 0", 2, "self-loop"),
    ("p 2 1\ne 0 2", 2, "out of range"),
    ("p 2 1\ne 0 x", 2, "non-integer"),
    ("e 0 1\np 2 1", 1, "before header"),
    ("p 2 1\nq 0 1", 2, "unknown record"),
    ("p 3 2\ne 0 1\ne 1 2\ne 0 2", 4, "more than"),
])
def test_parse_errors_name_the_line(text, line, word):
    with pytest.raises(GraphFormatError) as info:
        parse_graph(text)
    assert f"line {line}" in str(info.value)
    assert word in str(info.value)


def test_parse_missing_edges():
    with pytest.raises(GraphFormatError, match="declares 3 edges"):
        parse_graph("p 3 3\ne 0 1")


def test_from_edges_rejects_loops():
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(1, 1)])


def test_round_trip_canonical():
    text = "# comment\np 4 5\n\ne 0 1\ne 1 2\ne 2 3\ne 3 0\ne 0 2\n"
    G = parse_graph(text)
    canon = serialize_graph(G)
    assert canon == "p 4 5\ne 0 1\ne 1 2\ne 2 3\ne 3 0\ne 0 2\n"
    assert serialize_graph(parse_graph(canon)) == canon


def test_adjacency_follows_edge_order():
    G = Graph.from_edges(3, [(1, 2), (0, 1), (1, 0), (2, 0)])
    assert G.adj[1] == ((0, 2), (1, 0), (2, 0))
    assert G.adj[0] == ((1, 1), (2, 1), (3, 2))


def test_degree_examples():
    assert all(degree(K4, u) == 3 for u in range(4))
    assert all(degree(C3, u) == 2 for u in range(3))
    G = Graph.from_edges(3, [(0, 1), (0, 1), (0, 2)])
    assert degree(G, 0) == 3
    with pytest.raises(GraphError):
        degree(G, 3)


def test_min_degree_examples():
    assert min_degree(K4) == 3
    assert min_degree(C3) == 2
    assert min_degree(Graph.from_edges(1, [])) == 0
    with pytest.raises(GraphError):
        min_degree(Graph.from_edges(0, []))


def test_require_min_degree():
    require_min_degree(K4, 3)
    with pytest.raises(MinDegreeError):
        require_min_degree(C3, 3)


def test_is_sink_examples():
    cyclic = Orientation((1, 2, 0))
    assert not any(is_sink(C3, cyclic, u) for u in range(3))
    # edges 0, 1, 2 of K4 are the three edges at vertex 0
    into0 = Orientation((0, 0, 0, 2, 3, 3))
    assert is_sink(K4, into0, 0)
    lonely = Graph.from_edges(2, [])
    assert is_sink(lonely, Orientation(()), 1)


def test_is_sink_needs_oriented_edges():
    with pytest.raises(GraphError):
        is_sink(C3, Orientation((1, None, 0)), 1)


def test_orientation_code_round_trip():
    for code in range(1 << K4.m):
        sigma = Orientation.from_code(K4, code)
        check_orientation(K4, sigma)
        assert sigma.code(K4) == code


def test_check_orientation_rejects_foreign_head():
    with pytest.raises(GraphError):
        check_orientation(C3, Orientation((2, 2, 0)))


def test_omega_empty_examples():
    assert omega_empty(path_graph(3), range(3))
    assert not omega_empty(C3, range(3))
    assert not omega_empty(K4, range(4))
    assert not omega_empty(path_graph(3), [0, 1])


def test_components():
    G = Graph.from_edges(5, [(0, 1), (3, 4)])
    assert sorted(sorted(c) for c in components(G)) == [[0, 1], [2], [3, 4]]


def test_omega_empty_matches_enumeration_small():
    # independent enumerator; the full m <= 8 sweep lives in the acceptance suite
    for n in (1, 2, 3):
        for G in multigraphs(n, 4):
            for mask in range(1 << n):
                S = [u for u in range(n) if mask >> u & 1]
                assert omega_empty(G, S) == (naive_count(G, S) == 0)
