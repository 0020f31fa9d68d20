import json

import numpy as np
import pytest

from padicrd.network import (
    Graph,
    GraphFormatError,
    complete_graph,
    cycle_graph,
    embed,
    load_graph,
    minimal_level,
    path_graph,
    refine,
)


def test_edge_list_path_graph(tmp_path):
    f = tmp_path / "p3.txt"
    f.write_text("# a comment\n0 1\n1 2\n")
    g = load_graph(f)
    assert g.n == 3
    assert g.degrees.tolist() == [1, 2, 1]
    assert g.is_symmetric and g.has_zero_diagonal


def test_json_document_k4(tmp_path):
    doc = {"n": 4, "edges": [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]],
           "labels": ["a", "b", "c", "d"], "p": 2, "N": 2}
    f = tmp_path / "k4.json"
    f.write_text(json.dumps(doc))
    g = load_graph(f)
    assert (g.adjacency == complete_graph(4).adjacency).all()
    assert g.degrees.tolist() == [3, 3, 3, 3]
    assert g.labels == ("a", "b", "c", "d")
    assert g.p_hint == 2 and g.N_hint == 2


def test_malformed_inputs(tmp_path):
    with pytest.raises(GraphFormatError):
        Graph(np.ones((2, 3)))  # not square
    with pytest.raises(GraphFormatError):
        Graph(np.array([[0, 2], [2, 0]]))  # non-binary
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1 2\n")
    with pytest.raises(GraphFormatError):
        load_graph(bad)
    empty = tmp_path / "empty.txt"
    empty.write_text("# nothing\n")
    with pytest.raises(GraphFormatError):
        load_graph(empty)
    with pytest.raises(GraphFormatError):
        load_graph({"n": 2, "edges": [[0, 5]]})


def test_strict_mode_rejects_self_loops():
    g = Graph(np.array([[1, 0], [0, 0]]))
    assert not g.has_zero_diagonal
    with pytest.raises(GraphFormatError):
        load_graph(g, strict=True)


def test_embed_defaults_k4():
    e = embed(complete_graph(4))
    assert (e.p, e.N) == (2, 2)
    assert [c.digits for c in e.codes] == [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert e.gamma_max == 3


def test_embed_p3_with_prime_3():
    e = embed(path_graph(3), p=3)
    assert e.N == 1
    assert [c.digits for c in e.codes] == [(0,), (1,), (2,)]


def test_embed_minimal_level_bound():
    assert minimal_level(5, 2) == 3
    e = embed(complete_graph(5))
    assert e.N == 3


def test_embed_rejects_bad_parameters():
    with pytest.raises(ValueError):
        embed(complete_graph(4), p=6)
    with pytest.raises(ValueError):
        embed(complete_graph(5), p=2, N=2)  # 2**2 < 5


def test_embed_is_deterministic():
    a = embed(complete_graph(4))
    b = embed(complete_graph(4))
    assert a.codes == b.codes


def test_degree_sum_is_twice_edges():
    for g in (complete_graph(4), path_graph(5), cycle_graph(6)):
        assert g.degrees.sum() == 2 * g.edge_count()


def test_refine_sites_and_restriction():
    e = embed(complete_graph(4))
    assert refine(e, 2).codes == e.codes  # M = N is the identity refinement
    grid = refine(e, 3)
    assert grid.dim == 8
    assert grid.sites() == [(v, c) for v in range(4) for c in range(2)]
    # offset-0 sites extend the vertex codes
    for v in range(4):
        code = grid.codes[grid.site_index(v, 0)]
        assert code.digits[:2] == e.codes[v].digits
    e3 = embed(path_graph(3), p=3)
    assert refine(e3, 2).dim == 9
    with pytest.raises(ValueError):
        refine(e, 1)
