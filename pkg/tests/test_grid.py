import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from roadgen.grid import (
    GridFormatError, build_graph, check_grid, deserialize, from_dict, load_grid,
    mismatch_count, reciprocal_edges, save_grid, serialize, to_dict,
)

grids = st.tuples(st.integers(1, 7), st.integers(1, 7)).flatmap(
    lambda shape: arrays(np.int64, shape, elements=st.integers(0, 15)))


def test_ring_graph(ring):
    g = build_graph(ring)
    assert (g.n_nodes, g.n_edges) == (4, 4)


@pytest.mark.parametrize("cells,n,e", [([[10]], 1, 0), (np.zeros((3, 3), int), 0, 0)])
def test_small_graphs(cells, n, e):
    g = build_graph(cells)
    assert (g.n_nodes, g.n_edges) == (n, e)


@pytest.mark.parametrize("cells,m", [([[6, 3], [12, 9]], 0), ([[4, 0]], 1),
                                     (np.zeros((4, 4), int), 0)])
def test_mismatch_examples(cells, m):
    assert mismatch_count(cells) == m


def test_adjacency_and_networkx(ring):
    g = build_graph(ring)
    adj = g.adjacency()
    assert adj[(0, 0)] == [(0, 1), (1, 0)]
    nxg = g.to_networkx()
    assert nxg.number_of_nodes() == 4 and nxg.number_of_edges() == 4


@settings(max_examples=200, deadline=None)
@given(grids)
def test_graph_matches_oracle(g):
    ng = build_graph(g)
    assert set(ng.edges) == oracles.edges(g)
    assert set(ng.nodes) == oracles.nodes(g)
    h, w = g.shape
    assert ng.n_edges <= 2 * h * w - h - w
    assert mismatch_count(g) == oracles.mismatches(g)


@settings(max_examples=200, deadline=None)
@given(grids)
def test_no_mismatch_means_every_inward_bit_is_an_edge(g):
    if mismatch_count(g):
        return
    horizontal, vertical = reciprocal_edges(g)
    assert np.array_equal(horizontal, (g[:, :-1] & 4) > 0)
    assert np.array_equal(vertical, (g[:-1, :] & 2) > 0)


@settings(max_examples=200, deadline=None)
@given(grids)
def test_serialize_round_trip(g):
    assert np.array_equal(deserialize(serialize(g)), g)


def test_serialized_layout_is_row_major():
    doc = json.loads(serialize([[1, 2, 3], [4, 5, 6]]))
    assert doc == {"height": 2, "width": 3, "cells": [1, 2, 3, 4, 5, 6]}


def test_bad_code_names_cell():
    with pytest.raises(GridFormatError, match="cell 2"):
        deserialize(json.dumps({"height": 2, "width": 2, "cells": [0, 1, 16, 0]}))


def test_wrong_cell_count():
    with pytest.raises(GridFormatError, match="4 cells, got 3"):
        from_dict({"height": 2, "width": 2, "cells": [0, 1, 2]})


@pytest.mark.parametrize("doc", [
    "not json",
    json.dumps([1, 2]),
    json.dumps({"height": 1, "cells": [0]}),
    json.dumps({"height": 0, "width": 1, "cells": []}),
    json.dumps({"height": 1, "width": 1, "cells": [True]}),
    json.dumps({"height": 1, "width": 1, "cells": "0"}),
])
def test_malformed_documents(doc):
    with pytest.raises(GridFormatError):
        deserialize(doc)


def test_check_grid_errors():
    with pytest.raises(GridFormatError, match="row 1, col 0"):
        check_grid([[0, 1], [-1, 0]])
    with pytest.raises(GridFormatError):
        check_grid([1, 2, 3])
    with pytest.raises(GridFormatError):
        check_grid([[0.5]])
    assert check_grid([[1.0, 2.0]]).dtype == np.int64


def test_file_round_trip(tmp_path, ring):
    p = tmp_path / "g.json"
    save_grid(ring, p)
    assert np.array_equal(load_grid(p), ring)
    nested = tmp_path / "nested.json"
    nested.write_text(json.dumps({"grid": to_dict(ring), "metrics": {}}))
    assert np.array_equal(load_grid(nested), ring)
