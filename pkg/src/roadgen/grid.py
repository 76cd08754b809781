"""Grid validation, network-graph derivation and the JSON interchange format.

A grid is a 2-D integer numpy array of tile codes, row-major, shape
``(height, width)``. Functions here accept anything array-like and validate
it with :func:`check_grid`, in the spirit of ``sklearn.utils.check_array``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .tiles import N_CODES

Cell = tuple[int, int]


class GridFormatError(ValueError):
    """Raised for malformed grid documents or arrays."""


def check_grid(cells, *, copy: bool = False) -> np.ndarray:
    """Validate ``cells`` and return it as a 2-D ``int64`` array.

    Raises :class:`GridFormatError` if the array is not 2-D, is empty, or
    contains a code outside ``[0, 15]`` (the message names the flat index).
    """
    try:
        arr = np.array(cells) if copy else np.asarray(cells)
    except (TypeError, ValueError) as exc:
        raise GridFormatError(f"grid is not a numeric array: {exc}") from None
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise GridFormatError(f"grid must be a non-empty 2-D array, got shape {arr.shape}")
    if arr.dtype.kind not in "iu":
        if arr.dtype.kind == "f" and np.all(np.isfinite(arr)) and np.all(arr == np.round(arr)):
            arr = arr.astype(np.int64)
        else:
            raise GridFormatError(f"grid cells must be integers, got dtype {arr.dtype}")
    bad = np.flatnonzero((arr < 0) | (arr >= N_CODES))
    if bad.size:
        i = int(bad[0])
        raise GridFormatError(
            f"cell {i} (row {i // arr.shape[1]}, col {i % arr.shape[1]}) has code "
            f"{int(arr.flat[i])}, expected 0..15")
    return arr.astype(np.int64, copy=False)


def empty_grid(height: int, width: int) -> np.ndarray:
    return np.zeros((height, width), dtype=np.int64)


def reciprocal_edges(cells: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Boolean edge maps ``(horizontal, vertical)``.

    ``horizontal[r, c]`` joins ``(r, c)`` and ``(r, c+1)``; ``vertical[r, c]``
    joins ``(r, c)`` and ``(r+1, c)``. An edge needs both facing bits set.
    """
    g = cells
    horizontal = ((g[:, :-1] & 4) > 0) & ((g[:, 1:] & 1) > 0)
    vertical = ((g[:-1, :] & 2) > 0) & ((g[1:, :] & 8) > 0)
    return horizontal, vertical


@dataclass(frozen=True)
class NetworkGraph:
    """Road graph over non-empty cells; edges are reciprocated connections."""

    nodes: frozenset[Cell]
    edges: frozenset[frozenset[Cell]]

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> dict[Cell, list[Cell]]:
        adj: dict[Cell, list[Cell]] = {v: [] for v in sorted(self.nodes)}
        for e in self.edges:
            a, b = sorted(e)
            adj[a].append(b)
            adj[b].append(a)
        for v in adj:
            adj[v].sort()
        return adj

    def to_networkx(self):
        import networkx as nx

        graph = nx.Graph()
        graph.add_nodes_from(self.nodes)
        graph.add_edges_from(tuple(e) for e in self.edges)
        return graph


def build_graph(cells) -> NetworkGraph:
    g = check_grid(cells)
    horizontal, vertical = reciprocal_edges(g)
    nodes = frozenset((int(r), int(c)) for r, c in zip(*np.nonzero(g)))
    edges = set()
    for r, c in zip(*np.nonzero(horizontal)):
        edges.add(frozenset({(int(r), int(c)), (int(r), int(c) + 1)}))
    for r, c in zip(*np.nonzero(vertical)):
        edges.add(frozenset({(int(r), int(c)), (int(r) + 1, int(c))}))
    return NetworkGraph(nodes=nodes, edges=frozenset(edges))


def mismatch_count(cells) -> int:
    """Interior borders where exactly one side declares a connection."""
    g = check_grid(cells)
    horizontal = ((g[:, :-1] & 4) > 0) ^ ((g[:, 1:] & 1) > 0)
    vertical = ((g[:-1, :] & 2) > 0) ^ ((g[1:, :] & 8) > 0)
    return int(horizontal.sum() + vertical.sum())


def to_dict(cells) -> dict:
    g = check_grid(cells)
    return {"height": int(g.shape[0]), "width": int(g.shape[1]),
            "cells": [int(v) for v in g.ravel()]}


def from_dict(doc) -> np.ndarray:
    if not isinstance(doc, dict):
        raise GridFormatError("grid document must be a JSON object")
    missing = [k for k in ("height", "width", "cells") if k not in doc]
    if missing:
        raise GridFormatError(f"grid document missing keys: {missing}")
    height, width, cells = doc["height"], doc["width"], doc["cells"]
    for name, v in (("height", height), ("width", width)):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise GridFormatError(f"{name} must be a positive integer, got {v!r}")
    if not isinstance(cells, list):
        raise GridFormatError("cells must be a list of integers")
    if len(cells) != height * width:
        raise GridFormatError(
            f"expected {height}x{width} = {height * width} cells, got {len(cells)}")
    for i, v in enumerate(cells):
        if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < N_CODES:
            raise GridFormatError(f"cell {i} has invalid code {v!r}, expected integer 0..15")
    return np.array(cells, dtype=np.int64).reshape(height, width)


def serialize(cells) -> str:
    return json.dumps(to_dict(cells))


def deserialize(text: str) -> np.ndarray:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GridFormatError(f"malformed grid document: {exc}") from None
    return from_dict(doc)


def load_grid(path) -> np.ndarray:
    """Read a grid file; accepts a bare grid document or one nested under ``"grid"``."""
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GridFormatError(f"{path}: malformed grid document: {exc}") from None
    if isinstance(doc, dict) and "grid" in doc and "cells" not in doc:
        doc = doc["grid"]
    return from_dict(doc)


def save_grid(cells, path) -> None:
    with open(path, "w") as fh:
        json.dump(to_dict(cells), fh)
        fh.write("\n")
