"""Graph ingestion and the embedding of vertices into hierarchical ball addresses.

A graph with n vertices is assigned a prime p and a level N with
p**N >= n; vertex k receives the base-p code of the integer k.  The
union of the level-N balls at those codes is the compact domain on
which every operator in :mod:`padicrd.operators` acts, and refining the
balls to a level M >= N produces the grid indexing the level-M matrices.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .padic import PAdicCode, is_prime, refine_ball

__all__ = [
    "Graph",
    "NetworkEmbedding",
    "LevelGrid",
    "GraphFormatError",
    "load_graph",
    "embed",
    "refine",
    "complete_graph",
    "path_graph",
    "cycle_graph",
]


class GraphFormatError(ValueError):
    """Raised when a graph document is malformed."""


@dataclass(frozen=True)
class Graph:
    """Adjacency matrix with 0/1 entries, plus optional vertex labels.

    Asymmetric matrices and self-loops are accepted at construction
    (operator building tolerates them); spectral and Turing analyses
    insist on ``is_symmetric`` and ``has_zero_diagonal``.
    """

    adjacency: np.ndarray
    labels: tuple[str, ...] | None = None
    p_hint: int | None = field(default=None, compare=False)
    N_hint: int | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        adj = np.asarray(self.adjacency)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise GraphFormatError(f"adjacency must be square, got shape {adj.shape}")
        if adj.shape[0] < 1:
            raise GraphFormatError("graph needs at least one vertex")
        if not np.isin(adj, (0, 1)).all():
            raise GraphFormatError("adjacency entries must be 0 or 1")
        adj = adj.astype(np.int64)
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        if self.labels is not None:
            if len(self.labels) != adj.shape[0]:
                raise GraphFormatError("label count does not match vertex count")
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        """Row sums of the adjacency matrix (out-degrees if asymmetric)."""
        return self.adjacency.sum(axis=1)

    @property
    def is_symmetric(self) -> bool:
        return bool((self.adjacency == self.adjacency.T).all())

    @property
    def has_zero_diagonal(self) -> bool:
        return bool((np.diag(self.adjacency) == 0).all())

    def edge_count(self) -> int:
        if self.is_symmetric:
            return int(self.adjacency.sum()) // 2
        return int(self.adjacency.sum())

    def require_spectral(self) -> None:
        """Reject graphs outside the symmetric zero-diagonal regime."""
        if not self.is_symmetric:
            raise GraphFormatError("spectral analysis requires a symmetric adjacency matrix")
        if not self.has_zero_diagonal:
            raise GraphFormatError("spectral analysis requires a zero diagonal (no self-loops)")


def complete_graph(n: int) -> Graph:
    adj = np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64)
    return Graph(adj)


def path_graph(n: int) -> Graph:
    adj = np.zeros((n, n), dtype=np.int64)
    for i in range(n - 1):
        adj[i, i + 1] = adj[i + 1, i] = 1
    return Graph(adj)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    adj = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        adj[i, (i + 1) % n] = adj[(i + 1) % n, i] = 1
    return Graph(adj)


def _graph_from_edges(n: int, edges, labels=None) -> Graph:
    adj = np.zeros((n, n), dtype=np.int64)
    for e in edges:
        if len(e) != 2:
            raise GraphFormatError(f"edge {e!r} is not a pair")
        i, j = int(e[0]), int(e[1])
        if not (0 <= i < n and 0 <= j < n):
            raise GraphFormatError(f"edge ({i}, {j}) references a vertex outside 0..{n - 1}")
        adj[i, j] = 1
        adj[j, i] = 1
    return Graph(adj, labels=tuple(labels) if labels else None)


def _parse_edge_list(text: str) -> Graph:
    edges = []
    max_vertex = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'i j', got {raw!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: non-integer vertex in {raw!r}") from exc
        if i < 0 or j < 0:
            raise GraphFormatError(f"line {lineno}: vertices must be non-negative")
        edges.append((i, j))
        max_vertex = max(max_vertex, i, j)
    if max_vertex < 0:
        raise GraphFormatError("edge list is empty")
    return _graph_from_edges(max_vertex + 1, edges)


def _parse_document(doc: dict) -> Graph:
    if "n" not in doc:
        raise GraphFormatError("graph document is missing the vertex count 'n'")
    n = int(doc["n"])
    if "adjacency" in doc:
        g = Graph(np.asarray(doc["adjacency"]), labels=doc.get("labels"))
        if g.n != n:
            raise GraphFormatError(f"adjacency is {g.n}x{g.n} but n = {n}")
    else:
        g = _graph_from_edges(n, doc.get("edges", []), labels=doc.get("labels"))
    p_hint = int(doc["p"]) if "p" in doc else None
    N_hint = int(doc["N"]) if "N" in doc else None
    return Graph(g.adjacency, labels=g.labels, p_hint=p_hint, N_hint=N_hint)


def load_graph(source, strict: bool = False) -> Graph:
    """Load a graph from an edge-list file, a JSON document, or a dict.

    Plain-text sources hold one ``i j`` edge per line (0-based vertex
    indices, ``#`` comments); structured sources carry
    ``{n, edges/adjacency, labels?, p?, N?}``.  ``strict`` additionally
    rejects self-loops.
    """
    if isinstance(source, Graph):
        graph = source
    elif isinstance(source, dict):
        graph = _parse_document(source)
    else:
        path = Path(source)
        text = path.read_text()
        stripped = text.lstrip()
        if stripped.startswith("{"):
            try:
                doc = json.loads(text)
            except json.JSONDecodeError as exc:
                raise GraphFormatError(f"{path}: invalid JSON: {exc}") from exc
            graph = _parse_document(doc)
        else:
            graph = _parse_edge_list(text)
    if strict and not graph.has_zero_diagonal:
        raise GraphFormatError("self-loops are not allowed in strict mode")
    return graph


def minimal_level(n: int, p: int) -> int:
    """Smallest N with p**N >= n."""
    N = 1
    while p**N < n:
        N += 1
    return N


@dataclass(frozen=True)
class NetworkEmbedding:
    """A graph together with its vertex -> ball-address assignment.

    Vertex k receives the base-p code of the integer k at precision N,
    so the assignment is deterministic and injective whenever
    ``p**N >= n``.
    """

    graph: Graph
    p: int
    N: int
    codes: tuple[PAdicCode, ...]

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def degrees(self) -> np.ndarray:
        return self.graph.degrees

    @property
    def gamma_max(self) -> int:
        return int(self.graph.degrees.max())


def embed(graph: Graph, p: int | None = None, N: int | None = None) -> NetworkEmbedding:
    """Assign vertices to level-N ball addresses (defaults p=2, minimal N)."""
    if p is None:
        p = graph.p_hint if graph.p_hint is not None else 2
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if N is None:
        N = graph.N_hint if graph.N_hint is not None else minimal_level(graph.n, p)
    if N < 1:
        raise ValueError("level N must be >= 1")
    if p**N < graph.n:
        raise ValueError(f"p**N = {p**N} cannot address {graph.n} vertices")
    codes = tuple(PAdicCode.from_int(k, p, N) for k in range(graph.n))
    return NetworkEmbedding(graph=graph, p=p, N=N, codes=codes)


@dataclass(frozen=True)
class LevelGrid:
    """The ordered level-M refinement of an embedding's balls.

    Sites enumerate each vertex ball's p**(M-N) sub-balls exactly once,
    vertex-major and offset-minor; ``site_vertex[s]`` is the vertex whose
    ball contains site s.
    """

    embedding: NetworkEmbedding
    M: int
    codes: tuple[PAdicCode, ...]

    @property
    def p(self) -> int:
        return self.embedding.p

    @property
    def N(self) -> int:
        return self.embedding.N

    @property
    def sites_per_ball(self) -> int:
        return self.p ** (self.M - self.N)

    @property
    def dim(self) -> int:
        return len(self.codes)

    @property
    def site_vertex(self) -> np.ndarray:
        return np.repeat(np.arange(self.embedding.n), self.sites_per_ball)

    def sites(self) -> list[tuple[int, int]]:
        """(vertex, offset) pairs in canonical order."""
        m = self.sites_per_ball
        return [(v, c) for v in range(self.embedding.n) for c in range(m)]

    def site_index(self, vertex: int, offset: int) -> int:
        m = self.sites_per_ball
        if not (0 <= vertex < self.embedding.n and 0 <= offset < m):
            raise ValueError(f"no site (vertex={vertex}, offset={offset}) at level {self.M}")
        return vertex * m + offset


def refine(embedding: NetworkEmbedding, M: int) -> LevelGrid:
    """Enumerate the level-M sub-ball addresses of every vertex ball."""
    if M < embedding.N:
        raise ValueError(f"refinement level {M} is below the embedding level {embedding.N}")
    codes: list[PAdicCode] = []
    for code in embedding.codes:
        codes.extend(refine_ball(code, M))
    return LevelGrid(embedding=embedding, M=M, codes=tuple(codes))
