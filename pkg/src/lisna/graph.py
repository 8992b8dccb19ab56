"""Spatial networks with undirected lines and directed arcs.

A :class:`SpatialNetwork` is built once and is read-only afterwards. Vertex
and edge identifiers are integers supplied by the caller.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence


class Traversal(str, Enum):
    """How edges may be walked when measuring hop distance."""

    UNDIRECTED = "undirected"
    DIRECTED = "directed"

    @classmethod
    def parse(cls, value: "Traversal | str") -> "Traversal":
        if isinstance(value, cls):
            return value
        aliases = {
            "undirected": cls.UNDIRECTED,
            "undirected-traversal": cls.UNDIRECTED,
            "directed": cls.DIRECTED,
            "direction-preserving": cls.DIRECTED,
        }
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise ValueError(f"unknown traversal mode {value!r}") from None


class NetworkError(ValueError):
    """Invalid network construction or query."""


class NoPathError(NetworkError):
    pass


@dataclass(frozen=True)
class Vertex:
    id: int
    x: float
    y: float


@dataclass(frozen=True)
class Edge:
    id: int
    tail: int
    head: int
    directed: bool
    length: float

    def other(self, v: int) -> int:
        return self.head if v == self.tail else self.tail


@dataclass(frozen=True)
class Path:
    """A simple path: distinct vertices joined by the listed edges."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    directed: bool

    @property
    def origin(self) -> int:
        return self.vertices[0]

    @property
    def terminus(self) -> int:
        return self.vertices[-1]

    @property
    def handle(self) -> str:
        return "-".join(str(v) for v in self.vertices)

    def __len__(self) -> int:
        return len(self.edges)


class SpatialNetwork:
    """Immutable geometric graph with at most one edge per vertex pair.

    Parameters
    ----------
    vertices : iterable of Vertex
    edges : iterable of Edge
        ``length`` may be ``None``, in which case the Euclidean distance
        between the endpoint coordinates is used.
    """

    def __init__(self, vertices: Iterable[Vertex], edges: Iterable[Edge]):
        verts: dict[int, Vertex] = {}
        for v in vertices:
            if v.id in verts:
                raise NetworkError(f"duplicate vertex id {v.id}")
            if not (math.isfinite(v.x) and math.isfinite(v.y)):
                raise NetworkError(f"vertex {v.id} has non-finite coordinates")
            verts[v.id] = v
        self._vertices = dict(sorted(verts.items()))

        self._edges: dict[int, Edge] = {}
        self._pairs: dict[frozenset, int] = {}
        self._lines: dict[int, list[int]] = {v: [] for v in self._vertices}
        self._arcs_in: dict[int, list[int]] = {v: [] for v in self._vertices}
        self._arcs_out: dict[int, list[int]] = {v: [] for v in self._vertices}
        for e in sorted(edges, key=lambda e: e.id):
            self._add_edge(e)
        for table in (self._lines, self._arcs_in, self._arcs_out):
            for v in table:
                table[v].sort()

        self.vertex_ids: tuple[int, ...] = tuple(self._vertices)
        self.edge_ids: tuple[int, ...] = tuple(self._edges)
        self._vpos = {v: i for i, v in enumerate(self.vertex_ids)}
        self._epos = {e: i for i, e in enumerate(self.edge_ids)}

    def _add_edge(self, e: Edge) -> None:
        if e.id in self._edges:
            raise NetworkError(f"duplicate edge id {e.id}")
        for end in (e.tail, e.head):
            if end not in self._vertices:
                raise NetworkError(f"edge {e.id} references unknown vertex {end}")
        if e.tail == e.head:
            raise NetworkError(f"edge {e.id} is a self-loop")
        pair = frozenset((e.tail, e.head))
        if pair in self._pairs:
            raise NetworkError(
                f"edge {e.id} duplicates vertex pair of edge {self._pairs[pair]}"
            )
        length = e.length
        if length is None:
            a, b = self._vertices[e.tail], self._vertices[e.head]
            length = math.hypot(a.x - b.x, a.y - b.y)
        if not (math.isfinite(length) and length > 0):
            raise NetworkError(f"edge {e.id} has nonpositive length {length}")
        e = Edge(e.id, e.tail, e.head, bool(e.directed), float(length))
        self._edges[e.id] = e
        self._pairs[pair] = e.id
        if e.directed:
            self._arcs_out[e.tail].append(e.id)
            self._arcs_in[e.head].append(e.id)
        else:
            self._lines[e.tail].append(e.id)
            self._lines[e.head].append(e.id)

    # -- basic access -----------------------------------------------------

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        return tuple(self._vertices.values())

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(self._edges.values())

    @property
    def n_vertices(self) -> int:
        return len(self._vertices)

    @property
    def n_edges(self) -> int:
        return len(self._edges)

    @property
    def kind(self) -> str:
        n_directed = sum(e.directed for e in self._edges.values())
        if n_directed == 0:
            return "undirected"
        if n_directed == len(self._edges):
            return "directed"
        return "partially directed"

    @property
    def total_length(self) -> float:
        return math.fsum(e.length for e in self._edges.values())

    def vertex(self, v: int) -> Vertex:
        try:
            return self._vertices[v]
        except KeyError:
            raise KeyError(f"unknown vertex {v}") from None

    def edge(self, e: int) -> Edge:
        try:
            return self._edges[e]
        except KeyError:
            raise KeyError(f"unknown edge {e}") from None

    def vertex_position(self, v: int) -> int:
        self.vertex(v)
        return self._vpos[v]

    def edge_position(self, e: int) -> int:
        self.edge(e)
        return self._epos[e]

    def edge_between(self, u: int, v: int) -> int | None:
        return self._pairs.get(frozenset((u, v)))

    # -- incidence ----------------------------------------------------------

    def line_edges(self, v: int) -> tuple[int, ...]:
        """Undirected edges incident to ``v``."""
        self.vertex(v)
        return tuple(self._lines[v])

    def in_edges(self, v: int) -> tuple[int, ...]:
        """Arcs whose head is ``v``."""
        self.vertex(v)
        return tuple(self._arcs_in[v])

    def out_edges(self, v: int) -> tuple[int, ...]:
        """Arcs whose tail is ``v``."""
        self.vertex(v)
        return tuple(self._arcs_out[v])

    def incident_edges(self, v: int) -> tuple[int, ...]:
        return tuple(sorted(self.line_edges(v) + self.in_edges(v) + self.out_edges(v)))

    def neighbors(self, v: int) -> set[int]:
        return {self._edges[e].other(v) for e in self.line_edges(v)}

    def parents(self, v: int) -> set[int]:
        return {self._edges[e].tail for e in self.in_edges(v)}

    def children(self, v: int) -> set[int]:
        return {self._edges[e].head for e in self.out_edges(v)}

    def family(self, v: int) -> set[int]:
        return self.parents(v) | self.children(v)

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def in_degree(self, v: int) -> int:
        return len(self.parents(v))

    def out_degree(self, v: int) -> int:
        return len(self.children(v))

    def cg_degree(self, v: int) -> int:
        return len(self.incident_edges(v))

    def mean_cg_degree(self) -> float:
        if not self._vertices:
            return 0.0
        return sum(self.cg_degree(v) for v in self._vertices) / len(self._vertices)

    # -- traversal ----------------------------------------------------------

    def successors(self, v: int, mode: Traversal | str = Traversal.UNDIRECTED) -> list[tuple[int, int]]:
        """``(next_vertex, edge_id)`` pairs reachable in one step from ``v``."""
        mode = Traversal.parse(mode)
        steps = [(self._edges[e].other(v), e) for e in self.line_edges(v)]
        steps += [(self._edges[e].head, e) for e in self.out_edges(v)]
        if mode is Traversal.UNDIRECTED:
            steps += [(self._edges[e].tail, e) for e in self.in_edges(v)]
        return sorted(steps)

    def predecessors(self, v: int, mode: Traversal | str = Traversal.UNDIRECTED) -> list[tuple[int, int]]:
        mode = Traversal.parse(mode)
        steps = [(self._edges[e].other(v), e) for e in self.line_edges(v)]
        steps += [(self._edges[e].tail, e) for e in self.in_edges(v)]
        if mode is Traversal.UNDIRECTED:
            steps += [(self._edges[e].head, e) for e in self.out_edges(v)]
        return sorted(steps)

    def bfs_distances(self, source: int, mode: Traversal | str = Traversal.UNDIRECTED,
                      max_depth: int | None = None, reverse: bool = False) -> dict[int, int]:
        """Hop distances from ``source`` to every reachable vertex.

        With ``reverse=True`` the distances are *to* ``source``.
        """
        self.vertex(source)
        step = self.predecessors if reverse else self.successors
        dist = {source: 0}
        queue = deque([source])
        while queue:
            u = queue.popleft()
            d = dist[u]
            if max_depth is not None and d >= max_depth:
                continue
            for w, _ in step(u, mode):
                if w not in dist:
                    dist[w] = d + 1
                    queue.append(w)
        return dist

    def hop_distance(self, u: int, v: int, mode: Traversal | str = Traversal.UNDIRECTED) -> int | None:
        """Minimum number of edges from ``u`` to ``v``; ``None`` if unreachable."""
        self.vertex(v)
        return self.bfs_distances(u, mode).get(v)

    def shortest_path(self, u: int, v: int, mode: Traversal | str = Traversal.UNDIRECTED) -> Path:
        """Fewest-edge path; ties go to the lexicographically smallest vertex sequence."""
        mode = Traversal.parse(mode)
        self.vertex(u)
        if u == v:
            raise NetworkError("shortest_path needs two distinct vertices")
        to_target = self.bfs_distances(v, mode, reverse=True)
        if u not in to_target:
            raise NoPathError(f"no {mode.value} path from {u} to {v}")
        verts, edges = [u], []
        cur = u
        while cur != v:
            need = to_target[cur] - 1
            nxt, e = min((w, e) for w, e in self.successors(cur, mode) if to_target.get(w) == need)
            verts.append(nxt)
            edges.append(e)
            cur = nxt
        return self._make_path(verts, edges)

    def path(self, vertices: Sequence[int]) -> Path:
        """Build a :class:`Path` through the given vertex sequence."""
        verts = [int(v) for v in vertices]
        if len(verts) < 2:
            raise NetworkError("a path needs at least two vertices")
        if len(set(verts)) != len(verts):
            raise NetworkError(f"path {verts} repeats a vertex")
        edges = []
        for a, b in zip(verts, verts[1:]):
            self.vertex(a)
            self.vertex(b)
            e = self.edge_between(a, b)
            if e is None:
                raise NetworkError(f"vertices {a} and {b} are not adjacent")
            edges.append(e)
        return self._make_path(verts, edges)

    def _make_path(self, verts: Sequence[int], edges: Sequence[int]) -> Path:
        directed = all(
            self._edges[e].directed and self._edges[e].tail == a
            for e, a in zip(edges, verts)
        )
        return Path(tuple(verts), tuple(edges), directed)

    def path_length(self, path: Path) -> float:
        return math.fsum(self._edges[e].length for e in path.edges)


def ancestors_edge_set(path: Path) -> set[int]:
    """Edges of a directed path leading up to, but excluding, the final arc."""
    _require_directed(path)
    return set(path.edges[:-1])


def descendants_edge_set(path: Path) -> set[int]:
    """Edges of a directed path after its first arc."""
    _require_directed(path)
    return set(path.edges[1:])


def _require_directed(path: Path) -> None:
    if not path.directed:
        raise NetworkError(f"path {path.handle} is not direction-preserving")
