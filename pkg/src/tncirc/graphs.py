"""Simple undirected graphs, line graphs and the graph file format."""

from __future__ import annotations

from collections import deque
from typing import Iterable


class SimpleGraph:
    """Undirected graph on vertices ``0..n-1`` without loops or parallel edges."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        self.n = n
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self._edges: list[tuple[int, int]] = []
        for u, v in edges:
            self.add_edge(u, v)

    def add_edge(self, u: int, v: int) -> None:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"edge ({u}, {v}) outside vertex range [0, {self.n})")
        if v in self.adj[u]:
            raise ValueError(f"duplicate edge ({u}, {v})")
        self.adj[u].add(v)
        self.adj[v].add(u)
        self._edges.append((min(u, v), max(u, v)))

    @property
    def edges(self) -> list[tuple[int, int]]:
        return list(self._edges)

    @property
    def num_edges(self) -> int:
        return len(self._edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in self.adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == self.n

    def is_regular(self, k: int) -> bool:
        return all(len(a) == k for a in self.adj)

    def __eq__(self, other):
        if not isinstance(other, SimpleGraph):
            return NotImplemented
        return self.n == other.n and sorted(self._edges) == sorted(other._edges)

    def __repr__(self) -> str:
        return f"SimpleGraph(n={self.n}, m={self.num_edges})"


def line_graph(g: SimpleGraph) -> SimpleGraph:
    """One vertex per edge of ``g`` (in ``g.edges`` order); adjacent iff the edges touch."""
    return multigraph_line_graph(g.n, g.edges)


def multigraph_line_graph(num_vertices: int, edges: list[tuple[int, int]]) -> SimpleGraph:
    """Line graph of a multigraph: parallel edges become adjacent line-graph vertices."""
    incident: list[list[int]] = [[] for _ in range(num_vertices)]
    for idx, (u, v) in enumerate(edges):
        incident[u].append(idx)
        if v != u:
            incident[v].append(idx)
    lg = SimpleGraph(len(edges))
    for inc in incident:
        for a in range(len(inc)):
            for b in range(a + 1, len(inc)):
                if not lg.has_edge(inc[a], inc[b]):
                    lg.add_edge(inc[a], inc[b])
    return lg


def read_graph(text: str) -> SimpleGraph:
    """Parse ``n`` on the first line followed by one ``u v`` edge per line."""
    rows = [ln.split("#", 1)[0].split() for ln in text.splitlines()]
    rows = [r for r in rows if r]
    if not rows or len(rows[0]) != 1:
        raise ValueError("graph file must start with the vertex count")
    g = SimpleGraph(int(rows[0][0]))
    for r in rows[1:]:
        if len(r) != 2:
            raise ValueError(f"bad edge line {' '.join(r)!r}")
        g.add_edge(int(r[0]), int(r[1]))
    return g


def write_graph(g: SimpleGraph) -> str:
    return "\n".join([str(g.n)] + [f"{u} {v}" for u, v in g.edges]) + "\n"
