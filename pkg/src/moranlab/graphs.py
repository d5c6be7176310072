"""Simple undirected connected graphs on dense integer vertices.

Vertices are indices 0..n-1 and adjacency lists are sorted tuples, so
the simulation hot loop can index arrays directly. Construction always
validates: no loops, no parallel edges, symmetric adjacency, connected.
Disconnected inputs are refused outright because fixation is undefined
on them.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .errors import InputFormatError


class GraphError(InputFormatError):
    pass


class SelfLoopError(GraphError):
    def __init__(self, u: int):
        super().__init__(f"self-loop at vertex {u}")
        self.vertex = u


class DuplicateEdgeError(GraphError):
    def __init__(self, u: int, v: int):
        super().__init__(f"duplicate edge {u} {v}")
        self.edge = (u, v)


class DisconnectedError(GraphError):
    def __init__(self, representative: int):
        super().__init__(
            f"graph is disconnected (vertex {representative} unreachable from 0)"
        )
        self.representative = representative


class MalformedLineError(GraphError):
    def __init__(self, lineno: int, reason: str):
        super().__init__(f"line {lineno}: {reason}")
        self.lineno = lineno


class InvalidSizeError(GraphError):
    pass


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected connected graph."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    degrees: tuple[int, ...]

    def edges(self) -> list[tuple[int, int]]:
        """Edge list with u < v, sorted lexicographically."""
        return [(u, v) for u in range(self.n) for v in self.adjacency[u] if u < v]

    def edge_count(self) -> int:
        return sum(self.degrees) // 2

    def is_complete(self) -> bool:
        return all(d == self.n - 1 for d in self.degrees)

    def serialize(self) -> str:
        lines = [f"n {self.n}"]
        lines.extend(f"{u} {v}" for u, v in self.edges())
        return "\n".join(lines) + "\n"

    def fingerprint(self) -> str:
        return hashlib.sha256(self.serialize().encode()).hexdigest()


def _build(n: int, edge_set: set[tuple[int, int]]) -> Graph:
    if n < 1:
        raise InvalidSizeError(f"graph needs at least one vertex, got n={n}")
    neighbours: list[list[int]] = [[] for _ in range(n)]
    for u, v in edge_set:
        neighbours[u].append(v)
        neighbours[v].append(u)
    adjacency = tuple(tuple(sorted(ns)) for ns in neighbours)
    degrees = tuple(len(ns) for ns in adjacency)

    # connectivity: BFS from vertex 0
    seen = [False] * n
    seen[0] = True
    frontier = [0]
    while frontier:
        u = frontier.pop()
        for v in adjacency[u]:
            if not seen[v]:
                seen[v] = True
                frontier.append(v)
    for v, ok in enumerate(seen):
        if not ok:
            raise DisconnectedError(v)
    return Graph(n=n, adjacency=adjacency, degrees=degrees)


def from_edges(n: int, edges) -> Graph:
    """Validated graph from an iterable of (u, v) pairs."""
    edge_set: set[tuple[int, int]] = set()
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise InvalidSizeError(f"edge ({u},{v}) outside vertex range 0..{n - 1}")
        if u == v:
            raise SelfLoopError(u)
        key = (min(u, v), max(u, v))
        if key in edge_set:
            raise DuplicateEdgeError(*key)
        edge_set.add(key)
    return _build(n, edge_set)


def parse_graph(text: str) -> Graph:
    """Parse the edge-list format.

    Lines hold two distinct vertex indices "u v"; an optional first line
    "n <count>" declares the vertex count. '#' comments and blank lines
    are ignored. Raises a GraphError subclass on any malformed content.
    """
    declared_n: int | None = None
    edges: list[tuple[int, int]] = []
    max_index = -1
    saw_content = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "n":
            if saw_content:
                raise MalformedLineError(lineno, "header 'n <count>' must come first")
            if len(parts) != 2:
                raise MalformedLineError(lineno, "header must be 'n <count>'")
            try:
                declared_n = int(parts[1])
            except ValueError:
                raise MalformedLineError(lineno, f"bad vertex count {parts[1]!r}")
            if declared_n < 1:
                raise MalformedLineError(lineno, "vertex count must be >= 1")
            saw_content = True
            continue
        if len(parts) != 2:
            raise MalformedLineError(lineno, f"expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLineError(lineno, f"non-integer endpoint in {line!r}")
        if u < 0 or v < 0:
            raise MalformedLineError(lineno, "vertex indices must be non-negative")
        if u == v:
            raise SelfLoopError(u)
        if declared_n is not None and (u >= declared_n or v >= declared_n):
            raise MalformedLineError(
                lineno, f"vertex index beyond declared count {declared_n}"
            )
        edges.append((u, v))
        max_index = max(max_index, u, v)
        saw_content = True

    if declared_n is None:
        if max_index < 0:
            raise InvalidSizeError("empty graph document")
        declared_n = max_index + 1
    return from_edges(declared_n, edges)


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise InvalidSizeError(f"complete graph needs n >= 1, got {n}")
    return from_edges(n, combinations(range(n), 2))


def path_graph(n: int) -> Graph:
    if n < 1:
        raise InvalidSizeError(f"path graph needs n >= 1, got {n}")
    return from_edges(n, ((i, i + 1) for i in range(n - 1)))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise InvalidSizeError(f"cycle graph needs n >= 3, got {n}")
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(n: int) -> Graph:
    """Star with one centre (vertex 0) and n-1 leaves."""
    if n < 2:
        raise InvalidSizeError(f"star graph needs n >= 2, got {n}")
    return from_edges(n, ((0, i) for i in range(1, n)))


@lru_cache(maxsize=None)
def enumerate_connected_graphs(n: int) -> tuple[Graph, ...]:
    """All connected graphs on exactly n vertices, one per isomorphism class.

    Brute force over edge subsets with a minimum-image canonical form;
    intended for small n (the n<=5 census has 1, 1, 2, 6, 21 classes).
    """
    if n < 1:
        raise InvalidSizeError("need n >= 1")
    if n == 1:
        return (complete_graph(1),)
    from itertools import permutations

    pairs = list(combinations(range(n), 2))
    pair_index = {p: i for i, p in enumerate(pairs)}
    perms = list(permutations(range(n)))
    out: list[Graph] = []
    for mask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if mask >> i & 1]
        # cheap connectivity screen before canonical work
        adj = [[] for _ in range(n)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = [False] * n
        seen[0] = True
        stack = [0]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        if not all(seen):
            continue
        canonical = True
        for perm in perms:
            img = 0
            for u, v in edges:
                a, b = perm[u], perm[v]
                img |= 1 << pair_index[(a, b) if a < b else (b, a)]
            if img < mask:
                canonical = False
                break
        if canonical:
            out.append(from_edges(n, edges))
    return tuple(out)
