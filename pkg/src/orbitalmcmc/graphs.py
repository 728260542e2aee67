"""Plain undirected graphs for independent-set models."""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

from .autgroup import ColoredGraph


class Graph:
    """Simple undirected graph with optional vertex names."""

    __slots__ = ("n", "edges", "adj", "names")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]],
                 names: Optional[Sequence[str]] = None):
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            norm.add((u, v) if u < v else (v, u))
        if names is not None and len(names) != n:
            raise ValueError("vertex name count does not match n")
        self.n = n
        self.edges = frozenset(norm)
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self.adj = tuple(tuple(sorted(a)) for a in adj)
        self.names = tuple(names) if names is not None else None

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def to_colored(self) -> ColoredGraph:
        """Single-color view for automorphism search."""
        return ColoredGraph(self.n, [0] * self.n, self.edges,
                            vertex_names=self.names)

    def is_independent(self, bits: Sequence[int]) -> bool:
        return not any(bits[u] and bits[v] for u, v in self.edges)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={len(self.edges)})"


def default_names(n: int) -> list[str]:
    """Letters a..z, then v26, v27, ..."""
    return [chr(ord("a") + i) if i < 26 else f"v{i}" for i in range(n)]
