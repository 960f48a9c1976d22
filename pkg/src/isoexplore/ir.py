"""Individualization-refinement search trees of small graphs.

Node ids are tuples of individualized vertices, the root is ``()``. A node's
coloring is the stable refinement of the uniform coloring with its vertices
individualized in order. Leaves are discrete colorings and are colored by an
interned certificate: the adjacency matrix in color order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from isoexplore.tree import ResourceLimitError, SearchTree

IR_MAX_VERTICES = 10


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        for u, v in self.edges:
            if not (0 <= u < v < self.n):
                raise ValueError(f"bad edge ({u}, {v}) for n={self.n}")

    @classmethod
    def from_edges(cls, n: int, edges) -> Graph:
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            norm.add((min(u, v), max(u, v)))
        return cls(n, frozenset(norm))

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return adj

    def relabel(self, perm: list[int]) -> Graph:
        """Image under the vertex map ``i -> perm[i]``."""
        return Graph.from_edges(self.n, [(perm[u], perm[v]) for u, v in self.edges])


def parse_graph(text: str) -> Graph:
    """Read ``p edge <n> <m>`` then ``e <u> <v>`` lines (1-indexed, ``c`` comments)."""
    n = m = None
    edges: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if n is not None:
                raise GraphFormatError(f"line {lineno}: second header")
            if len(parts) != 4 or parts[1] != "edge":
                raise GraphFormatError(f"line {lineno}: expected 'p edge <n> <m>'")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: non-integer header field") from None
            if n < 0 or m < 0:
                raise GraphFormatError(f"line {lineno}: negative count")
        elif parts[0] == "e":
            if len(parts) != 3:
                raise GraphFormatError(f"line {lineno}: expected 'e <u> <v>'")
            try:
                u, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise GraphFormatError(f"line {lineno}: non-integer vertex") from None
            if u == v:
                raise GraphFormatError(f"line {lineno}: self-loop at vertex {u}")
            if n is None:
                raise GraphFormatError(f"line {lineno}: edge before header")
            if not (1 <= u <= n and 1 <= v <= n):
                raise GraphFormatError(f"line {lineno}: vertex out of range 1..{n}")
            key = (min(u, v) - 1, max(u, v) - 1)
            if key in edges:
                raise GraphFormatError(f"line {lineno}: duplicate edge {u} {v}")
            edges.add(key)
        else:
            raise GraphFormatError(f"line {lineno}: unknown record {parts[0]!r}")
    if n is None:
        raise GraphFormatError("missing 'p edge' header")
    if len(edges) != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(edges)}")
    return Graph(n, frozenset(edges))


def format_graph(g: Graph) -> str:
    lines = [f"p edge {g.n} {len(g.edges)}"]
    lines += [f"e {u + 1} {v + 1}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


# -- refinement ------------------------------------------------------------------------


def _densify(signatures: list) -> tuple[int, ...]:
    rank = {s: i for i, s in enumerate(sorted(set(signatures)))}
    return tuple(rank[s] for s in signatures)


def color_refine(g: Graph, start: tuple[int, ...] | list[int] | None = None) -> tuple[int, ...]:
    """Coarsest stable refinement of ``start`` (uniform if None).

    Each round a vertex's signature is its color plus the sorted neighbor
    colors; colors are renamed by sorted signature rank, so the result does
    not depend on vertex ids.
    """
    adj = g.neighbors()
    colors = _densify(list(start)) if start is not None else (0,) * g.n
    if len(colors) != g.n:
        raise ValueError("coloring length differs from vertex count")
    while True:
        sig = [(colors[v], tuple(sorted(colors[u] for u in adj[v]))) for v in range(g.n)]
        new = _densify(sig)
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def individualize(colors: tuple[int, ...], v: int) -> tuple[int, ...]:
    """Split ``v`` off its cell, ordered before the rest of it."""
    return _densify([(c, 0 if u == v else 1) for u, c in enumerate(colors)])


def target_cell(colors: tuple[int, ...]) -> list[int]:
    """Vertices of the smallest non-singleton color, or [] if discrete."""
    cells: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        cells.setdefault(c, []).append(v)
    big = [c for c, vs in cells.items() if len(vs) > 1]
    return cells[min(big)] if big else []


def leaf_certificate(g: Graph, colors: tuple[int, ...]) -> tuple:
    """Degree sequence and adjacency matrix with vertices in color order."""
    order = sorted(range(g.n), key=lambda v: colors[v])
    pos = {v: i for i, v in enumerate(order)}
    rows = [0] * g.n
    for u, v in g.edges:
        rows[pos[u]] |= 1 << pos[v]
        rows[pos[v]] |= 1 << pos[u]
    return (g.n, tuple(bin(r).count("1") for r in rows), tuple(rows))


class LeafInterner:
    """Maps leaf certificates to small integer colors. Share one instance
    between the two trees of a comparison."""

    def __init__(self) -> None:
        self._ids: dict[tuple, int] = {}

    def __call__(self, cert: tuple) -> int:
        return self._ids.setdefault(cert, len(self._ids))

    def __len__(self) -> int:
        return len(self._ids)


# -- the lazy tree -----------------------------------------------------------------------


class IRTree:
    """Black-box view of the IR tree of ``g``; nodes are built on demand."""

    def __init__(self, g: Graph, interner: LeafInterner | None = None) -> None:
        if g.n > IR_MAX_VERTICES:
            raise ResourceLimitError(f"IR trees are limited to {IR_MAX_VERTICES} vertices, got {g.n}")
        self.graph = g
        self.interner = interner if interner is not None else LeafInterner()
        self._coloring: dict[tuple, tuple[int, ...]] = {(): color_refine(g)}
        self._cells: dict[tuple, list[int]] = {}

    @property
    def root(self) -> tuple:
        return ()

    def coloring(self, v: tuple) -> tuple[int, ...]:
        col = self._coloring.get(v)
        if col is None:
            parent = self.coloring(v[:-1])
            col = color_refine(self.graph, individualize(parent, v[-1]))
            self._coloring[v] = col
        return col

    def _cell(self, v: tuple) -> list[int]:
        cell = self._cells.get(v)
        if cell is None:
            cell = self._cells[v] = target_cell(self.coloring(v))
        return cell

    def degree(self, v: tuple) -> int:
        return len(self._cell(v))

    def child(self, v: tuple, i: int) -> tuple:
        cell = self._cell(v)
        if not 0 <= i < len(cell):
            raise IndexError(f"node {v!r} has {len(cell)} children, asked for {i}")
        return v + (cell[i],)

    def color(self, v: tuple) -> int | None:
        if self._cell(v):
            return None
        return self.interner(leaf_certificate(self.graph, self.coloring(v)))

    def materialize(self) -> SearchTree:
        """Whole tree as a SearchTree in BFS order (root 0)."""
        ids = {(): 0}
        order = [()]
        children: list[list[int]] = []
        colors: list[int | None] = []
        i = 0
        while i < len(order):
            v = order[i]
            i += 1
            kids = []
            for k in range(self.degree(v)):
                c = self.child(v, k)
                ids[c] = len(order)
                order.append(c)
                kids.append(ids[c])
            children.append(kids)
            colors.append(self.color(v))
        return SearchTree.from_children(children, colors)


def ir_tree(g: Graph, interner: LeafInterner | None = None) -> IRTree:
    return IRTree(g, interner)


def graph_aut_order(g: Graph) -> int:
    """|Aut(g)| by backtracking over partial vertex maps (n <= 10)."""
    if g.n > IR_MAX_VERTICES:
        raise ResourceLimitError(f"automorphism count limited to {IR_MAX_VERTICES} vertices, got {g.n}")
    adj = [set(a) for a in g.neighbors()]
    image = [-1] * g.n
    used = [False] * g.n

    def extend(k: int) -> int:
        if k == g.n:
            return 1
        total = 0
        for w in range(g.n):
            if used[w] or len(adj[w]) != len(adj[k]):
                continue
            if all((image[u] in adj[w]) == (u in adj[k]) for u in range(k)):
                image[k] = w
                used[w] = True
                total += extend(k + 1)
                used[w] = False
        return total

    return extend(0)


# -- a small corpus -------------------------------------------------------------------


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2))


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def disjoint_union(a: Graph, b: Graph) -> Graph:
    return Graph.from_edges(a.n + b.n, list(a.edges) + [(u + a.n, v + a.n) for u, v in b.edges])


# Asymmetric graph on 6 vertices whose color refinement is already discrete:
# a triangle 0-1-2 with a pendant path 2-3-4 and a pendant vertex 5 on 1.
RIGID6 = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (1, 5)])


def corpus() -> dict[str, Graph]:
    return {
        "K2": complete_graph(2),
        "P4": path_graph(4),
        "C4": cycle_graph(4),
        "C5": cycle_graph(5),
        "K3": complete_graph(3),
        "star3": star_graph(3),
        "rigid6": RIGID6,
    }
