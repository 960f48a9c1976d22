"""Concrete search trees, the exploration oracle and the line-based tree format."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Protocol, Sequence

import numpy as np

from isoexplore.seeds import derive_seed

# Hard cap on the node count of generated/loaded trees.
MAX_TREE_NODES = 1 << 23

NO_COLOR = -1


class TreeFormatError(ValueError):
    """Raised for malformed tree documents or invalid tree structure."""


class ResourceLimitError(RuntimeError):
    """Raised when an input exceeds an explicit size cap."""


class NotExploredError(LookupError):
    """An oracle call named a node the session has not explored yet."""


class BlackBoxTree(Protocol):
    """What an exploration session needs from a tree.

    Node ids only have to be hashable; ``SearchTree`` uses dense ints, the
    individualization-refinement adapter uses tuples of vertices.
    """

    @property
    def root(self) -> Hashable: ...

    def degree(self, v) -> int: ...

    def child(self, v, i: int): ...

    def color(self, v) -> int | None: ...


class SearchTree:
    """Immutable rooted tree with ordered children and colored leaves.

    Stored in CSR form: the children of ``v`` are
    ``child_ids[child_ptr[v]:child_ptr[v + 1]]`` in rank order.
    """

    __slots__ = ("_parent", "_ptr", "_kids", "_color", "_root", "_memo")

    def __init__(
        self,
        parent: Sequence[int],
        child_ptr: Sequence[int],
        child_ids: Sequence[int],
        colors: Sequence[int],
        *,
        validate: bool = True,
    ) -> None:
        self._parent = list(parent)
        self._ptr = list(child_ptr)
        self._kids = list(child_ids)
        self._color = list(colors)
        if len(self._parent) > MAX_TREE_NODES:
            raise ResourceLimitError(f"tree has {len(self._parent)} nodes, cap is {MAX_TREE_NODES}")
        roots = [v for v, p in enumerate(self._parent) if p < 0]
        if len(roots) != 1:
            raise TreeFormatError(f"expected exactly one root, found {len(roots)} (cycle or multiple roots)")
        self._root = roots[0]
        self._memo: dict = {}
        if validate:
            self._validate()

    @classmethod
    def from_children(cls, children: Sequence[Sequence[int]], colors: Sequence[int | None]) -> SearchTree:
        """Build from per-node child lists; ``colors[v]`` is None for internal nodes."""
        n = len(children)
        if len(colors) != n:
            raise TreeFormatError("children and colors differ in length")
        parent = [-1] * n
        ptr = [0] * (n + 1)
        kids: list[int] = []
        for v, cs in enumerate(children):
            for c in cs:
                if not 0 <= c < n:
                    raise TreeFormatError(f"child id {c} out of range")
                if parent[c] != -1 or c == v:
                    raise TreeFormatError(f"node {c} has more than one parent")
                parent[c] = v
            kids.extend(cs)
            ptr[v + 1] = len(kids)
        cols = [NO_COLOR if c is None else int(c) for c in colors]
        return cls(parent, ptr, kids, cols)

    def _validate(self) -> None:
        n = len(self._parent)
        if len(self._ptr) != n + 1 or len(self._color) != n or len(self._kids) != n - 1:
            raise TreeFormatError("inconsistent array lengths")
        for v in range(n):
            deg = self._ptr[v + 1] - self._ptr[v]
            if deg == 1:
                raise TreeFormatError(f"unary node {v}")
            col = self._color[v]
            if deg == 0 and col < 0:
                raise TreeFormatError(f"uncolored leaf {v}")
            if deg > 0 and col >= 0:
                raise TreeFormatError(f"colored internal node {v}")
            if col >= 1 << 64:
                raise TreeFormatError(f"color of node {v} exceeds 64 bits")
            for c in self._kids[self._ptr[v]:self._ptr[v + 1]]:
                if self._parent[c] != v:
                    raise TreeFormatError(f"parent/child mismatch at {v}->{c}")
        # every node reachable from the root <=> no cycles given n-1 child slots
        seen = 1
        stack = [self._root]
        while stack:
            v = stack.pop()
            kids = self._kids[self._ptr[v]:self._ptr[v + 1]]
            seen += len(kids)
            stack.extend(kids)
        if seen != n:
            raise TreeFormatError("tree contains a cycle or is disconnected")

    # -- oracle-facing protocol -------------------------------------------------

    @property
    def root(self) -> int:
        return self._root

    def degree(self, v: int) -> int:
        return self._ptr[v + 1] - self._ptr[v]

    def child(self, v: int, i: int) -> int:
        return self._kids[self._ptr[v] + i]

    def color(self, v: int) -> int | None:
        c = self._color[v]
        return None if c < 0 else c

    # -- ground truth accessors (tests, generators, oracle) ---------------------

    def __len__(self) -> int:
        return len(self._parent)

    def nodes(self) -> range:
        return range(len(self._parent))

    def parent(self, v: int) -> int | None:
        p = self._parent[v]
        return None if p < 0 else p

    def children(self, v: int) -> list[int]:
        return self._kids[self._ptr[v]:self._ptr[v + 1]]

    def is_leaf(self, v: int) -> bool:
        return self._ptr[v + 1] == self._ptr[v]

    def leaves(self) -> list[int]:
        return [v for v in range(len(self._parent)) if self._ptr[v + 1] == self._ptr[v]]

    def memo(self, key, compute):
        """Cache a derived value; safe because the tree never changes."""
        if key not in self._memo:
            self._memo[key] = compute()
        return self._memo[key]

    def depths(self) -> list[int]:
        def compute() -> list[int]:
            depth = [0] * len(self._parent)
            for v in self.bfs_order():
                for c in self.children(v):
                    depth[c] = depth[v] + 1
            return depth

        return list(self.memo("depths", compute))

    def bfs_order(self) -> list[int]:
        def compute() -> list[int]:
            order = [self._root]
            i = 0
            while i < len(order):
                v = order[i]
                order.extend(self._kids[self._ptr[v]:self._ptr[v + 1]])
                i += 1
            return order

        return list(self.memo("bfs", compute))

    def leaf_colors(self) -> list[int]:
        return [self._color[v] for v in self.leaves()]

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """parent, child_ptr, child_ids as int64; colors as Python ints (they span 64 bits)."""
        return (
            np.asarray(self._parent, dtype=np.int64),
            np.asarray(self._ptr, dtype=np.int64),
            np.asarray(self._kids, dtype=np.int64),
            np.asarray(self._color, dtype=object),
        )

    def __repr__(self) -> str:
        return f"SearchTree(nodes={len(self)}, leaves={len(self.leaves())})"


@dataclass(frozen=True)
class TreeMetrics:
    size: int
    leaf_count: int
    height: int
    max_degree: int


def metrics(tree: SearchTree) -> TreeMetrics:
    def compute() -> TreeMetrics:
        return TreeMetrics(
            size=len(tree),
            leaf_count=len(tree.leaves()),
            height=max(tree.depths()),
            max_degree=max(tree.degree(v) for v in tree.nodes()),
        )

    return tree.memo("metrics", compute)


# -- tree format ------------------------------------------------------------------


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def load_tree(text: str) -> SearchTree:
    """Parse the line-based tree format.

    ``tree <count>`` header, then ``<id> <parent|-> <color|->`` per node.
    The children of a node are the lines naming it as parent, in file order.
    """
    lines = [(no, _strip(raw)) for no, raw in enumerate(text.splitlines(), 1)]
    lines = [(no, s) for no, s in lines if s]
    if not lines:
        raise TreeFormatError("empty document")
    no, head = lines[0]
    parts = head.split()
    if len(parts) != 2 or parts[0] != "tree" or not parts[1].isdigit():
        raise TreeFormatError(f"line {no}: expected header 'tree <node-count>'")
    count = int(parts[1])
    if count > MAX_TREE_NODES:
        raise ResourceLimitError(f"tree has {count} nodes, cap is {MAX_TREE_NODES}")
    body = lines[1:]
    if len(body) != count:
        raise TreeFormatError(f"header announces {count} nodes, found {len(body)}")

    index: dict[int, int] = {}
    raw: list[tuple[int, int | None, int | None]] = []
    for no, s in body:
        fields = s.split()
        if len(fields) != 3:
            raise TreeFormatError(f"line {no}: expected '<id> <parent|-> <color|->'")
        try:
            nid = int(fields[0])
            par = None if fields[1] == "-" else int(fields[1])
            col = None if fields[2] == "-" else int(fields[2])
        except ValueError as exc:
            raise TreeFormatError(f"line {no}: {exc}") from None
        if nid < 0 or (par is not None and par < 0) or (col is not None and not 0 <= col < 1 << 64):
            raise TreeFormatError(f"line {no}: negative id or color out of range")
        if nid in index:
            raise TreeFormatError(f"line {no}: duplicate node id {nid}")
        index[nid] = len(raw)
        raw.append((nid, par, col))

    children: list[list[int]] = [[] for _ in raw]
    roots = 0
    for nid, par, _ in raw:
        if par is None:
            roots += 1
            continue
        if par not in index:
            raise TreeFormatError(f"node {nid} names unknown parent {par}")
        children[index[par]].append(index[nid])
    if roots != 1:
        raise TreeFormatError(f"expected exactly one root, found {roots} (cycle or multiple roots)")
    for (nid, _, col), cs in zip(raw, children):
        if len(cs) == 1:
            raise TreeFormatError(f"unary node {nid}")
        if cs and col is not None:
            raise TreeFormatError(f"colored internal node {nid}")
        if not cs and col is None:
            raise TreeFormatError(f"uncolored leaf {nid}")
    try:
        return SearchTree.from_children(children, [col for _, _, col in raw])
    except TreeFormatError as exc:
        if "cycle" in str(exc) or "root" in str(exc):
            raise TreeFormatError("cycle or multiple roots") from None
        raise


def save_tree(tree: SearchTree) -> str:
    """Serialize in BFS order so child ranks are preserved by line order."""
    order = tree.bfs_order()
    new_id = {v: i for i, v in enumerate(order)}
    out = [f"tree {len(order)}"]
    for v in order:
        p = tree.parent(v)
        c = tree.color(v)
        out.append(f"{new_id[v]} {'-' if p is None else new_id[p]} {'-' if c is None else c}")
    return "\n".join(out) + "\n"


def read_tree(path) -> SearchTree:
    with open(path, encoding="utf-8") as fh:
        return load_tree(fh.read())


def write_tree(tree: SearchTree, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(save_tree(tree))


# -- exploration ------------------------------------------------------------------


class ExplorationSession:
    """Oracle view of one tree.

    Only the root is explored initially. ``cost`` counts distinct non-root
    nodes ever explored; re-visits and exhausted queries are free.
    """

    def __init__(self, tree: BlackBoxTree, seed: int | None = None) -> None:
        self._tree = tree
        self.rng = random.Random(seed)
        self.root = tree.root
        self.explored: set = set()
        self.revealed: dict = {}
        self.next_index: dict = {}
        self.cost = 0
        # what the algorithm has learned about structure, not ground truth
        self._parent: dict = {}
        self._depth: dict = {}
        self._listed: dict = {}
        self._reveal(self.root, None)

    def _enter(self) -> None:
        if hasattr(self._tree, "oracle_depth"):
            self._tree.oracle_depth += 1

    def _exit(self) -> None:
        if hasattr(self._tree, "oracle_depth"):
            self._tree.oracle_depth -= 1

    def _reveal(self, v, parent) -> None:
        self._enter()
        try:
            deg = self._tree.degree(v)
            col = self._tree.color(v) if deg == 0 else None
        finally:
            self._exit()
        self.explored.add(v)
        self.revealed[v] = (deg, col)
        self._parent[v] = parent
        if parent is not None:
            self._depth[v] = self._depth[parent] + 1
            self.cost += 1
        else:
            self._depth[v] = 0

    def _fetch_child(self, v, i: int):
        self._enter()
        try:
            return self._tree.child(v, i)
        finally:
            self._exit()

    def _require(self, v) -> tuple[int, int | None]:
        try:
            return self.revealed[v]
        except KeyError:
            raise NotExploredError(f"node {v!r} has not been explored") from None

    def reseed(self, seed: int) -> None:
        self.rng = random.Random(seed)

    # -- oracle calls --------------------------------------------------------------

    def next_child(self, v):
        """Explore the smallest-index child not yet handed out; None once exhausted."""
        deg = self._require(v)[0]
        i = self.next_index.get(v, 0)
        if i >= deg:
            return None
        c = self._fetch_child(v, i)
        self.next_index[v] = i + 1
        self._listed.setdefault(v, []).append(c)
        if c not in self.revealed:
            self._reveal(c, v)
        return c

    def random_child(self, v):
        """Uniformly random child of ``v``; None for leaves."""
        deg = self._require(v)[0]
        if deg == 0:
            return None
        c = self._fetch_child(v, self.rng.randrange(deg))
        if c not in self.revealed:
            self._reveal(c, v)
        return c

    # -- revealed information -------------------------------------------------------

    def degree(self, v) -> int:
        return self._require(v)[0]

    def color(self, v) -> int | None:
        return self._require(v)[1]

    def is_leaf(self, v) -> bool:
        return self._require(v)[0] == 0

    def depth(self, v) -> int:
        self._require(v)
        return self._depth[v]

    def parent_of(self, v):
        self._require(v)
        return self._parent[v]

    def listed_children(self, v) -> list:
        """Children of ``v`` handed out by ``next_child`` so far, in rank order."""
        self._require(v)
        return self._listed.get(v, [])

    def iter_children(self, v) -> Iterator:
        """Children of ``v`` in rank order, reusing ones already listed."""
        listed = self.listed_children(v)
        i = 0
        while True:
            if i < len(listed):
                yield listed[i]
            else:
                c = self.next_child(v)
                if c is None:
                    return
                yield c
            i += 1

    def nth_child(self, v, i: int):
        """Rank-``i`` child, obtained through ``next_child`` calls only."""
        self._require(v)
        listed = self._listed.get(v, ())
        while len(listed) <= i:
            if self.next_child(v) is None:
                return None
            listed = self._listed[v]
        return listed[i]

    def known_children(self, v) -> list:
        """Explored children of ``v`` regardless of how they were reached."""
        self._require(v)
        return [c for c, p in self._parent.items() if p == v]

    def __repr__(self) -> str:
        return f"ExplorationSession(cost={self.cost}, explored={len(self.explored)})"


class AuditedTree:
    """Wraps a tree and fails on any access not issued by a session oracle call."""

    def __init__(self, tree: BlackBoxTree) -> None:
        self._inner = tree
        self.oracle_depth = 0
        self.log: list[tuple[str, object]] = []

    def _check(self, what: str, v) -> None:
        if self.oracle_depth <= 0:
            raise AssertionError(f"ground-truth access {what}({v!r}) outside an oracle call")
        self.log.append((what, v))

    @property
    def root(self):
        return self._inner.root

    def degree(self, v) -> int:
        self._check("degree", v)
        return self._inner.degree(v)

    def child(self, v, i: int):
        self._check("child", v)
        return self._inner.child(v, i)

    def color(self, v):
        self._check("color", v)
        return self._inner.color(v)


def new_sessions(t1: BlackBoxTree, t2: BlackBoxTree, seed: int) -> tuple[ExplorationSession, ExplorationSession]:
    return ExplorationSession(t1, derive_seed(seed, 1)), ExplorationSession(t2, derive_seed(seed, 2))


def iter_leaves(tree: SearchTree, v: int) -> Iterable[int]:
    stack = [v]
    while stack:
        u = stack.pop()
        kids = tree.children(u)
        if kids:
            stack.extend(reversed(kids))
        else:
            yield u


def subtree_size(tree: SearchTree, v: int) -> int:
    size = 0
    todo = deque([v])
    while todo:
        u = todo.popleft()
        size += 1
        todo.extend(tree.children(u))
    return size
