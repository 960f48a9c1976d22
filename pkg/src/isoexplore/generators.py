"""Instance families. Every output satisfies the invariance axiom by construction."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np

from isoexplore.tree import MAX_TREE_NODES, ResourceLimitError, SearchTree


def gen_mh(h: int, color_offset: int = 0) -> SearchTree:
    """Complete binary tree of height ``h`` with pairwise distinct leaf colors.

    Nodes are heap-numbered; leaf colors run left to right from ``color_offset``.
    """
    if h < 0:
        raise ValueError("height must be nonnegative")
    if (1 << (h + 1)) - 1 > MAX_TREE_NODES:
        raise ResourceLimitError(f"M_{h} needs {(1 << (h + 1)) - 1} nodes, cap is {MAX_TREE_NODES}")
    n = (1 << (h + 1)) - 1
    internal = (1 << h) - 1
    idx = np.arange(n, dtype=np.int64)
    parent = (idx - 1) // 2
    parent[0] = -1
    ptr = np.concatenate([2 * np.arange(internal + 1), np.full(n - internal, n - 1)])
    colors = np.full(n, -1, dtype=np.int64)
    colors[internal:] = color_offset + np.arange(n - internal)
    return SearchTree(parent.tolist(), ptr.tolist(), list(range(1, n)), colors.tolist(), validate=False)


def _renumber_bfs(
    parent: np.ndarray, order_within: np.ndarray, degree: np.ndarray, colors: np.ndarray, root: int
) -> SearchTree:
    """Rebuild a tree in BFS numbering, children ranked by ``order_within``.

    ``order_within`` lists all non-root nodes sorted by (parent, rank).
    """
    n = len(parent)
    start = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(degree, out=start[1:])
    sequence = [np.array([root], dtype=np.int64)]
    level = sequence[0]
    while True:
        counts = degree[level]
        total = int(counts.sum())
        if total == 0:
            break
        offsets = np.repeat(start[level] - np.cumsum(counts) + counts, counts)
        level = order_within[offsets + np.arange(total)]
        sequence.append(level)
    old = np.concatenate(sequence)
    new_id = np.empty(n, dtype=np.int64)
    new_id[old] = np.arange(n)
    new_parent = np.where(parent[old] >= 0, new_id[np.maximum(parent[old], 0)], -1)
    new_deg = degree[old]
    ptr = np.empty(n + 1, dtype=np.int64)
    ptr[0] = 0
    np.cumsum(new_deg, out=ptr[1:])
    return SearchTree(new_parent.tolist(), ptr.tolist(), list(range(1, n)), colors[old].tolist(), validate=False)


def iso_shuffle(tree: SearchTree, seed: int) -> SearchTree:
    """Same abstract colored tree with every child list independently permuted
    and node ids renumbered."""
    rng = np.random.default_rng(seed)
    parent, _, _, colors = tree.arrays()
    n = len(parent)
    degree = np.bincount(parent[parent >= 0], minlength=n)
    nonroot = np.flatnonzero(parent >= 0)
    keys = rng.random(len(nonroot))
    order_within = nonroot[np.lexsort((keys, parent[nonroot]))]
    return _renumber_bfs(parent, order_within, degree, colors, tree.root)


def relabel_colors(tree: SearchTree, offset: int) -> SearchTree:
    """Shift every leaf color by ``offset``."""
    shifted = []
    for v in tree.nodes():
        c = tree.color(v)
        if c is not None:
            c += offset
            if not 0 <= c < 1 << 64:
                raise ValueError(f"shifted color {c} leaves the 64-bit range")
        shifted.append(-1 if c is None else c)
    parent, ptr, kids, _ = tree.arrays()
    return SearchTree(parent.tolist(), ptr.tolist(), kids.tolist(), shifted, validate=False)


def orbit_recolor(tree: SearchTree) -> SearchTree:
    """Recolor leaves by their orbit under the group generated by swapping
    sibling subtrees that are identical (including the current leaf labels).

    Two leaves share an orbit iff their root paths pass through the same
    sequence of subtree types, so each color class is one orbit.
    """
    types: dict[tuple, int] = {}
    kind = [0] * len(tree)
    order = tree.bfs_order()
    for u in reversed(order):
        kids = tree.children(u)
        key = ("I", tuple(sorted(kind[c] for c in kids))) if kids else ("L", tree.color(u))
        kind[u] = types.setdefault(key, len(types))
    paths: dict[tuple, int] = {}
    path_of: dict[int, tuple] = {tree.root: ()}
    colors: list[int | None] = [None] * len(tree)
    for u in order:
        kids = tree.children(u)
        for c in kids:
            path_of[c] = path_of[u] + (kind[c],)
        if not kids:
            colors[u] = paths.setdefault(path_of[u], len(paths))
        del path_of[u]
    return SearchTree.from_children([tree.children(v) for v in tree.nodes()], colors)


@dataclass(frozen=True)
class OrbitTreeSpec:
    target_size: int
    max_degree: int = 3
    duplication_prob: float = 0.5
    height_cap: int = 64

    def __post_init__(self) -> None:
        if self.max_degree < 2:
            raise ValueError("max_degree must be at least 2")
        if not 0.0 <= self.duplication_prob <= 1.0:
            raise ValueError("duplication_prob must lie in [0, 1]")
        if self.target_size < 1 or self.height_cap < 0:
            raise ValueError("target_size must be positive and height_cap nonnegative")


def gen_orbit_tree(spec: OrbitTreeSpec, seed: int) -> SearchTree:
    """Random tree whose duplicated sibling subtrees are exact copies, leaves
    colored by orbit so the axiom holds by construction."""
    rng = random.Random(seed)
    children: list[list[int]] = []
    labels: list[int | None] = []

    def new_node() -> int:
        children.append([])
        labels.append(None)
        return len(children) - 1

    def copy(v: int) -> int:
        w = new_node()
        labels[w] = labels[v]
        children[w] = [copy(c) for c in children[v]]
        return w

    def build(budget: int, depth: int) -> int:
        v = new_node()
        if budget < 3 or depth >= spec.height_cap:
            labels[v] = v
            return v
        k = rng.randint(2, min(spec.max_degree, budget - 1))
        # random composition of budget-1 into k positive parts
        cuts = sorted(rng.sample(range(1, budget - 1), k - 1))
        parts = [b - a for a, b in zip([0] + cuts, cuts + [budget - 1])]
        # position j either starts a new subtree or copies an earlier original
        source = [0]
        for j in range(1, k):
            source.append(rng.choice(source) if rng.random() < spec.duplication_prob else j)
        share: dict[int, list[int]] = {}
        for j, src in enumerate(source):
            share.setdefault(src, []).append(parts[j])
        built = {src: build(max(1, sum(ps) // len(ps)), depth + 1) for src, ps in share.items()}
        children[v] = [built[src] if src == j else copy(built[src]) for j, src in enumerate(source)]
        return v

    build(spec.target_size, 0)
    raw = SearchTree.from_children(children, labels)
    return orbit_recolor(raw)


def gen_noniso_pair(h: int, seed: int) -> tuple[SearchTree, SearchTree]:
    """Two M_h-shaped trees with disjoint color sets."""
    if h < 1:
        raise ValueError("height must be at least 1")
    rng = random.Random(seed)
    t1 = iso_shuffle(gen_mh(h), rng.getrandbits(63))
    t2 = iso_shuffle(gen_mh(h, color_offset=1 << h), rng.getrandbits(63))
    return t1, t2


def _prune(
    base: SearchTree, prune_prob: float, min_depth: int, rng: random.Random, next_color: int
) -> tuple[SearchTree, int]:
    cut = [False] * len(base)
    depth = base.depths()
    internal = [v for v in base.nodes() if not base.is_leaf(v) and depth[v] >= max(1, min_depth)]
    internal.sort(key=lambda v: -depth[v])
    for v in internal:
        if rng.random() < prune_prob:
            cut[v] = True
    children: list[list[int]] = []
    colors: list[int | None] = []
    todo = [(base.root, -1)]
    while todo:
        v, p = todo.pop()
        w = len(children)
        children.append([])
        colors.append(None)
        if p >= 0:
            children[p].append(w)
        if cut[v] or base.is_leaf(v):
            colors[w] = next_color
            next_color += 1
        else:
            todo.extend((c, w) for c in reversed(base.children(v)))
    return SearchTree.from_children(children, colors), next_color


def gen_pruned_pair(
    h: int, prune_prob: float, seed: int, *, plant_match: bool = False
) -> tuple[SearchTree, SearchTree]:
    """Independently pruned binary subtrees of M_{2h} with leaves on several levels.

    The top ``h`` levels stay complete; each internal node at depth ``h`` or
    more is replaced by a fresh leaf with probability ``prune_prob``.

    All leaf colors are distinct within and across the trees. With
    ``plant_match`` the second tree is a shuffled copy of the first instead,
    which is the only way a shared color keeps the axiom true.
    """
    if h < 1:
        raise ValueError("height must be at least 1")
    if not 0.0 <= prune_prob < 1.0:
        raise ValueError("prune_prob must lie in [0, 1)")
    rng = random.Random(seed)
    base = gen_mh(2 * h)
    t1, nxt = _prune(base, prune_prob, h, rng, 0)
    if plant_match:
        return t1, iso_shuffle(t1, rng.getrandbits(63))
    t2, _ = _prune(base, prune_prob, h, rng, nxt)
    return t1, t2
