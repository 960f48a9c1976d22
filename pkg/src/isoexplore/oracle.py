"""Ground truth for small trees: rooted canonization, leaf-constrained
isomorphisms, axiom verification and explored-prefix comparison."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable

from isoexplore.tree import ExplorationSession, ResourceLimitError, SearchTree

AXIOM_NODE_CAP = 300

_LEAF = b"L"
_INNER = b"I"
_FRONTIER = b"F"


def _u32(n: int) -> bytes:
    return n.to_bytes(4, "big")


def _leaf_code(color: int) -> bytes:
    return _LEAF + int(color).to_bytes(8, "big")


def _inner_code(child_codes: list[bytes]) -> bytes:
    parts = [_INNER, _u32(len(child_codes))]
    for code in sorted(child_codes):
        parts.append(_u32(len(code)))
        parts.append(code)
    return b"".join(parts)


def ahu_code(tree: SearchTree, v: int | None = None) -> bytes:
    """Canonical byte string of the colored subtree rooted at ``v``.

    Equal codes iff the subtrees are color-preserving isomorphic as rooted
    trees; child order does not matter.
    """
    v = tree.root if v is None else v
    order = [v]
    i = 0
    while i < len(order):
        order.extend(tree.children(order[i]))
        i += 1
    codes: dict[int, bytes] = {}
    for u in reversed(order):
        kids = tree.children(u)
        codes[u] = _inner_code([codes[c] for c in kids]) if kids else _leaf_code(tree.color(u))
    return codes[v]


class CanonicalClasses:
    """Integer AHU classes shared across several trees.

    Two nodes (of any registered trees) get the same class iff their rooted
    colored subtrees are isomorphic.
    """

    def __init__(self) -> None:
        self._table: dict[tuple, int] = {}

    def classify(self, tree: SearchTree) -> list[int]:
        cls = [0] * len(tree)
        for u in reversed(tree.bfs_order()):
            kids = tree.children(u)
            key = ("I", tuple(sorted(cls[c] for c in kids))) if kids else ("L", tree.color(u))
            cls[u] = self._table.setdefault(key, len(self._table))
        return cls


def trees_isomorphic(t1: SearchTree, t2: SearchTree) -> bool:
    table = CanonicalClasses()
    return table.classify(t1)[t1.root] == table.classify(t2)[t2.root]


def _root_path(tree: SearchTree, v: int) -> list[int]:
    path = [v]
    while (p := tree.parent(v)) is not None:
        path.append(p)
        v = p
    path.reverse()
    return path


def constrained_iso(t1: SearchTree, l1: int, t2: SearchTree, l2: int) -> dict[int, int] | None:
    """Color-preserving isomorphism ``t1 -> t2`` sending leaf ``l1`` to ``l2``, or None.

    Along the root paths the image is forced; elsewhere children are paired
    by equal canonical class.
    """
    if not (t1.is_leaf(l1) and t2.is_leaf(l2)):
        raise ValueError("constrained_iso expects two leaves")
    table = CanonicalClasses()
    c1 = table.classify(t1)
    c2 = c1 if t2 is t1 else table.classify(t2)
    return _constrained(t1, c1, l1, t2, c2, l2)


def _constrained(t1: SearchTree, c1: list[int], l1: int, t2: SearchTree, c2: list[int], l2: int):
    if c1[t1.root] != c2[t2.root]:
        return None
    p1 = _root_path(t1, l1)
    p2 = _root_path(t2, l2)
    if len(p1) != len(p2) or c1[l1] != c2[l2]:
        return None
    on_path = {u: w for u, w in zip(p1, p2)}
    mapping: dict[int, int] = {}
    todo = [(t1.root, t2.root)]
    while todo:
        u, w = todo.pop()
        mapping[u] = w
        ku, kw = t1.children(u), t2.children(w)
        if len(ku) != len(kw):
            return None
        forced_u = next((c for c in ku if c in on_path), None)
        pool: dict[int, list[int]] = defaultdict(list)
        for c in kw:
            pool[c2[c]].append(c)
        if forced_u is not None:
            target = on_path[forced_u]
            if c1[forced_u] != c2[target]:
                return None
            pool[c2[target]].remove(target)
            todo.append((forced_u, target))
        for c in ku:
            if c == forced_u:
                continue
            bucket = pool.get(c1[c])
            if not bucket:
                return None
            todo.append((c, bucket.pop()))
    return mapping


def _paths_compatible(t1: SearchTree, c1: list[int], l1: int, t2: SearchTree, c2: list[int], l2: int) -> bool:
    """Existence test equivalent to ``_constrained(...) is not None``.

    Equal classes at a node pair imply equal child-class multisets, so after
    matching the forced path children the rest can always be paired.
    """
    p1, p2 = _root_path(t1, l1), _root_path(t2, l2)
    return len(p1) == len(p2) and all(c1[u] == c2[w] for u, w in zip(p1, p2))


def check_mapping(t1: SearchTree, t2: SearchTree, mapping: dict[int, int], l1: int, l2: int) -> bool:
    """Independent re-check of a claimed constrained isomorphism."""
    if len(mapping) != len(t1) or len(t1) != len(t2):
        return False
    if sorted(mapping) != list(t1.nodes()) or sorted(mapping.values()) != list(t2.nodes()):
        return False
    if mapping.get(l1) != l2 or mapping[t1.root] != t2.root:
        return False
    for u in t1.nodes():
        w = mapping[u]
        if sorted(mapping[c] for c in t1.children(u)) != sorted(t2.children(w)):
            return False
        if t1.color(u) != t2.color(w):
            return False
    return True


@dataclass
class AxiomReport:
    checked_pairs: int = 0
    violations: list[tuple[int, int, int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_axiom(t1: SearchTree, t2: SearchTree | None = None, *, max_nodes: int = AXIOM_NODE_CAP) -> AxiomReport:
    """Exhaustively check the invariance axiom on every same-colored leaf pair.

    Violations are reported as ``(tree_a, leaf_a, tree_b, leaf_b)`` with tree
    indices 1 or 2.
    """
    trees = [t1] if t2 is None else [t1, t2]
    for t in trees:
        if len(t) > max_nodes:
            raise ResourceLimitError(f"axiom check capped at {max_nodes} nodes, got {len(t)}")
    by_color: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for idx, t in enumerate(trees, 1):
        for leaf in t.leaves():
            by_color[t.color(leaf)].append((idx, leaf))
    table = CanonicalClasses()
    classes = [table.classify(t) for t in trees]
    report = AxiomReport()
    for members in by_color.values():
        for a in range(len(members)):
            for b in range(a, len(members)):
                (ia, la), (ib, lb) = members[a], members[b]
                report.checked_pairs += 1
                ta, tb = trees[ia - 1], trees[ib - 1]
                if not _paths_compatible(ta, classes[ia - 1], la, tb, classes[ib - 1], lb):
                    report.violations.append((ia, la, ib, lb))
    return report


# -- explored prefixes ------------------------------------------------------------


@dataclass
class ExploredPrefix:
    """Explored part of a tree: revealed degree and color per node plus the
    known child lists. Nodes whose children are not all known are frontier."""

    root: Hashable
    degree: dict
    color: dict
    children: dict

    @classmethod
    def from_session(cls, session: ExplorationSession) -> ExploredPrefix:
        kids: dict = defaultdict(list)
        for v in session.explored:
            p = session.parent_of(v)
            if p is not None:
                kids[p].append(v)
        return cls(
            root=session.root,
            degree={v: d for v, (d, _) in session.revealed.items()},
            color={v: c for v, (_, c) in session.revealed.items()},
            children=dict(kids),
        )

    @classmethod
    def from_tree(cls, tree: SearchTree) -> ExploredPrefix:
        return cls(
            root=tree.root,
            degree={v: tree.degree(v) for v in tree.nodes()},
            color={v: tree.color(v) for v in tree.nodes()},
            children={v: tree.children(v) for v in tree.nodes() if not tree.is_leaf(v)},
        )

    def is_closed(self, v) -> bool:
        return len(self.children.get(v, ())) == self.degree[v]


class PrefixIncompleteError(ValueError):
    pass


def prefix_code(prefix: ExploredPrefix, h: int) -> bytes:
    """Canonical code of the depth-<=h ball: leaves keep colors, non-leaf
    nodes at depth h become unlabeled frontier markers."""

    def code(v, depth: int) -> bytes:
        deg = prefix.degree[v]
        if deg == 0:
            return _leaf_code(prefix.color[v])
        if depth == h:
            return _FRONTIER
        kids = prefix.children.get(v, ())
        if len(kids) != deg:
            raise PrefixIncompleteError(f"children of node {v!r} at depth {depth} not fully explored")
        return _inner_code([code(c, depth + 1) for c in kids])

    if h < 0:
        raise ValueError("level must be nonnegative")
    return code(prefix.root, 0)


def truncated_iso(p1: ExploredPrefix, p2: ExploredPrefix, h: int) -> bool:
    """True iff the two prefixes truncated at level ``h`` are isomorphic."""
    return prefix_code(p1, h) == prefix_code(p2, h)
