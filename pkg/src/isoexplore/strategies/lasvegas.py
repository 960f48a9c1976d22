"""Zero-error search through balanced splits.

A split ``(v, h)`` names a node at level ``h`` of one tree. Given a split,
``bidirectional_with_split`` forces a collision: explore every leaf under
``v`` and one leaf below every level-``h`` node of the other tree. The split
itself is found by ``lv_balanced_splits`` with a doubling cost limit.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from isoexplore.oracle import ExploredPrefix, prefix_code, truncated_iso
from isoexplore.seeds import derive_seed
from isoexplore.strategies.bfs import BfsWalker, bfs_subtree
from isoexplore.strategies.verdict import Verdict
from isoexplore.strategies.walks import capped_walk, leftmost_walk
from isoexplore.tree import ExplorationSession, SearchTree, metrics, subtree_size


@dataclass(frozen=True)
class Split:
    tree_index: int
    v: object
    h: int

    def __post_init__(self) -> None:
        if self.tree_index not in (1, 2):
            raise ValueError("tree_index must be 1 or 2")
        if self.h < 0:
            raise ValueError("split level must be nonnegative")


@dataclass(frozen=True)
class SplitCost:
    s1: int
    s2: int


def _ball_code(tree: SearchTree, h: int) -> bytes:
    return tree.memo(("ball", h), lambda: prefix_code(ExploredPrefix.from_tree(tree), h))


def split_cost(t1: SearchTree, t2: SearchTree, split: Split) -> SplitCost:
    """Ground-truth cost pair of a split (sizes count the root / ``v`` itself)."""
    host, other = (t1, t2) if split.tree_index == 1 else (t2, t1)
    if host.depths()[split.v] != split.h:
        raise ValueError(f"node {split.v} is not at level {split.h}")
    s1 = sum(1 for d in other.depths() if d <= split.h)
    same = _ball_code(host, split.h) == _ball_code(other, split.h)
    s2 = subtree_size(host, split.v) if same else s1
    return SplitCost(s1, s2)


def balance_bound(t1: SearchTree, t2: SearchTree) -> float:
    # two single leaves have no degree at all; d = 1 keeps their root split balanced
    d = max(metrics(t1).max_degree, metrics(t2).max_degree, 1)
    return 4 * d * min(math.sqrt(len(t1)), math.sqrt(len(t2)))


def is_balanced(t1: SearchTree, t2: SearchTree, split: Split) -> bool:
    cost = split_cost(t1, t2, split)
    return max(cost.s1, cost.s2) <= balance_bound(t1, t2)


# -- search with a given split ------------------------------------------------------


def bidirectional_with_split(
    s1: ExplorationSession,
    s2: ExplorationSession,
    split: Split,
    seed: int | None = None,
    *,
    walk: str = "random",
) -> Verdict:
    """Decide the pair exactly, using ``split`` to force a leaf collision.

    The walk phase runs under a total step budget that starts at
    ``s1 * ceil(log2(s1 + 2))`` (``s1`` = size of the other tree's ball) and
    doubles on every restart.
    """
    if walk not in ("random", "leftmost"):
        raise ValueError("walk must be 'random' or 'leftmost'")
    host, other = (s1, s2) if split.tree_index == 1 else (s2, s1)
    h = split.h

    def verdict_match(host_leaf, other_leaf, **stats) -> Verdict:
        if split.tree_index == 1:
            return Verdict.match(s1, s2, host_leaf, other_leaf, **stats)
        return Verdict.match(s1, s2, other_leaf, host_leaf, **stats)

    frontier, ball_visits = bfs_subtree(other, other.root, h, None)
    host_frontier, _ = bfs_subtree(host, host.root, h, ball_visits)
    if host_frontier is None:
        return Verdict.not_isomorphic(s1, s2, phase="ball")
    if split.v not in host.explored or host.depth(split.v) != h:
        raise ValueError(f"split node {split.v!r} is not at level {h}")
    if not truncated_iso(ExploredPrefix.from_session(host), ExploredPrefix.from_session(other), h):
        return Verdict.not_isomorphic(s1, s2, phase="ball")

    below_v, _ = bfs_subtree(host, split.v, None, None)
    wanted = {host.color(leaf): leaf for leaf in below_v}

    if walk == "leftmost":
        for n in frontier:
            leaf = leftmost_walk(other, n)
            if other.color(leaf) in wanted:
                return verdict_match(wanted[other.color(leaf)], leaf, restarts=0)
        return Verdict.not_isomorphic(s1, s2, phase="walks", restarts=0)

    if seed is not None:
        other.reseed(derive_seed(seed, split.tree_index))
    ball_size = ball_visits + 1
    budget = ball_size * math.ceil(math.log2(ball_size + 2))
    restarts = 0
    while True:
        used = 0
        overran = False
        for n in frontier:
            start_depth = other.depth(n)
            leaf = capped_walk(other, n, budget - used)
            if leaf is None:
                overran = True
                break
            used += other.depth(leaf) - start_depth
            col = other.color(leaf)
            if col in wanted:
                return verdict_match(wanted[col], leaf, restarts=restarts, path_budget=budget)
        if not overran:
            return Verdict.not_isomorphic(s1, s2, phase="walks", restarts=restarts, path_budget=budget)
        restarts += 1
        budget *= 2


# -- finding a split -------------------------------------------------------------------


@dataclass
class SplitSearch:
    """Outcome of the balanced-split search.

    ``split`` is None when the trees were shown non-isomorphic. ``ball_size``
    and ``subtree_size`` are the sizes observed for the returned split and are
    both bounded by the final ``budget``.
    """

    split: Split | None
    budget: int
    ball_size: int = 0
    subtree_size: int = 0
    rounds: int = 0
    probe_gaps: list[int] = field(default_factory=list)

    @property
    def not_isomorphic(self) -> bool:
        return self.split is None


def lv_balanced_splits(s1: ExplorationSession, s2: ExplorationSession, seed: int = 0) -> SplitSearch:
    """Find a split with a doubling cost limit ``s`` (sizes include the root).

    Each round grows both BFS balls level by level while they fit in ``s``,
    comparing the truncated trees after every level, then probes one random
    node of the deepest full level in each tree, alternating single child
    visits, until one probe has seen its whole subtree within ``s`` nodes.
    """
    rng = random.Random(seed)
    sessions = (s1, s2)
    levels = ([s1.root], [s2.root])
    ball = 1
    h = 0
    budget = 1
    rounds = 0
    gaps: list[int] = []

    def prefixes_match(level: int) -> bool:
        return truncated_iso(ExploredPrefix.from_session(s1), ExploredPrefix.from_session(s2), level)

    def leaf_split() -> Split | None:
        for v in levels[0]:
            if s1.degree(v) == 0:
                return Split(1, v, h)
        return None

    if not prefixes_match(0):
        return SplitSearch(None, budget, rounds=rounds)
    if (found := leaf_split()) is not None:
        return SplitSearch(found, budget, ball_size=1, subtree_size=1, rounds=rounds)

    while True:
        rounds += 1
        while True:
            widths = [sum(sess.degree(v) for v in lv) for sess, lv in zip(sessions, levels)]
            fits = [ball + w <= budget for w in widths]
            if fits[0] != fits[1]:
                # one ball completes the next level and the other cannot: sizes differ
                return SplitSearch(None, budget, rounds=rounds)
            if not fits[0]:
                break
            levels = tuple(
                [c for v in lv for c in sess.iter_children(v)] for sess, lv in zip(sessions, levels)
            )
            ball += widths[0]
            h += 1
            if not prefixes_match(h):
                return SplitSearch(None, budget, rounds=rounds)
            if (found := leaf_split()) is not None:
                return SplitSearch(found, budget, ball_size=ball, subtree_size=1, rounds=rounds)

        picks = [rng.choice(lv) for lv in levels]
        probes = [BfsWalker(sess, v) for sess, v in zip(sessions, picks)]
        limit = budget - 1
        while True:
            progressed = False
            for i, probe in enumerate(probes):
                if not probe.done and probe.count < limit:
                    probe.step()
                    progressed = True
                if probe.done:
                    gaps.append(abs(probes[0].count - probes[1].count))
                    return SplitSearch(
                        Split(i + 1, picks[i], h), budget,
                        ball_size=ball, subtree_size=probe.count + 1, rounds=rounds, probe_gaps=gaps,
                    )
            gaps.append(abs(probes[0].count - probes[1].count))
            if not progressed:
                break
        budget *= 2


def lv_iso(s1: ExplorationSession, s2: ExplorationSession, seed: int = 0) -> Verdict:
    """Balanced-split search followed by split-guided bidirectional search."""
    search = lv_balanced_splits(s1, s2, derive_seed(seed, "split"))
    stats = dict(split_budget=search.budget, rounds=search.rounds, restarts=search.rounds)
    if search.split is None:
        return Verdict.not_isomorphic(s1, s2, **stats)
    verdict = bidirectional_with_split(s1, s2, search.split, derive_seed(seed, "walks"))
    verdict.stats.update(stats, split=search.split, split_ball=search.ball_size,
                         split_subtree=search.subtree_size, walk_restarts=verdict.stats.get("restarts", 0))
    verdict.stats["restarts"] = search.rounds + verdict.stats["walk_restarts"]
    return verdict
