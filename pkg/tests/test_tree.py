from __future__ import annotations

import random

import pytest

from isoexplore.generators import gen_mh, iso_shuffle
from isoexplore.oracle import ahu_code
from isoexplore.strategies import bfs_subtree, random_walk
from isoexplore.tree import (
    AuditedTree,
    ExplorationSession,
    NotExploredError,
    ResourceLimitError,
    SearchTree,
    TreeFormatError,
    load_tree,
    metrics,
    read_tree,
    save_tree,
    write_tree,
)


def test_single_node_document():
    t = load_tree("tree 1\n0 - 7\n")
    assert len(t) == 1
    assert t.is_leaf(t.root)
    assert t.color(t.root) == 7


def test_three_line_document_is_m1():
    t = load_tree("# root and two leaves\ntree 3\n0 - -\n1 0 1\n2 0 2\n")
    assert ahu_code(t) == ahu_code(load_tree(save_tree(gen_mh(1, color_offset=1))))
    assert t.children(t.root) == [1, 2]


def test_children_follow_line_order():
    t = load_tree("tree 3\n0 - -\n2 0 5\n1 0 4\n")
    assert [t.color(c) for c in t.children(t.root)] == [5, 4]


@pytest.mark.parametrize(
    "text, message",
    [
        ("tree 4\n0 - -\n1 0 -\n2 0 3\n5 1 4\n", "unary node"),
        ("tree 3\n0 - 1\n1 0 2\n2 0 3\n", "colored internal"),
        ("tree 2\n0 - -\n1 0 5\n", "unary node"),
        ("tree 3\n0 - -\n1 0 -\n2 0 3\n", "uncolored leaf"),
        ("tree 3\n0 - -\n1 0\n2 0 3\n", "expected"),
        ("tree 2\n0 - 1\n1 - 2\n", "multiple roots"),
        ("tree 3\n0 1 -\n1 0 -\n2 0 3\n", "cycle"),
        ("tree 2\n0 - 1\n", "announces 2 nodes"),
        ("0 - 1\n", "header"),
    ],
)
def test_load_errors(text, message):
    with pytest.raises(TreeFormatError, match=message):
        load_tree(text)


def test_uncolored_leaf_rejected():
    with pytest.raises(TreeFormatError, match="uncolored leaf"):
        SearchTree.from_children([[1, 2], [], []], [None, 1, None])


def test_color_range():
    with pytest.raises(TreeFormatError):
        SearchTree.from_children([[]], [1 << 64])


def test_save_load_roundtrip(tmp_path):
    t = iso_shuffle(gen_mh(4), 3)
    path = tmp_path / "t.tree"
    write_tree(t, path)
    back = read_tree(path)
    assert len(back) == len(t)
    # BFS renumbering keeps every child order
    assert [back.color(v) for v in back.bfs_order()] == [t.color(v) for v in t.bfs_order()]
    assert save_tree(back) == save_tree(t)


def test_metrics():
    assert metrics(gen_mh(3)) == metrics(gen_mh(3))
    m = metrics(gen_mh(3))
    assert (m.size, m.leaf_count, m.height, m.max_degree) == (15, 8, 3, 2)
    m = metrics(SearchTree.from_children([[]], [0]))
    assert (m.size, m.leaf_count, m.height, m.max_degree) == (1, 1, 0, 0)
    m = metrics(gen_mh(10))
    assert (m.size, m.leaf_count) == (2047, 1024)


def test_size_cap():
    with pytest.raises(ResourceLimitError):
        gen_mh(30)


# -- sessions ---------------------------------------------------------------------


def test_root_is_free():
    s = ExplorationSession(gen_mh(2))
    assert s.cost == 0
    assert s.explored == {s.root}
    assert s.revealed[s.root] == (2, None)


def test_next_child_order_and_exhaustion():
    t = gen_mh(1)
    s = ExplorationSession(t)
    first = s.next_child(s.root)
    assert first == t.children(t.root)[0]
    assert s.cost == 1
    assert s.next_child(s.root) == t.children(t.root)[1]
    assert s.next_child(s.root) is None
    assert s.cost == 2
    assert s.next_child(first) is None
    assert s.cost == 2


def test_next_child_requires_explored_node():
    s = ExplorationSession(gen_mh(2))
    with pytest.raises(NotExploredError):
        s.next_child(3)


def test_random_child_frequency():
    t = gen_mh(1)
    s = ExplorationSession(t, seed=12345)
    left = t.children(t.root)[0]
    draws = [s.random_child(s.root) for _ in range(10_000)]
    assert 0.47 <= draws.count(left) / len(draws) <= 0.53
    assert s.cost == 2


def test_random_child_on_leaf_and_repeat():
    t = gen_mh(1)
    s = ExplorationSession(t, seed=1)
    c = s.random_child(s.root)
    assert s.random_child(c) is None
    before = s.cost
    while s.random_child(s.root) != c:
        pass
    assert s.cost >= before
    assert s.cost == len(s.explored) - 1


def test_nth_child_uses_next_child_only():
    t = gen_mh(2)
    s = ExplorationSession(t)
    second = s.nth_child(s.root, 1)
    assert second == t.children(t.root)[1]
    assert s.next_index[s.root] == 2
    assert s.nth_child(s.root, 0) == t.children(t.root)[0]
    assert s.nth_child(s.root, 2) is None


def test_depth_and_parent_are_learned():
    s = ExplorationSession(iso_shuffle(gen_mh(5), 9), seed=4)
    leaf = random_walk(s, s.root)
    assert s.depth(leaf) == 5
    path = [leaf]
    while s.parent_of(path[-1]) is not None:
        path.append(s.parent_of(path[-1]))
    assert path[-1] == s.root
    assert len(path) == 6


def test_audited_tree_allows_session_calls():
    audited = AuditedTree(gen_mh(4))
    s = ExplorationSession(audited, seed=2)
    bfs_subtree(s, s.root)
    random_walk(s, s.root)
    assert audited.log
    assert s.cost == 30


def test_audited_tree_blocks_direct_access():
    audited = AuditedTree(gen_mh(2))
    ExplorationSession(audited)
    with pytest.raises(AssertionError):
        audited.degree(0)
    with pytest.raises(AssertionError):
        audited.color(3)


def test_seeded_replay_identical():
    t = iso_shuffle(gen_mh(8), 1)

    def run(seed):
        s = ExplorationSession(t, seed)
        rng = random.Random(seed)
        for _ in range(200):
            v = rng.choice(sorted(s.explored))
            (s.next_child if rng.random() < 0.5 else s.random_child)(v)
        return s.cost, sorted(s.explored)

    assert run(5) == run(5)
    assert run(5) != run(6)
