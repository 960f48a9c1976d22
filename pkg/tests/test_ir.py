from __future__ import annotations

import random
from collections import Counter

import pytest

from isoexplore.ir import (
    RIGID6,
    Graph,
    GraphFormatError,
    LeafInterner,
    color_refine,
    complete_graph,
    corpus,
    cycle_graph,
    disjoint_union,
    format_graph,
    graph_aut_order,
    individualize,
    ir_tree,
    parse_graph,
    path_graph,
    star_graph,
)
from isoexplore.oracle import verify_axiom
from isoexplore.strategies import lv_iso, mc_budgeted, MCParams
from isoexplore.tree import ExplorationSession, ResourceLimitError, new_sessions


def leaf_colors(g: Graph, interner: LeafInterner | None = None) -> Counter:
    return Counter(ir_tree(g, interner).materialize().leaf_colors())


def test_parse_k2_and_c4():
    g = parse_graph("c a single edge\np edge 2 1\ne 1 2\n")
    assert g == complete_graph(2)
    c4 = parse_graph("p edge 4 4\ne 1 2\ne 2 3\ne 3 4\ne 4 1\n")
    assert c4 == cycle_graph(4)
    assert parse_graph(format_graph(c4)) == c4


@pytest.mark.parametrize(
    "text, message",
    [
        ("p edge 2 1\ne 1 1\n", "self-loop"),
        ("p edge 2 2\ne 1 2\ne 2 1\n", "duplicate"),
        ("p edge 2 1\ne 1 3\n", "out of range"),
        ("e 1 2\n", "before header"),
        ("c nothing\n", "missing"),
        ("p edge 3 2\ne 1 2\n", "announces"),
        ("p edge x 1\n", "non-integer"),
        ("p edge 2 1\nq 1 2\n", "unknown"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(GraphFormatError, match=message):
        parse_graph(text)


def test_color_refine_examples():
    assert color_refine(cycle_graph(4)) == (0, 0, 0, 0)
    p4 = color_refine(path_graph(4))
    assert p4[0] == p4[3] != p4[1] == p4[2]
    assert len(set(p4)) == 2
    k2 = complete_graph(2)
    assert sorted(color_refine(k2, individualize(color_refine(k2), 0))) == [0, 1]


def test_color_refine_is_label_invariant():
    g = Graph.from_edges(7, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (4, 5), (5, 6)])
    perm = [3, 6, 0, 5, 1, 4, 2]
    h = g.relabel(perm)
    cg, ch = color_refine(g), color_refine(h)
    assert all(cg[v] == ch[perm[v]] for v in range(7))


def test_individualized_vertex_comes_first():
    colors = individualize((0, 0, 1), 1)
    assert colors == (1, 0, 2)


def test_ir_tree_k2():
    t = ir_tree(complete_graph(2)).materialize()
    assert t.degree(t.root) == 2
    assert all(t.is_leaf(c) for c in t.children(t.root))
    assert Counter(t.leaf_colors()) == Counter({t.leaf_colors()[0]: 2})


def test_ir_tree_c4():
    t = ir_tree(cycle_graph(4)).materialize()
    assert t.degree(t.root) == 4
    assert all(t.degree(c) == 2 for c in t.children(t.root))
    assert len(set(t.leaf_colors())) == 1 and len(t.leaves()) == 8


def test_rigid_graph_is_single_leaf():
    assert len(set(color_refine(RIGID6))) == 6
    t = ir_tree(RIGID6).materialize()
    assert len(t) == 1
    assert graph_aut_order(RIGID6) == 1


def test_aut_orders():
    assert graph_aut_order(complete_graph(2)) == 2
    assert graph_aut_order(cycle_graph(5)) == 10
    assert graph_aut_order(path_graph(4)) == 2
    assert graph_aut_order(star_graph(3)) == 6
    assert graph_aut_order(cycle_graph(6)) == 12
    assert graph_aut_order(disjoint_union(complete_graph(3), complete_graph(3))) == 72


def test_occurrence_law_small_graphs():
    rng = random.Random(5)
    graphs = list(corpus().values())
    for _ in range(40):
        n = rng.randint(2, 7)
        graphs.append(Graph.from_edges(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.4]))
    for g in graphs:
        aut = graph_aut_order(g)
        assert set(leaf_colors(g).values()) == {aut}


def test_axiom_on_ir_trees():
    for g in corpus().values():
        assert verify_axiom(ir_tree(g).materialize()).ok


def test_relabeled_graphs_share_leaf_colors():
    rng = random.Random(11)
    for g in corpus().values():
        perm = list(range(g.n))
        rng.shuffle(perm)
        interner = LeafInterner()
        assert leaf_colors(g, interner) == leaf_colors(g.relabel(perm), interner)


def test_c6_and_two_triangles_disjoint():
    interner = LeafInterner()
    a = leaf_colors(cycle_graph(6), interner)
    b = leaf_colors(disjoint_union(complete_graph(3), complete_graph(3)), interner)
    assert color_refine(cycle_graph(6)) == color_refine(disjoint_union(complete_graph(3), complete_graph(3)))
    assert not set(a) & set(b)


def test_no_unary_nodes():
    for g in [cycle_graph(6), star_graph(4), disjoint_union(path_graph(3), path_graph(3))]:
        t = ir_tree(g).materialize()
        assert all(t.degree(v) != 1 for v in t.nodes())


def test_size_cap():
    with pytest.raises(ResourceLimitError):
        ir_tree(cycle_graph(11))
    with pytest.raises(ResourceLimitError):
        graph_aut_order(cycle_graph(11))


def test_sessions_run_on_lazy_ir_trees():
    g = cycle_graph(7)
    perm = [4, 0, 6, 2, 5, 1, 3]
    interner = LeafInterner()
    t1, t2 = ir_tree(g, interner), ir_tree(g.relabel(perm), interner)
    s1, s2 = new_sessions(t1, t2, 3)
    v = lv_iso(s1, s2, 3)
    assert v.found and s1.color(v.l1) == s2.color(v.l2)
    s = ExplorationSession(ir_tree(g, interner), 1)
    assert s.degree(s.root) == 7
    v = mc_budgeted(*new_sessions(ir_tree(cycle_graph(7), interner), ir_tree(g.relabel(perm), interner), 5),
                    MCParams(0.125))
    assert v.found
