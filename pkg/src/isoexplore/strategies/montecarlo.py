"""Probabilistic bidirectional search: random root-to-leaf walks in both
trees until a cross-tree color collision, or until enough same-tree
repeats make a match unlikely."""

from __future__ import annotations

import math
from dataclasses import dataclass

from isoexplore.seeds import derive_seed
from isoexplore.strategies.verdict import Verdict
from isoexplore.strategies.walks import capped_walk, random_walk
from isoexplore.tree import ExplorationSession


@dataclass(frozen=True)
class MCParams:
    epsilon: float = 0.125
    walk_cap_c: float = 4.0
    seed: int | None = None

    def __post_init__(self) -> None:
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.walk_cap_c < 1:
            raise ValueError("walk_cap_c must be at least 1")

    @property
    def e(self) -> int:
        return max(1, math.ceil(-math.log2(self.epsilon)))


def _reseed(params: MCParams, s1: ExplorationSession, s2: ExplorationSession) -> None:
    if params.seed is not None:
        s1.reseed(derive_seed(params.seed, 1))
        s2.reseed(derive_seed(params.seed, 2))


class _LeafSets:
    """The two sampled-leaf sets, keyed by color.

    A leaf is only stored when its color is new to its own set, so each set
    holds at most one leaf per color.
    """

    def __init__(self, s1: ExplorationSession, s2: ExplorationSession) -> None:
        self.s1, self.s2 = s1, s2
        self.L1: dict[int, object] = {}
        self.L2: dict[int, object] = {}

    def test(self, l1, l2):
        """One iteration's comparisons. Returns (match pair or None, automorphism seen)."""
        c1 = None if l1 is None else self.s1.color(l1)
        c2 = None if l2 is None else self.s2.color(l2)
        if l1 is not None and l2 is not None and c1 == c2:
            return (l1, l2), False
        if l1 is not None and c1 in self.L2:
            return (l1, self.L2[c1]), False
        if l2 is not None and c2 in self.L1:
            return (self.L1[c2], l2), False
        aut1 = l1 is not None and c1 in self.L1
        aut2 = l2 is not None and c2 in self.L2
        if l1 is not None and not aut1:
            self.L1[c1] = l1
        if l2 is not None and not aut2:
            self.L2[c2] = l2
        return None, aut1 or aut2


def mc_bidirectional(s1: ExplorationSession, s2: ExplorationSession, params: MCParams) -> Verdict:
    """Unbudgeted version: full random walks, stop after ``e + 1`` automorphism-only tests."""
    _reseed(params, s1, s2)
    e = params.e
    sets = _LeafSets(s1, s2)
    c = 0
    iterations = 0
    while c <= e:
        iterations += 1
        l1 = random_walk(s1, s1.root)
        l2 = random_walk(s2, s2.root)
        pair, aut = sets.test(l1, l2)
        if pair is not None:
            return Verdict.match(s1, s2, *pair, iterations=iterations, automorphisms=c)
        if aut:
            c += 1
    return Verdict.probably_not(s1, s2, iterations=iterations, automorphisms=c)


def mc_budgeted(
    s1: ExplorationSession, s2: ExplorationSession, params: MCParams, *, max_rounds: int = 60
) -> Verdict:
    """Doubling-budget version.

    Round ``k`` allows ``s = 2**k`` walks per tree, each abandoned after
    ``walk_cap_c * log2(s)`` steps. A round that runs out of walks restarts
    with ``2s`` and fresh leaf sets; explored nodes stay explored.
    """
    _reseed(params, s1, s2)
    e = params.e
    budgets: list[int] = []
    iterations = 0
    aborted = 0
    s = 2
    for _ in range(max_rounds):
        budgets.append(s)
        cap = math.ceil(params.walk_cap_c * math.log2(s))
        sets = _LeafSets(s1, s2)
        c = 0
        for _ in range(s):
            iterations += 1
            l1 = capped_walk(s1, s1.root, cap)
            l2 = capped_walk(s2, s2.root, cap)
            aborted += (l1 is None) + (l2 is None)
            pair, aut = sets.test(l1, l2)
            stats = dict(budgets=budgets, rounds=len(budgets), restarts=len(budgets) - 1,
                         iterations=iterations, aborted_walks=aborted)
            if pair is not None:
                return Verdict.match(s1, s2, *pair, **stats)
            if aut:
                c += 1
                if c > e:
                    return Verdict.probably_not(s1, s2, **stats)
        s *= 2
    raise RuntimeError(f"no verdict after {max_rounds} doubling rounds")
