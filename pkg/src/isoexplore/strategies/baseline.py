from __future__ import annotations

from isoexplore.strategies.bfs import BfsWalker
from isoexplore.strategies.verdict import Verdict
from isoexplore.tree import ExplorationSession


def deterministic_baseline(s1: ExplorationSession, s2: ExplorationSession) -> Verdict:
    """Alternate single BFS child visits between the trees until two leaves collide.

    Once one tree is exhausted its full color set is known. The other tree is
    then explored until either it reveals a leaf (whose color is necessarily
    foreign, hence non-isomorphic) or it outgrows the exhausted tree.
    """
    sessions = (s1, s2)
    seen: tuple[dict, dict] = ({}, {})
    walkers = (BfsWalker(s1, s1.root), BfsWalker(s2, s2.root))

    def record(i: int, v):
        col = sessions[i].color(v)
        if col is None:
            return None
        hit = seen[1 - i].get(col)
        if hit is not None:
            return (v, hit) if i == 0 else (hit, v)
        seen[i].setdefault(col, v)
        return None

    for i in (0, 1):
        pair = record(i, sessions[i].root)
        if pair is not None:
            return Verdict.match(s1, s2, *pair, steps=0)

    steps = 0
    turn = 0
    while not (walkers[0].done or walkers[1].done):
        pair = record(turn, walkers[turn].step())
        steps += 1
        if pair is not None:
            return Verdict.match(s1, s2, *pair, steps=steps)
        turn = 1 - turn

    full = 0 if walkers[0].done else 1
    rest = 1 - full
    full_size = len(sessions[full].explored)
    while seen[rest] == {} and len(sessions[rest].explored) <= full_size and not walkers[rest].done:
        pair = record(rest, walkers[rest].step())
        steps += 1
        if pair is not None:
            return Verdict.match(s1, s2, *pair, steps=steps)
    return Verdict.not_isomorphic(s1, s2, steps=steps, exhausted=full + 1)
