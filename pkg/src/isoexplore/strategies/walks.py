from __future__ import annotations

from isoexplore.tree import ExplorationSession


def random_walk(session: ExplorationSession, v):
    """Descend by uniformly random children until a leaf is reached."""
    while session.degree(v) != 0:
        v = session.random_child(v)
    return v


def capped_walk(session: ExplorationSession, v, cap: int):
    """Like ``random_walk`` but gives up (returns None) after ``cap`` steps.

    Nodes explored by an aborted walk stay explored and stay paid for.
    """
    steps = 0
    while session.degree(v) != 0:
        if steps >= cap:
            return None
        v = session.random_child(v)
        steps += 1
    return v


def leftmost_walk(session: ExplorationSession, v, cap: int | None = None):
    """Deterministic descent through rank-0 children."""
    steps = 0
    while session.degree(v) != 0:
        if cap is not None and steps >= cap:
            return None
        v = session.nth_child(v, 0)
        steps += 1
    return v
