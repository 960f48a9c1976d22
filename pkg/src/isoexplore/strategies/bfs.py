"""Breadth-first subtree exploration with a height limit and a cost limit."""

from __future__ import annotations

from collections import deque

from isoexplore.tree import ExplorationSession


class BfsWalker:
    """Incremental BFS below ``v``; ``step()`` visits exactly one child.

    ``count`` is the number of child visits so far (the start node is not
    counted). Nodes at relative depth ``height`` are not expanded. Exhausted
    queue entries are dropped eagerly so ``done`` is exact after every step.
    """

    def __init__(self, session: ExplorationSession, v, height: int | None = None) -> None:
        self.session = session
        self.start = v
        self.height = height
        self.count = 0
        self.leaves: list = []
        self._queue: deque = deque()
        self._cur = None
        self._cur_depth = 0
        self._idx = 0
        if height == 0 or session.degree(v) == 0:
            self.leaves.append(v)
        else:
            self._queue.append((v, 0))
        self._settle()

    def _settle(self) -> None:
        s = self.session
        while self._cur is None or self._idx >= s.degree(self._cur):
            if not self._queue:
                self._cur = None
                return
            self._cur, self._cur_depth = self._queue.popleft()
            self._idx = 0

    @property
    def done(self) -> bool:
        return self._cur is None

    def step(self):
        """Visit the next child in BFS order and return it."""
        if self._cur is None:
            raise RuntimeError("BFS already complete")
        s = self.session
        c = s.nth_child(self._cur, self._idx)
        self._idx += 1
        self.count += 1
        depth = self._cur_depth + 1
        if s.degree(c) == 0 or depth == self.height:
            self.leaves.append(c)
        else:
            self._queue.append((c, depth))
        self._settle()
        return c


def bfs_subtree(session: ExplorationSession, v, h: int | None = None, s: int | None = None):
    """Leaves of the subtree under ``v`` down to relative level ``h``.

    Returns ``(leaves, explored_count)``, or ``(None, None)`` when more than
    ``s`` child visits would be needed. ``None`` limits are unbounded. The
    limit is checked before a visit, so an over-limit BFS does not pay for
    the node that would have broken it.
    """
    if h == 0:
        return [v], 0
    walker = BfsWalker(session, v, h)
    while not walker.done:
        if s is not None and walker.count >= s:
            return None, None
        walker.step()
    return walker.leaves, walker.count
