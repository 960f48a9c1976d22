from __future__ import annotations

import enum
from dataclasses import dataclass, field

from isoexplore.tree import ExplorationSession


class VerdictKind(enum.Enum):
    MATCH = "match"
    NOT_ISOMORPHIC = "noniso"
    PROBABLY_NOT_ISOMORPHIC = "probably-noniso"


@dataclass
class Verdict:
    kind: VerdictKind
    cost1: int
    cost2: int
    l1: object = None
    l2: object = None
    stats: dict = field(default_factory=dict)

    @classmethod
    def match(cls, s1: ExplorationSession, s2: ExplorationSession, l1, l2, **stats) -> Verdict:
        c1, c2 = s1.color(l1), s2.color(l2)
        if c1 is None or c1 != c2:
            raise AssertionError(f"match with unequal colors {c1!r} != {c2!r}")
        return cls(VerdictKind.MATCH, s1.cost, s2.cost, l1, l2, stats)

    @classmethod
    def not_isomorphic(cls, s1: ExplorationSession, s2: ExplorationSession, **stats) -> Verdict:
        return cls(VerdictKind.NOT_ISOMORPHIC, s1.cost, s2.cost, stats=stats)

    @classmethod
    def probably_not(cls, s1: ExplorationSession, s2: ExplorationSession, **stats) -> Verdict:
        return cls(VerdictKind.PROBABLY_NOT_ISOMORPHIC, s1.cost, s2.cost, stats=stats)

    @property
    def found(self) -> bool:
        return self.kind is VerdictKind.MATCH

    @property
    def total_cost(self) -> int:
        return self.cost1 + self.cost2
