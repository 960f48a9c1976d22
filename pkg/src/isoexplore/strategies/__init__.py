from isoexplore.strategies.baseline import deterministic_baseline
from isoexplore.strategies.bfs import BfsWalker, bfs_subtree
from isoexplore.strategies.lasvegas import (
    Split,
    SplitCost,
    SplitSearch,
    balance_bound,
    bidirectional_with_split,
    is_balanced,
    lv_balanced_splits,
    lv_iso,
    split_cost,
)
from isoexplore.strategies.montecarlo import MCParams, mc_bidirectional, mc_budgeted
from isoexplore.strategies.verdict import Verdict, VerdictKind
from isoexplore.strategies.walks import capped_walk, leftmost_walk, random_walk

__all__ = [
    "BfsWalker",
    "MCParams",
    "Split",
    "SplitCost",
    "SplitSearch",
    "Verdict",
    "VerdictKind",
    "balance_bound",
    "bfs_subtree",
    "bidirectional_with_split",
    "capped_walk",
    "deterministic_baseline",
    "is_balanced",
    "leftmost_walk",
    "lv_balanced_splits",
    "lv_iso",
    "mc_bidirectional",
    "mc_budgeted",
    "random_walk",
    "split_cost",
]
