"""Isomorphism search on black-box search trees."""

from isoexplore.generators import (
    OrbitTreeSpec,
    gen_mh,
    gen_noniso_pair,
    gen_orbit_tree,
    gen_pruned_pair,
    iso_shuffle,
)
from isoexplore.oracle import ahu_code, constrained_iso, trees_isomorphic, verify_axiom
from isoexplore.strategies import (
    MCParams,
    Verdict,
    VerdictKind,
    deterministic_baseline,
    lv_iso,
    mc_bidirectional,
    mc_budgeted,
)
from isoexplore.tree import ExplorationSession, SearchTree, load_tree, new_sessions, save_tree

__all__ = [
    "ExplorationSession",
    "MCParams",
    "OrbitTreeSpec",
    "SearchTree",
    "Verdict",
    "VerdictKind",
    "ahu_code",
    "constrained_iso",
    "deterministic_baseline",
    "gen_mh",
    "gen_noniso_pair",
    "gen_orbit_tree",
    "gen_pruned_pair",
    "iso_shuffle",
    "load_tree",
    "lv_iso",
    "mc_bidirectional",
    "mc_budgeted",
    "new_sessions",
    "save_tree",
    "trees_isomorphic",
    "verify_axiom",
]
