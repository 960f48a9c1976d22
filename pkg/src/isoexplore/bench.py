"""Seeded experiments over instance families, written as CSV tables.

Trial ``i`` of a config uses seed ``base_seed + i``; every random choice in
the trial (instance and strategy) is derived from that seed, so a config
always reproduces the same table.
"""

from __future__ import annotations

import csv
import io
import math
import statistics
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.stats import binomtest

from isoexplore import ir
from isoexplore.generators import (
    OrbitTreeSpec,
    gen_mh,
    gen_noniso_pair,
    gen_orbit_tree,
    gen_pruned_pair,
    iso_shuffle,
    relabel_colors,
)
from isoexplore.seeds import derive_seed
from isoexplore.strategies import (
    MCParams,
    Verdict,
    VerdictKind,
    deterministic_baseline,
    is_balanced,
    lv_balanced_splits,
    lv_iso,
    mc_bidirectional,
    mc_budgeted,
)
from isoexplore.tree import SearchTree, metrics, new_sessions

CSV_HEADER = ["trial", "seed", "h", "n", "N", "d", "verdict", "cost1", "cost2", "restarts", "balanced"]
IR_CSV_HEADER = ["graph", "n", "aut_order", "leaves", "colors", "min_count", "max_count", "pass"]

FAMILIES = (
    "mh-iso", "mh-disjoint", "shape-mismatch", "orbit-iso", "orbit-noniso", "pruned", "pruned-match", "single-leaf",
)
YES_FAMILIES = frozenset({"mh-iso", "orbit-iso", "pruned-match", "single-leaf"})
STRATEGIES = ("mc", "mc-budgeted", "lv", "det")
EXPERIMENTS = ("error_rate", "scaling", "split_probability", "ir_occurrence")

SCALING_WINDOWS = {"det": (0.95, 1.05)}
DEFAULT_SCALING_WINDOW = (0.45, 0.65)
SPLIT_FRACTION_MIN = 0.70


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    family: str = "mh-iso"
    heights: tuple[int, ...] = (10,)
    strategy: str = "mc"
    epsilon: float = 0.125
    trials: int = 100
    base_seed: int = 0
    size: int = 300
    prune_prob: float = 0.3
    out: str | None = None

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not self.heights:
            raise ValueError("at least one height is required")

    def seed(self, trial: int) -> int:
        return self.base_seed + trial


@dataclass
class TrialRecord:
    trial: int
    seed: int
    h: int
    n: int
    N: int
    d: int
    verdict: str
    cost1: int
    cost2: int
    restarts: int
    balanced: str = ""
    expected_iso: bool | None = None

    def row(self) -> list:
        return [self.trial, self.seed, self.h, self.n, self.N, self.d, self.verdict,
                self.cost1, self.cost2, self.restarts, self.balanced]

    @property
    def total_cost(self) -> int:
        return self.cost1 + self.cost2

    @property
    def wrong(self) -> bool:
        """Definite error: a match on a NO instance or a refutation of a YES instance."""
        if self.expected_iso is None:
            return False
        if self.verdict == VerdictKind.MATCH.value:
            return not self.expected_iso
        if self.verdict == VerdictKind.NOT_ISOMORPHIC.value:
            return self.expected_iso
        return False

    @property
    def failed(self) -> bool:
        """Any verdict other than the correct one (includes Monte Carlo misses)."""
        if self.expected_iso is None:
            return False
        return (self.verdict == VerdictKind.MATCH.value) != self.expected_iso


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    passed: bool = True
    header: list = field(default_factory=lambda: list(CSV_HEADER))

    def csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        for rec in self.records:
            writer.writerow(rec.row() if isinstance(rec, TrialRecord) else rec)
        return buf.getvalue()

    def write(self, path: str | None = None) -> None:
        path = path or self.config.out
        if path:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                fh.write(self.csv_text())


# -- instances --------------------------------------------------------------------


@lru_cache(maxsize=8)
def _mh(h: int) -> SearchTree:
    return gen_mh(h)


def _single_leaf() -> SearchTree:
    return SearchTree.from_children([[]], [0])


def _leaf_beside_mh(h: int) -> SearchTree:
    """Root with one leaf child and one M_{h-1} child: differs from M_h at level 1."""
    # colors start past M_h's palette so the pair shares no leaf color
    sub = relabel_colors(_mh(h - 1), 1 << h)
    children = [[1, 2], []] + [[c + 2 for c in sub.children(v)] for v in sub.nodes()]
    colors = [None, (1 << h) + (1 << (h - 1))] + [sub.color(v) for v in sub.nodes()]
    return SearchTree.from_children(children, colors)


def make_instance(family: str, h: int, seed: int, *, size: int = 300, prune_prob: float = 0.3
                  ) -> tuple[SearchTree, SearchTree, bool]:
    """Pair of trees from ``family`` plus whether they are isomorphic."""
    if family == "mh-iso":
        return _mh(h), iso_shuffle(_mh(h), derive_seed(seed, "shuffle")), True
    if family == "mh-disjoint":
        t1, t2 = gen_noniso_pair(h, derive_seed(seed, "pair"))
        return t1, t2, False
    if family == "shape-mismatch":
        if h < 2:
            raise ValueError("shape-mismatch needs h >= 2")
        t2 = iso_shuffle(_leaf_beside_mh(h), derive_seed(seed, "shuffle"))
        return iso_shuffle(_mh(h), derive_seed(seed, "base")), t2, False
    if family in ("orbit-iso", "orbit-noniso"):
        t1 = gen_orbit_tree(OrbitTreeSpec(size), derive_seed(seed, "orbit"))
        t2 = iso_shuffle(t1, derive_seed(seed, "shuffle"))
        if family == "orbit-iso":
            return t1, t2, True
        return t1, relabel_colors(t2, max(t1.leaf_colors()) + 1), False
    if family in ("pruned", "pruned-match"):
        match = family == "pruned-match"
        t1, t2 = gen_pruned_pair(h, prune_prob, derive_seed(seed, "pruned"), plant_match=match)
        return t1, t2, match
    if family == "single-leaf":
        return _single_leaf(), _single_leaf(), True
    raise ValueError(f"unknown family {family!r}")


def run_strategy(strategy: str, t1, t2, seed: int, epsilon: float = 0.125) -> Verdict:
    s1, s2 = new_sessions(t1, t2, seed)
    if strategy == "mc":
        return mc_bidirectional(s1, s2, MCParams(epsilon))
    if strategy == "mc-budgeted":
        return mc_budgeted(s1, s2, MCParams(epsilon))
    if strategy == "lv":
        return lv_iso(s1, s2, derive_seed(seed, "lv"))
    if strategy == "det":
        return deterministic_baseline(s1, s2)
    raise ValueError(f"unknown strategy {strategy!r}")


def _shape(t1: SearchTree, t2: SearchTree) -> tuple[int, int, int]:
    """(n, N, d): smaller and larger tree size, largest degree."""
    m1, m2 = metrics(t1), metrics(t2)
    return min(m1.size, m2.size), max(m1.size, m2.size), max(m1.max_degree, m2.max_degree)


def run_trial(cfg: ExperimentConfig, trial: int, h: int) -> TrialRecord:
    seed = cfg.seed(trial)
    t1, t2, iso = make_instance(cfg.family, h, seed, size=cfg.size, prune_prob=cfg.prune_prob)
    verdict = run_strategy(cfg.strategy, t1, t2, seed, cfg.epsilon)
    n, big, d = _shape(t1, t2)
    return TrialRecord(trial, seed, h, n, big, d, verdict.kind.value, verdict.cost1, verdict.cost2,
                       int(verdict.stats.get("restarts", 0)), expected_iso=iso)


# -- experiments ------------------------------------------------------------------


def rate_tolerance(epsilon: float, trials: int) -> float:
    """Allowed failure fraction: epsilon plus three binomial standard deviations."""
    return epsilon + 3 * math.sqrt(epsilon * (1 - epsilon) / trials)


def error_rate_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    h = cfg.heights[0]
    records = [run_trial(cfg, i, h) for i in range(cfg.trials)]
    failures = sum(r.failed for r in records)
    ci = binomtest(failures, cfg.trials).proportion_ci(confidence_level=0.95, method="exact")
    yes = cfg.family in YES_FAMILIES
    limit = rate_tolerance(cfg.epsilon, cfg.trials) if yes and cfg.strategy in ("mc", "mc-budgeted") else 0.0
    fraction = failures / cfg.trials
    summary = dict(failures=failures, trials=cfg.trials, failure_fraction=fraction,
                   ci_low=ci.low, ci_high=ci.high, limit=limit,
                   wrong=sum(r.wrong for r in records))
    return ExperimentResult(cfg, records, summary, passed=fraction <= limit)


def fit_exponent(sizes, costs) -> float | None:
    """Least-squares slope of log(cost) against log(size); None for a single point."""
    if len(set(sizes)) < 2:
        return None
    slope, _ = np.polyfit(np.log(np.asarray(sizes, dtype=float)), np.log(np.asarray(costs, dtype=float)), 1)
    return float(slope)


def scaling_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    records: list[TrialRecord] = []
    per_h: dict[int, list[int]] = {}
    sizes: list[int] = []
    for k, h in enumerate(cfg.heights):
        batch = [run_trial(cfg, k * cfg.trials + i, h) for i in range(cfg.trials)]
        records.extend(batch)
        per_h[h] = [r.total_cost for r in batch]
        sizes.append(batch[0].n)
    means = [statistics.fmean(per_h[h]) for h in cfg.heights]
    medians = [statistics.median(per_h[h]) for h in cfg.heights]
    exponent = fit_exponent(sizes, means)
    lo, hi = SCALING_WINDOWS.get(cfg.strategy, DEFAULT_SCALING_WINDOW)
    summary = dict(
        exponent="n/a" if exponent is None else exponent,
        median_exponent="n/a" if exponent is None else fit_exponent(sizes, medians),
        window=(lo, hi),
        **{f"mean_h{h}": m for h, m in zip(cfg.heights, means)},
        **{f"median_h{h}": m for h, m in zip(cfg.heights, medians)},
    )
    passed = exponent is None or lo <= exponent <= hi
    return ExperimentResult(cfg, records, summary, passed=passed)


def split_probability_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    h = cfg.heights[0]
    records: list[TrialRecord] = []
    counted = balanced = within_budget = 0
    for i in range(cfg.trials):
        seed = cfg.seed(i)
        t1, t2, iso = make_instance(cfg.family, h, seed, size=cfg.size, prune_prob=cfg.prune_prob)
        s1, s2 = new_sessions(t1, t2, seed)
        search = lv_balanced_splits(s1, s2, derive_seed(seed, "split"))
        n, big, d = _shape(t1, t2)
        flag = ""
        if search.split is None:
            kind = VerdictKind.NOT_ISOMORPHIC.value
        else:
            kind = "split"
            counted += 1
            ok = is_balanced(t1, t2, search.split)
            balanced += ok
            flag = "1" if ok else "0"
            within_budget += search.ball_size <= search.budget and search.subtree_size <= search.budget
        records.append(TrialRecord(i, seed, h, n, big, d, kind, s1.cost, s2.cost, search.rounds,
                                   flag, expected_iso=iso))
    fraction = balanced / counted if counted else None
    summary = dict(splits=counted, balanced=balanced,
                   fraction="n/a" if fraction is None else fraction,
                   within_budget=within_budget, limit=SPLIT_FRACTION_MIN)
    passed = within_budget == counted and (fraction is None or fraction >= SPLIT_FRACTION_MIN)
    return ExperimentResult(cfg, records, summary, passed=passed)


def ir_occurrence_experiment(cfg: ExperimentConfig, graphs: dict[str, ir.Graph] | None = None) -> ExperimentResult:
    graphs = ir.corpus() if graphs is None else graphs
    rows = []
    all_ok = True
    for name, g in graphs.items():
        tree = ir.ir_tree(g).materialize()
        counts = Counter(tree.leaf_colors())
        aut = ir.graph_aut_order(g)
        ok = set(counts.values()) == {aut}
        all_ok &= ok
        rows.append([name, g.n, aut, sum(counts.values()), len(counts),
                     min(counts.values()), max(counts.values()), int(ok)])
    result = ExperimentResult(cfg, rows, dict(graphs=len(rows), passed=sum(r[-1] for r in rows)),
                              passed=all_ok, header=list(IR_CSV_HEADER))
    return result


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    runner = {
        "error_rate": error_rate_experiment,
        "scaling": scaling_experiment,
        "split_probability": split_probability_experiment,
        "ir_occurrence": ir_occurrence_experiment,
    }[cfg.experiment]
    result = runner(cfg)
    if cfg.out:
        result.write()
    return result
