"""Command line entry point: ``isoexplore <command> ...``.

Exit status is 0 on success, 2 when a check or experiment threshold fails,
and 1 on bad input.
"""

from __future__ import annotations

import argparse
import sys

from isoexplore import bench, ir
from isoexplore.generators import OrbitTreeSpec, gen_mh, gen_orbit_tree, iso_shuffle
from isoexplore.oracle import verify_axiom
from isoexplore.tree import ResourceLimitError, TreeFormatError, metrics, read_tree, save_tree

EXIT_OK, EXIT_ERROR, EXIT_BREACH = 0, 1, 2


def _common(parser: argparse.ArgumentParser, *, suppress: bool) -> None:
    # subcommands accept the global flags too, without overriding them
    hide = argparse.SUPPRESS
    parser.add_argument("--seed", type=int, default=hide if suppress else 0, help="base seed")
    parser.add_argument("--trials", type=int, default=hide if suppress else None, help="trial count")
    parser.add_argument("--out", default=hide if suppress else None, help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="isoexplore", description=__doc__.splitlines()[0])
    _common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a tree in the text tree format")
    gen.add_argument("family", choices=("mh", "mh-shuffled", "orbit", *bench.FAMILIES))
    gen.add_argument("--h", type=int, default=4)
    gen.add_argument("--size", type=int, default=300, help="target size for orbit trees")
    gen.add_argument("--which", type=int, choices=(1, 2), default=1, help="tree of a pair family")
    _common(gen, suppress=True)

    va = sub.add_parser("verify-axiom", help="check the invariance axiom on one or two trees")
    va.add_argument("tree1")
    va.add_argument("tree2", nargs="?")
    _common(va, suppress=True)

    run = sub.add_parser("run", help="run one strategy on a pair of trees, print a CSV row")
    run.add_argument("--strategy", choices=bench.STRATEGIES, default="mc")
    run.add_argument("--epsilon", type=float, default=0.125)
    run.add_argument("--tree1", required=True)
    run.add_argument("--tree2", required=True)
    _common(run, suppress=True)

    b = sub.add_parser("bench", help="run a seeded experiment and write its CSV table")
    b.add_argument("experiment", choices=bench.EXPERIMENTS)
    b.add_argument("--family", choices=bench.FAMILIES, default="mh-iso")
    b.add_argument("--strategy", choices=bench.STRATEGIES, default="mc")
    b.add_argument("--h", type=int, nargs="+", default=[10], help="one or more heights")
    b.add_argument("--epsilon", type=float, default=0.125)
    b.add_argument("--size", type=int, default=300)
    b.add_argument("--prune-prob", type=float, default=0.3)
    _common(b, suppress=True)

    irt = sub.add_parser("ir-tree", help="materialize the IR tree of a graph file")
    irt.add_argument("graph")
    _common(irt, suppress=True)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_gen(args) -> int:
    if args.family == "mh":
        tree = gen_mh(args.h)
    elif args.family == "mh-shuffled":
        tree = iso_shuffle(gen_mh(args.h), args.seed)
    elif args.family == "orbit":
        tree = gen_orbit_tree(OrbitTreeSpec(args.size), args.seed)
    else:
        pair = bench.make_instance(args.family, args.h, args.seed, size=args.size)
        tree = pair[args.which - 1]
    _emit(save_tree(tree), args.out)
    return EXIT_OK


def _cmd_verify(args) -> int:
    t1 = read_tree(args.tree1)
    t2 = read_tree(args.tree2) if args.tree2 else None
    report = verify_axiom(t1, t2)
    lines = [f"checked_pairs={report.checked_pairs}", f"violations={len(report.violations)}"]
    lines += [f"violation tree{a} leaf {la} ~ tree{b} leaf {lb}" for a, la, b, lb in report.violations]
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if report.ok else EXIT_BREACH


def _cmd_run(args) -> int:
    t1, t2 = read_tree(args.tree1), read_tree(args.tree2)
    verdict = bench.run_strategy(args.strategy, t1, t2, args.seed, args.epsilon)
    n, big, d = bench._shape(t1, t2)
    rec = bench.TrialRecord(0, args.seed, metrics(t1).height, n, big, d, verdict.kind.value,
                            verdict.cost1, verdict.cost2, int(verdict.stats.get("restarts", 0)))
    result = bench.ExperimentResult(None, [rec])
    _emit(result.csv_text(), args.out)
    return EXIT_OK


def _cmd_bench(args) -> int:
    cfg = bench.ExperimentConfig(
        experiment=args.experiment, family=args.family, heights=tuple(args.h), strategy=args.strategy,
        epsilon=args.epsilon, trials=args.trials or 100, base_seed=args.seed, size=args.size,
        prune_prob=args.prune_prob, out=args.out,
    )
    result = bench.run_experiment(cfg)
    # the table goes to stdout unless --out is given; the summary then takes its place
    summary_stream = sys.stdout if args.out else sys.stderr
    if not args.out:
        sys.stdout.write(result.csv_text())
    for key, value in result.summary.items():
        print(f"# {key}={value}", file=summary_stream)
    print(f"# result={'pass' if result.passed else 'FAIL'}", file=summary_stream)
    return EXIT_OK if result.passed else EXIT_BREACH


def _cmd_ir_tree(args) -> int:
    with open(args.graph, encoding="utf-8") as fh:
        g = ir.parse_graph(fh.read())
    _emit(save_tree(ir.ir_tree(g).materialize()), args.out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler = {
        "gen": _cmd_gen,
        "verify-axiom": _cmd_verify,
        "run": _cmd_run,
        "bench": _cmd_bench,
        "ir-tree": _cmd_ir_tree,
    }[args.command]
    try:
        return handler(args)
    except (TreeFormatError, ir.GraphFormatError, ResourceLimitError, ValueError, OSError) as exc:
        print(f"isoexplore: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
