"""Command-line front end.

    ponavail generate --scenario first --r 0.01 --seed 7 --out net.json
    ponavail eval net.json
    ponavail oracle small.json
    ponavail sweep --out data/            # all 874 populations
    ponavail sweep --scenario first --quick
    ponavail analytic
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence, TextIO

from . import analytic, engine, oracle
from .generator import GeneratorParams, Scenario, generate, onu_census
from .model import TABLE_I, AvailabilityTable, NodeKind, PonTree, validate
from .montecarlo import (
    DEFAULT_SAMPLE_SIZE,
    RSE_LIMIT,
    SampleStats,
    sweep_scenario1,
    sweep_scenario2,
)

QUICK_SAMPLE_SIZE = 10

log = logging.getLogger("ponavail")


class CliError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:.9g}"


def load_table(path: str | None) -> AvailabilityTable:
    if path is None:
        return TABLE_I
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(f"cannot read availability table: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise CliError(f"{path}: expected an object of availability entries")
    try:
        return AvailabilityTable.from_mapping(data)
    except (TypeError, ValueError) as exc:
        raise CliError(f"{path}: {exc}") from exc


def load_topology(path: str, table: AvailabilityTable) -> PonTree:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read topology: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        line = text.splitlines()[exc.lineno - 1] if exc.lineno <= len(text.splitlines()) else ""
        raise CliError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {line.strip()}") from exc
    try:
        tree = PonTree.from_dict(data, table)
    except ValueError as exc:
        raise CliError(f"{path}: {exc}") from exc
    report = validate(tree)
    if not report.ok:
        lines = "\n".join(f"    {v}" for v in report.violations)
        raise CliError(f"{path}: invalid topology\n{lines}")
    return tree


@dataclass
class RunConfig:
    """Everything that determines the content of a sweep's data files."""

    command: str
    scenario: str
    g: int
    s: float
    samples: int
    seed: int
    table: dict[str, float] = field(default_factory=dict)

    def header(self) -> str:
        return "# ponavail " + json.dumps(asdict(self), sort_keys=True)


def write_data(path: Path, config: RunConfig, columns: Sequence[str], rows: Sequence[Sequence[float]]) -> None:
    lines = [config.header(), "# " + " ".join(columns)]
    lines += [" ".join(fmt(v) if isinstance(v, float) else str(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _stats_cols(st: SampleStats) -> list[float | int]:
    return [st.mean, st.std, st.rse, st.n, st.rse_unavailability]


STATS_COLUMNS = ["mean", "std", "rse", "n", "rse_unavail"]


# commands ---------------------------------------------------------------


def cmd_generate(args: argparse.Namespace, out: TextIO) -> int:
    table = load_table(args.table)
    try:
        params = GeneratorParams(args.g, args.s, args.r, args.q, Scenario(args.scenario), args.seed)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    tree = generate(params, table)
    text = tree.to_json(indent=1)
    census = onu_census(tree)
    summary = (
        f"ONUs {census.total} (IC {census.ic}, NIC {census.nic}); "
        f"per stage {census.per_stage[0]} {census.per_stage[1]} {census.per_stage[2]}; "
        f"RNs {sum(1 for n in tree.nodes if n.kind.is_rn)} "
        f"(active {sum(1 for n in tree.nodes if n.kind is NodeKind.ACTIVE_RN)})"
    )
    if args.out:
        try:
            Path(args.out).write_text(text + "\n")
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc}") from exc
        print(summary, file=out)
    else:
        print(text, file=out)
        print(summary, file=sys.stderr)
    return 0


def cmd_eval(args: argparse.Namespace, out: TextIO) -> int:
    table = load_table(args.table)
    tree = load_topology(args.topology, table)
    sa = engine.all_onu_availabilities(tree, table)
    if not sa:
        raise CliError("network has no ONUs")
    mean = math.fsum(sa.values()) / len(sa)
    print(f"onus {len(sa)}", file=out)
    print(f"mean_sa {fmt(mean)}", file=out)
    print(f"downtime_hours_per_year {engine.annual_downtime_hours(min(mean, 1.0)):.4g}", file=out)
    by_stage: dict[int, list[float]] = {}
    for onu, v in sa.items():
        by_stage.setdefault(tree.rn_depth(onu), []).append(v)
    for depth in sorted(by_stage):
        vals = by_stage[depth]
        print(f"stage {depth} onus {len(vals)} mean_sa {fmt(math.fsum(vals) / len(vals))}", file=out)
    if args.per_onu:
        print("# onu ic sa", file=out)
        for onu, v in sa.items():
            print(f"{onu} {int(tree.is_ic(onu))} {fmt(v)}", file=out)
    return 0


def cmd_oracle(args: argparse.Namespace, out: TextIO) -> int:
    table = load_table(args.table)
    tree = load_topology(args.topology, table)
    size = len(tree.nodes) + len(tree.fibers)
    if size > args.max_components:
        raise CliError(str(oracle.NetworkTooLarge(size, args.max_components)))
    print("# onu ic engine oracle abs_diff", file=out)
    worst = 0.0
    for onu in tree.onus():
        e = engine.service_availability(tree, onu, table)
        o = oracle.availability(tree, onu, table, args.max_components)
        worst = max(worst, abs(e - o))
        print(f"{onu} {int(tree.is_ic(onu))} {e:.17g} {o:.17g} {abs(e - o):.3g}", file=out)
    print(f"max_abs_diff {worst:.3g}", file=out)
    return 0


def cmd_sweep(args: argparse.Namespace, out: TextIO) -> int:
    table = load_table(args.table)
    samples = args.samples if args.samples is not None else (QUICK_SAMPLE_SIZE if args.quick else DEFAULT_SAMPLE_SIZE)
    which = args.scenario
    outdir = Path(args.out or ".")
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create {outdir}: {exc}") from exc
    overrides = {k: v for k, v in table.to_dict().items() if v != TABLE_I.to_dict()[k]}
    config = RunConfig("sweep", which, args.g, args.s, samples, args.seed, overrides)
    written = []
    worst = 0.0

    if which in ("all", "first", "traditional"):
        rows = sweep_scenario1(args.seed, samples, table, args.workers, args.g, args.s)
        for series, name in ((Scenario.FIRST, "scenario1_first.txt"), (Scenario.TRADITIONAL, "scenario1_traditional.txt")):
            data = [[r.r, *_stats_cols(r.stats)] for r in rows if r.series is series]
            write_data(outdir / name, config, ["r", *STATS_COLUMNS], data)
            written.append(name)
        worst = max(worst, max(r.stats.rse for r in rows))
    if which in ("all", "second"):
        rows2 = sweep_scenario2(args.seed, samples, table, args.workers, args.g, args.s)
        write_data(outdir / "scenario2.txt", config, ["r", "q", *STATS_COLUMNS], [[r.r, r.q, *_stats_cols(r.stats)] for r in rows2])
        write_data(
            outdir / "scenario2_r0.txt",
            config,
            ["q", *STATS_COLUMNS],
            [[r.q, *_stats_cols(r.stats)] for r in rows2 if r.r == 0.0],
        )
        written += ["scenario2.txt", "scenario2_r0.txt"]
        worst = max(worst, max(r.stats.rse for r in rows2))

    for name in written:
        print(f"wrote {outdir / name}", file=out)
    print(f"max_rse {worst:.3g} ({'below' if worst < RSE_LIMIT else 'NOT below'} {RSE_LIMIT:.0%})", file=out)
    return 0


def cmd_analytic(args: argparse.Namespace, out: TextIO) -> int:
    table = load_table(args.table)
    try:
        counts = analytic.expected_stage_counts(args.g, args.s)
        n = analytic.expected_onu_count(args.g, args.s)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    p, a = NodeKind.PASSIVE_RN, NodeKind.ACTIVE_RN
    print(f"expected_onus {fmt(n)}", file=out)
    print(f"stage_counts {fmt(counts.n1)} {fmt(counts.n2)} {fmt(counts.n3)}", file=out)
    for label, types in (("traditional", (p, p, p)), ("first", (p, a, p))):
        sa = analytic.analytic_mean_sa_no_ic(table, args.g, args.s, types)
        print(f"{label}_r0_mean_sa {fmt(sa)} downtime_hours {engine.annual_downtime_hours(sa):.4g}", file=out)
    return 0


# parser ---------------------------------------------------------------


def _add_shape(p: argparse.ArgumentParser) -> None:
    p.add_argument("--g", type=int, default=32, help="splitting ratio 1:g (default 32)")
    p.add_argument("--s", type=float, default=0.3, help="probability a port leads to a further RN (default 0.3)")


def _add_table(p: argparse.ArgumentParser) -> None:
    p.add_argument("--table", metavar="FILE", help="JSON object overriding availability entries")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ponavail", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw one random network and write its topology JSON")
    p.add_argument("--scenario", choices=[s.value for s in Scenario], default="first")
    _add_shape(p)
    p.add_argument("--r", type=float, default=0.0, help="probability an ONU is IC-capable")
    p.add_argument("--q", type=float, default=0.0, help="probability an RN is active (second scenario)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default: stdout)")
    _add_table(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("eval", help="service availability of one topology")
    p.add_argument("topology")
    p.add_argument("--per-onu", action="store_true", help="also list every ONU")
    _add_table(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle", help="compare the engine with brute-force enumeration")
    p.add_argument("topology")
    p.add_argument("--max-components", type=int, default=oracle.DEFAULT_MAX_COMPONENTS)
    _add_table(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep", help="run the population sweeps and write data files")
    p.add_argument("--scenario", choices=["all", *[s.value for s in Scenario]], default="all",
                   help="first/traditional: scenario-1 files; second: scenario-2 files")
    _add_shape(p)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--samples", type=int, help=f"networks per population (default {DEFAULT_SAMPLE_SIZE})")
    p.add_argument("--quick", action="store_true", help=f"use {QUICK_SAMPLE_SIZE} networks per population")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="output directory (default: current)")
    _add_table(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("analytic", help="closed-form ONU count and r = 0 mean SA")
    _add_shape(p)
    _add_table(p)
    p.set_defaults(func=cmd_analytic)
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args, out or sys.stdout)
    except CliError as exc:
        print(f"ponavail {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - any failure must yield a nonzero status
        print(f"ponavail {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
