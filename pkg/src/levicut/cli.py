"""``levicut`` command line: run a benchmark or analyse the cuts of a file."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .bench import ORDERS, BenchConfig, parse_netlist, run_benchmark
from .core import B_ALL, B_NAMES, DiagramFormatError, deserialize
from .cuts import cutset_of, cutset_of_dag, dag_of, max_1level_cut, max_2level_cut, parse_edge_list
from .levq import MIN_MEMORY
from .oracle import OracleLimit, brute_force_ilevel_cut
from .stats import aggregates
from .sweep import MODES


def _memory(text: str) -> int:
    units = {"k": 2**10, "m": 2**20, "g": 2**30}
    t = text.strip().lower().removesuffix("ib").removesuffix("b")
    mult = units.get(t[-1:], 1)
    if t[-1:] in units:
        t = t[:-1]
    try:
        value = int(float(t) * mult)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad memory size {text!r}") from None
    if value < MIN_MEMORY:
        raise argparse.ArgumentTypeError(f"memory must be at least {MIN_MEMORY} bytes")
    return value


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=("bdd", "zdd"), default=None)
    p.add_argument("--granularity", choices=MODES, default="2level")
    p.add_argument("--memory", type=_memory, default=128 * 2**20,
                   help="memory budget per operation, e.g. 4096, 64KiB, 128MiB")
    p.add_argument("--stats", metavar="PATH", help="write the stats document here ('-' for stdout)")
    p.add_argument("--temp", metavar="DIR", help="directory for external-mode run files")
    p.add_argument("--repeat", type=int, default=1, help="run k times, report the fastest")
    p.add_argument("--simulate", action="store_true",
                   help="keep external runs in memory instead of files")
    p.add_argument("--no-track", action="store_true",
                   help="disable cut tracking (predictions fall back to node counts)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="levicut", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    q = sub.add_parser("queens", help="N-Queens solutions")
    q.add_argument("n", type=int)
    _common(q)

    t = sub.add_parser("ttt", help="Tic-Tac-Toe draw positions on a cube")
    t.add_argument("n", type=int, help="number of crosses")
    t.add_argument("--side", type=int, default=4)
    t.add_argument("--lines", type=int, default=None, help="only impose the first k lines")
    _common(t)

    k = sub.add_parser("knights", help="Hamiltonian knight paths")
    k.add_argument("rows", type=int)
    k.add_argument("cols", type=int)
    k.add_argument("--closed", action="store_true", help="only closed tours")
    _common(k)

    e = sub.add_parser("equiv", help="equivalence of two netlists")
    e.add_argument("spec")
    e.add_argument("impl")
    e.add_argument("--order", choices=ORDERS, default="input")
    _common(e)

    c = sub.add_parser("cuts", help="exact cuts of a diagram or edge-list file")
    c.add_argument("file")
    c.add_argument("--no-brute", action="store_true", help="skip the brute-force comparison")
    return ap


def _run_cuts(args) -> int:
    with open(args.file) as fh:
        text = fh.read()
    try:
        if text.lstrip().startswith("dd "):
            d = deserialize(text)
            cs = cutset_of(d)
            g = None if d.is_constant else dag_of(d)
            print(f"diagram kind={d.kind} vars={d.var_count} nodes={d.node_count}")
        else:
            g = parse_edge_list(text)
            cs = cutset_of_dag(g)
            print(f"dag vertices={len(g.levels)} arcs={len(g.arcs)}")
    except (DiagramFormatError, ValueError) as exc:
        print(f"levicut: {exc}", file=sys.stderr)
        return 2
    print("B     c1  c2")
    for B in B_ALL:
        print(f"{B_NAMES[B]:<5} {cs.c1[B]:>3} {cs.c2[B]:>3}")
    if g is not None and not args.no_brute:
        try:
            ok = all(
                brute_force_ilevel_cut(g, 1, B) == max_1level_cut(g, B)
                and brute_force_ilevel_cut(g, 2, B) == max_2level_cut(g, B)
                for B in B_ALL
            )
            print(f"brute-force check: {'agrees' if ok else 'MISMATCH'}")
            if not ok:
                return 1
        except OracleLimit:
            print("brute-force check: skipped (instance too large)")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "cuts":
        return _run_cuts(args)

    if args.command == "queens":
        params = {"n": args.n}
    elif args.command == "ttt":
        params = {"n": args.n, "side": args.side}
        if args.lines is not None:
            params["lines"] = args.lines
    elif args.command == "knights":
        params = {"rows": args.rows, "cols": args.cols, "closed": args.closed}
    else:
        try:
            with open(args.spec) as fh:
                spec = parse_netlist(fh.read())
            with open(args.impl) as fh:
                impl = parse_netlist(fh.read())
        except (OSError, ValueError) as exc:
            print(f"levicut: {exc}", file=sys.stderr)
            return 2
        params = {"spec": spec, "impl": impl, "order": args.order}
    kind = args.kind or ("zdd" if args.command == "knights" else "bdd")
    try:
        cfg = BenchConfig(
            "ttt" if args.command == "ttt" else args.command, params, kind,
            args.granularity, args.memory,
            None if args.stats == "-" else args.stats,
            args.temp, args.repeat, args.simulate, not args.no_track,
        )
        res = run_benchmark(cfg)
    except ValueError as exc:
        print(f"levicut: {exc}", file=sys.stderr)
        return 2

    agg = aggregates(res.session.records)
    fields = " ".join(f"{k}={v}" for k, v in res.result.items() if k != "wall_s")
    print(
        f"{args.command} {fields} ops={agg['ops']} internal_share={agg['internal_share']:.3f} "
        f"geomean_ratio={agg['geomean_ratio']:.3f} spilled_bytes={agg['spilled_bytes']} "
        f"time={res.wall_s:.3f}s"
    )
    if args.stats == "-":
        sys.stdout.write(res.document)
    if args.command == "equiv" and not res.result["equivalent"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
