"""Benchmark families, netlist equivalence and the stats harness.

Queens, Tic-Tac-Toe and Knight's tours are built the usual way for
levelised packages: small constraint diagrams made directly, then combined
with Apply.  Every Apply, Reduce and Count goes through one ``Session`` so its
stats describe the whole run.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import build
from .core import BDD, ZDD, DiagramFile
from .oracle import cube_lines, knight_moves
from .stats import render
from .sweep import Config, Session, equal

ORDERS = ("input", "level-df")


def _fold(session: Session, parts: Sequence[DiagramFile], op: str) -> DiagramFile:
    acc = parts[0]
    for p in parts[1:]:
        acc = session.apply(acc, p, op)
    return acc


# -- N-Queens ------------------------------------------------------------------


def queens_cell(n: int, i: int, j: int, kind: str = BDD) -> DiagramFile:
    """A queen on (i, j) and none on any square it attacks; variable i*n+j."""

    def delta(level, s, bit):
        r, c = divmod(level, n)
        if (r, c) == (i, j):
            return s if bit else None
        if r == i or c == j or r - c == i - j or r + c == i + j:
            return None if bit else s
        return s

    return build.from_automaton(n * n, kind, 0, delta, lambda s: True)


def build_queens(n: int, kind: str = BDD, session: Optional[Session] = None) -> DiagramFile:
    if not 1 <= n <= 12:
        raise ValueError("queens is supported for 1 <= N <= 12")
    session = session or Session()
    rows = [
        _fold(session, [queens_cell(n, i, j, kind) for j in range(n)], "or")
        for i in range(n)
    ]
    return _fold(session, rows, "and")


# -- Tic-Tac-Toe ---------------------------------------------------------------


def line_constraint(line: Sequence[int], var_count: int, kind: str = BDD) -> DiagramFile:
    """The cells of ``line`` are neither all crosses nor all noughts."""
    members = set(line)

    def delta(level, s, bit):
        if level in members:
            return s | (1 << bit)
        return s

    return build.from_automaton(var_count, kind, 0, delta, lambda s: s == 3)


def build_tictactoe(n: int, kind: str = BDD, side: int = 4, session: Optional[Session] = None,
                    lines: Optional[int] = None) -> DiagramFile:
    """``n`` crosses on a side^3 cube with no line all crosses or all noughts.

    ``lines`` keeps only the first so many line constraints, which gives
    nonzero counts on small cubes.
    """
    cells = side ** 3
    if not 0 <= n <= cells:
        raise ValueError(f"cannot place {n} crosses on {cells} cells")
    session = session or Session()
    acc = build.exactly(n, range(cells), cells, kind)
    for line in cube_lines(side)[:lines]:
        acc = session.apply(acc, line_constraint(line, cells, kind), "and")
    return acc


# -- Knight's tours ------------------------------------------------------------


def knight_step(t: int, u: int, steps: int, cells: int, moves, kind: str = ZDD) -> DiagramFile:
    """Exactly one cell at time t, exactly one at time u, a knight's move apart.

    Variables are ``time * cells + cell``.  Every other time step is free.
    """
    lo, hi = sorted((t, u))
    last = cells - 1

    def delta(level, s, bit):
        tau, cell = divmod(level, cells)
        if tau not in (lo, hi):
            return s
        a, b = s
        if tau == lo:
            if bit:
                if a != -1:
                    return None
                a = cell
            if cell == last and a == -1:
                return None
            return (a, b)
        if bit:
            if b != -1 or cell not in moves[a]:
                return None
            b = cell
        if cell == last:
            return (-2, -2) if b != -1 else None
        return (a, b)

    return build.from_automaton(steps * cells, kind, (-1, -1), delta, lambda s: True)


def build_knights(rows: int, cols: int, closed: bool = False, kind: str = ZDD,
                  session: Optional[Session] = None) -> DiagramFile:
    """Hamiltonian knight paths: transitions intersected per time step, then one
    exactly-once constraint per cell."""
    cells = rows * cols
    if not 1 <= cells <= 25:
        raise ValueError("knights is supported for boards of 1..25 cells")
    session = session or Session()
    moves = {c: set(m) for c, m in knight_moves(rows, cols).items()}
    steps = cells
    nv = steps * cells
    if steps == 1:
        acc = build.exactly(1, range(cells), nv, kind)
    else:
        acc = knight_step(0, 1, steps, cells, moves, kind)
        for t in range(1, steps - 1):
            acc = session.apply(acc, knight_step(t, t + 1, steps, cells, moves, kind), "and")
    for c in range(cells):
        once = build.exactly(1, [t * cells + c for t in range(steps)], nv, kind)
        acc = session.apply(acc, once, "and")
    if closed:
        if steps == 1:
            acc = session.apply(acc, build.constant(False, nv, kind), "and")
        else:
            acc = session.apply(acc, knight_step(steps - 1, 0, steps, cells, moves, kind), "and")
    return acc


# -- netlists ------------------------------------------------------------------

GATE_OPS = ("and", "or", "xor", "not", "const")
_GATE = re.compile(r"^gate\s+(\S+)\s*=\s*(\w+)\s*\((.*)\)\s*$")


class NetlistError(ValueError):
    pass


@dataclass
class Netlist:
    inputs: list[str]
    gates: list[tuple[str, str, list[str]]]
    outputs: list[str]


def parse_netlist(text: str) -> Netlist:
    inputs: list[str] = []
    gates: list[tuple[str, str, list[str]]] = []
    outputs: list[str] = []
    defined: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0]
        if head == "inputs":
            for name in line.split()[1:]:
                if name in defined:
                    raise NetlistError(f"line {lineno}: {name} defined twice")
                defined.add(name)
                inputs.append(name)
        elif head == "outputs":
            outputs.extend(line.split()[1:])
        elif head == "gate":
            m = _GATE.match(line)
            if not m:
                raise NetlistError(f"line {lineno}: expected 'gate <id> = <op>(<args>)'")
            gid, op, argtext = m.groups()
            args = [a.strip() for a in argtext.split(",") if a.strip()]
            if op not in GATE_OPS:
                raise NetlistError(f"line {lineno}: unknown op {op!r}")
            if gid in defined:
                raise NetlistError(f"line {lineno}: {gid} defined twice")
            if op == "const":
                if args not in (["0"], ["1"]):
                    raise NetlistError(f"line {lineno}: const takes 0 or 1")
            else:
                if op == "not" and len(args) != 1:
                    raise NetlistError(f"line {lineno}: not takes one argument")
                if not args:
                    raise NetlistError(f"line {lineno}: {op} needs arguments")
                for a in args:
                    if a not in defined:
                        raise NetlistError(f"line {lineno}: {a} used before definition")
            defined.add(gid)
            gates.append((gid, op, args))
        else:
            raise NetlistError(f"line {lineno}: unknown record {head!r}")
    for o in outputs:
        if o not in defined:
            raise NetlistError(f"output {o} is never defined")
    return Netlist(inputs, gates, outputs)


def variable_order(net: Netlist, order: str = "input") -> list[str]:
    """Input names in variable order.

    ``level-df`` walks depth-first from the outputs and numbers inputs by
    first visit; unreached inputs go last in declaration order.
    """
    if order == "input":
        return list(net.inputs)
    if order != "level-df":
        raise ValueError(f"unknown variable order {order!r}")
    fanin = {gid: args for gid, op, args in net.gates if op != "const"}
    inputs = set(net.inputs)
    seen: set[str] = set()
    out: list[str] = []
    for o in net.outputs:
        stack = [o]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            if v in inputs:
                out.append(v)
            else:
                stack.extend(reversed(fanin.get(v, [])))
    out += [i for i in net.inputs if i not in seen]
    return out


def build_netlist(net: Netlist, order: Sequence[str], session: Optional[Session] = None,
                  kind: str = BDD) -> list[DiagramFile]:
    session = session or Session()
    nv = len(order)
    pos = {name: i for i, name in enumerate(order)}
    env = {name: build.variable(pos[name], nv, kind) for name in net.inputs}
    true = build.constant(True, nv, kind)
    for gid, op, args in net.gates:
        if op == "const":
            env[gid] = build.constant(args[0] == "1", nv, kind)
        elif op == "not":
            env[gid] = session.apply(env[args[0]], true, "xor")
        else:
            env[gid] = _fold(session, [env[a] for a in args], op)
    return [env[o] for o in net.outputs]


@dataclass
class EquivResult:
    equivalent: bool
    mismatched: list[int]
    order: list[str]
    nodes: int


def netlist_equiv(spec: Netlist, impl: Netlist, order: str = "input",
                  session: Optional[Session] = None) -> EquivResult:
    if set(spec.inputs) != set(impl.inputs):
        raise NetlistError("the netlists have different primary inputs")
    if len(spec.outputs) != len(impl.outputs):
        raise NetlistError("the netlists have different numbers of outputs")
    session = session or Session()
    names = variable_order(spec, order)
    a = build_netlist(spec, names, session)
    b = build_netlist(impl, names, session)
    bad = [i for i, (x, y) in enumerate(zip(a, b)) if not equal(x, y)]
    return EquivResult(not bad, bad, names, sum(d.node_count for d in a + b))


# -- harness -------------------------------------------------------------------

BENCHMARKS = ("queens", "ttt", "knights", "equiv")


@dataclass
class BenchConfig:
    benchmark: str
    params: dict = field(default_factory=dict)
    kind: str = BDD
    granularity: str = "2level"
    memory_bytes: int = 128 * 2**20
    stats_path: Optional[str] = None
    temp_dir: Optional[str] = None
    repeat: int = 1
    simulate_external: bool = False
    track_cuts: bool = True

    def __post_init__(self):
        if self.benchmark not in BENCHMARKS:
            raise ValueError(f"unknown benchmark {self.benchmark!r}")
        if self.kind not in (BDD, ZDD):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.repeat < 1:
            raise ValueError("repeat must be at least 1")
        self.session_config()  # validates granularity and memory floor

    def session_config(self) -> Config:
        return Config(
            granularity=self.granularity,
            memory_bytes=self.memory_bytes,
            temp_dir=self.temp_dir,
            simulate_external=self.simulate_external,
            track_cuts=self.track_cuts,
        )

    def header(self) -> dict:
        h = {"benchmark": self.benchmark}
        h.update({k: v for k, v in sorted(self.params.items()) if k not in ("spec", "impl")})
        h.update(kind=self.kind, granularity=self.granularity, memory=self.memory_bytes,
                 track_cuts=self.track_cuts, repeat=self.repeat)
        return h


@dataclass
class BenchResult:
    config: BenchConfig
    result: dict
    session: Session
    diagram: Optional[DiagramFile]
    document: str
    wall_s: float


def _run_once(cfg: BenchConfig):
    session = Session(cfg.session_config())
    p = cfg.params
    diagram = None
    if cfg.benchmark == "queens":
        diagram = build_queens(int(p["n"]), cfg.kind, session)
        result = {"count": session.count(diagram)}
    elif cfg.benchmark == "ttt":
        lines = p.get("lines")
        diagram = build_tictactoe(int(p["n"]), cfg.kind, int(p.get("side", 4)), session,
                                  None if lines is None else int(lines))
        result = {"count": session.count(diagram)}
    elif cfg.benchmark == "knights":
        diagram = build_knights(int(p["rows"]), int(p["cols"]), bool(p.get("closed", False)),
                                cfg.kind, session)
        result = {"count": session.count(diagram)}
    else:
        spec, impl = p["spec"], p["impl"]
        if isinstance(spec, str):
            spec = parse_netlist(spec)
        if isinstance(impl, str):
            impl = parse_netlist(impl)
        eq = netlist_equiv(spec, impl, p.get("order", "input"), session)
        result = {"equivalent": eq.equivalent, "mismatched": len(eq.mismatched)}
    if diagram is not None:
        result["nodes"] = diagram.node_count
    return session, diagram, result


def run_benchmark(cfg: BenchConfig) -> BenchResult:
    """Run the benchmark ``repeat`` times and keep the fastest run's stats."""
    best = None
    for _ in range(cfg.repeat):
        t0 = time.perf_counter()
        session, diagram, result = _run_once(cfg)
        wall = time.perf_counter() - t0
        if best is None or wall < best[3]:
            best = (session, diagram, result, wall)
    session, diagram, result, wall = best
    result = dict(result, wall_s=wall)
    doc = render(session.records, cfg.header(), result)
    if cfg.stats_path:
        with open(cfg.stats_path, "w") as fh:
            fh.write(doc)
    return BenchResult(cfg, result, session, diagram, doc, wall)


def run_stats(cfg: BenchConfig) -> str:
    return run_benchmark(cfg).document
