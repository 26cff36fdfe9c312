"""Exact maximum 1- and 2-level cuts of levelised DAGs.

Both maxima are polynomial: a 1-level cut at ``j`` is determined uniquely by
``j``, and a 2-level cut only has the vertices of a single level free, each of
which independently picks the side that contributes more.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional

from .core import B_ALL, CutSet, DiagramFile, NodeRecord, TERMINAL_LEVEL

INF = math.inf

Vertex = Hashable


class CycleError(ValueError):
    pass


@dataclass
class LevelisedDag:
    """Vertices with levels plus an arc list (parallel arcs allowed).

    ``terminals`` maps sink vertices to their Boolean value; arcs into a
    terminal only count for weight selectors containing that value.
    """

    levels: dict[Vertex, float]
    arcs: list[tuple[Vertex, Vertex]]
    terminals: dict[Vertex, bool] = field(default_factory=dict)

    def weight(self, target: Vertex, B: int) -> int:
        if target in self.terminals:
            return (B >> int(self.terminals[target])) & 1
        return 1

    def violations(self) -> list[str]:
        out = []
        for s, t in self.arcs:
            if s not in self.levels or t not in self.levels:
                out.append(f"arc {s}->{t} has an unlevelled endpoint")
            elif not self.levels[s] < self.levels[t]:
                out.append(f"arc {s}->{t} goes from level {self.levels[s]} to {self.levels[t]}")
        return out


def levelise(vertices: Iterable[Vertex], arcs: Iterable[tuple[Vertex, Vertex]]) -> dict[Vertex, int]:
    """Level of v = (longest path in the DAG) - (longest path from v to a sink)."""
    verts = list(dict.fromkeys(vertices))
    arcs = list(arcs)
    succ: dict[Vertex, list[Vertex]] = {v: [] for v in verts}
    indeg: dict[Vertex, int] = {v: 0 for v in verts}
    for s, t in arcs:
        for v in (s, t):
            if v not in succ:
                succ[v] = []
                indeg[v] = 0
        succ[s].append(t)
        indeg[t] += 1

    order = [v for v, d in indeg.items() if d == 0]
    for v in order:
        for t in succ[v]:
            indeg[t] -= 1
            if indeg[t] == 0:
                order.append(t)
    if len(order) != len(succ):
        raise CycleError("graph contains a cycle")

    height: dict[Vertex, int] = {}
    for v in reversed(order):
        height[v] = max((height[t] + 1 for t in succ[v]), default=0)
    longest = max(height.values(), default=0)
    return {v: longest - h for v, h in height.items()}


def _cut_positions(g: LevelisedDag) -> list[float]:
    return sorted({lvl for lvl in g.levels.values() if lvl != INF and lvl != TERMINAL_LEVEL})


def max_1level_cut(g: LevelisedDag, B: int) -> int:
    """max over j of the weight of arcs (s, t) with level(s) <= j < level(t)."""
    js = _cut_positions(g)
    if not js:
        return 0
    diff = [0] * (len(js) + 1)
    for s, t in g.arcs:
        w = g.weight(t, B)
        if not w:
            continue
        lo = bisect.bisect_left(js, g.levels[s])
        hi = bisect.bisect_left(js, g.levels[t])
        diff[lo] += w
        diff[hi] -= w
    best = run = 0
    for d in diff[:-1]:
        run += d
        best = max(best, run)
    return best


def max_2level_cut(g: LevelisedDag, B: int) -> int:
    """Exact maximum 2-level cut.

    For every level k the vertices on k are free; arcs jumping over k are
    always cut, and each vertex on k adds max(in-weight, out-weight).
    """
    js = _cut_positions(g)
    if not js:
        return 0
    pos = {lvl: i for i, lvl in enumerate(js)}
    over = [0] * (len(js) + 1)
    in_w: dict[Vertex, int] = {}
    out_w: dict[Vertex, int] = {}
    for s, t in g.arcs:
        w = g.weight(t, B)
        if not w:
            continue
        ls, lt = g.levels[s], g.levels[t]
        # Arcs strictly skipping level k, for k in (ls, lt).
        lo = bisect.bisect_right(js, ls)
        hi = bisect.bisect_left(js, lt)
        if lo < hi:
            over[lo] += w
            over[hi] -= w
        out_w[s] = out_w.get(s, 0) + w
        in_w[t] = in_w.get(t, 0) + w

    free = [0] * len(js)
    for v, lvl in g.levels.items():
        if lvl in pos:
            free[pos[lvl]] += max(in_w.get(v, 0), out_w.get(v, 0))

    best = run = 0
    for k in range(len(js)):
        run += over[k]
        best = max(best, run + free[k])
    return best


ROOT_VERTEX = "(-inf)"


def dag_of(d: DiagramFile) -> LevelisedDag:
    """The diagram's DAG under the variable-label levelisation.

    Includes the synthetic arc from a source at level -1 into the root.
    """
    levels: dict[Vertex, float] = {ROOT_VERTEX: -1, "F": INF, "T": INF}
    terminals = {"F": False, "T": True}

    def name(u):
        if u.is_terminal:
            return "T" if u.index else "F"
        return (u.level, u.index)

    arcs = [(ROOT_VERTEX, name(d.root))]
    for n in d.nodes:
        levels[name(n.uid)] = n.uid.level
        arcs.append((name(n.uid), name(n.low)))
        arcs.append((name(n.uid), name(n.high)))
    return LevelisedDag(levels, arcs, terminals)


def dag_of_nodes(nodes: Iterable[NodeRecord], root=None) -> LevelisedDag:
    """DAG for a raw (possibly unreduced) node list; first node is the root."""
    nodes = sorted(nodes)
    levels: dict[Vertex, float] = {ROOT_VERTEX: -1, "F": INF, "T": INF}

    def name(u):
        if u.is_terminal:
            return "T" if u.index else "F"
        return (u.level, u.index)

    arcs = []
    if nodes or root is not None:
        arcs.append((ROOT_VERTEX, name(root if root is not None else nodes[0].uid)))
    for n in nodes:
        levels[name(n.uid)] = n.uid.level
        arcs.append((name(n.uid), name(n.low)))
        arcs.append((name(n.uid), name(n.high)))
    return LevelisedDag(levels, arcs, {"F": False, "T": True})


def cutset_of(d: DiagramFile) -> CutSet:
    """Exact CutSet of a diagram, root arc included (raw values, no ZDD adjustment)."""
    if d.is_constant:
        return CutSet.constant(bool(d.terminal_value))
    g = dag_of(d)
    c1 = tuple(max_1level_cut(g, B) for B in B_ALL)
    c2 = tuple(max_2level_cut(g, B) for B in B_ALL)
    return CutSet(c1, c2, True)  # type: ignore[arg-type]


# -- edge-list format ----------------------------------------------------------


def parse_edge_list(text: str) -> LevelisedDag:
    """Parse ``<src> <dst> [F|T]`` lines plus optional ``level <v> <l>`` directives.

    Without any level directive the graph is levelised by longest path; a
    tagged target is a terminal and is placed at infinity.
    """
    arcs = []
    terminals: dict[Vertex, bool] = {}
    given: dict[Vertex, float] = {}
    vertices = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "level":
            if len(toks) != 3:
                raise ValueError(f"line {lineno}: expected 'level <v> <l>'")
            given[toks[1]] = INF if toks[2] in ("inf", "oo") else int(toks[2])
            vertices.append(toks[1])
            continue
        if len(toks) not in (2, 3):
            raise ValueError(f"line {lineno}: expected '<src> <dst> [F|T]'")
        s, t = toks[0], toks[1]
        if len(toks) == 3:
            if toks[2] not in ("F", "T"):
                raise ValueError(f"line {lineno}: terminal tag must be F or T")
            terminals[t] = toks[2] == "T"
        arcs.append((s, t))
        vertices.extend((s, t))

    if given:
        levels = dict(given)
        missing = [v for v in vertices if v not in levels and v not in terminals]
        if missing:
            raise ValueError(f"no level given for {missing[0]!r}")
    else:
        levels = dict(levelise(vertices, arcs))
    for t in terminals:
        levels[t] = INF
    g = LevelisedDag(levels, arcs, terminals)
    bad = g.violations()
    if bad:
        raise ValueError(bad[0])
    return g


def cutset_of_dag(g: LevelisedDag, exact: bool = True) -> CutSet:
    c1 = tuple(max_1level_cut(g, B) for B in B_ALL)
    c2 = tuple(max_2level_cut(g, B) for B in B_ALL)
    return CutSet(c1, c2, exact)  # type: ignore[arg-type]


def unreduced_c1_internal(nodes: Iterable[NodeRecord], root: Optional[object] = None) -> int:
    return max_1level_cut(dag_of_nodes(nodes, root), 0)
