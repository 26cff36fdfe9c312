"""The Apply-Reduce pipeline, Count and Evaluate as levelised sweeps.

Apply runs top-down over the product of its inputs and writes unreduced
arcs; Reduce runs bottom-up over those arcs.  Both piggyback cut bookkeeping
onto their queues: Apply measures the unreduced 1-level cut, Reduce derives
sound over-approximations of the output's 1- and 2-level cuts.  Before each
sweep the auxiliary structures are sized from the predicted cut bounds and
placed in memory or on disk accordingly.
"""

from __future__ import annotations

import itertools
import logging
import time
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

from .bounds import (
    GRANULARITIES,
    NODES,
    TWO_LEVEL,
    InputInfo,
    OperatorProfile,
    predict_next_op,
    refine_reduce_bounds,
)
from .core import (
    B_ALL,
    BDD,
    FALSE,
    ZDD,
    ArcFiles,
    CutSet,
    DiagramError,
    DiagramFile,
    NodeRecord,
    Uid,
    terminal,
)
from .levq import (
    ELEMENT_BYTES,
    MIN_MEMORY,
    BoundViolation,
    LevelisedPQ,
    MemoryBudget,
    Mode,
    Sorter,
    SpillConfig,
)
from .stats import OpStats, StructStats

log = logging.getLogger(__name__)

FORCE_INTERNAL = "internal"
FORCE_EXTERNAL = "external"
MODES = GRANULARITIES + (FORCE_INTERNAL, FORCE_EXTERNAL)

_SOURCE_ROOT = Uid(-1, -1)


# -- configuration and bookkeeping ---------------------------------------------


@dataclass
class Config:
    granularity: str = TWO_LEVEL
    memory_bytes: int = 128 * 2**20
    temp_dir: Optional[str] = None
    simulate_external: bool = False
    keep_runs: bool = False
    track_cuts: bool = True
    check_bounds: bool = True

    def __post_init__(self):
        if self.granularity not in MODES:
            raise ValueError(f"unknown granularity {self.granularity!r}")
        if self.memory_bytes < MIN_MEMORY:
            raise ValueError(f"memory budget below the {MIN_MEMORY} byte floor")

    @property
    def forced(self) -> Optional[Mode]:
        return {FORCE_INTERNAL: Mode.INTERNAL, FORCE_EXTERNAL: Mode.EXTERNAL}.get(self.granularity)

    @property
    def prediction_granularity(self) -> str:
        if not self.track_cuts:
            return NODES
        if self.forced is not None:
            return TWO_LEVEL
        return self.granularity

    @property
    def granularities(self) -> tuple[str, ...]:
        """Granularities whose bounds are computed and reported, coarsest first."""
        gran = self.prediction_granularity
        return GRANULARITIES[: GRANULARITIES.index(gran) + 1]


class Session:
    """Configuration, memory budget and stats shared by a chain of operations."""

    def __init__(self, config: Optional[Config] = None, **kwargs):
        self.config = config or Config(**kwargs)
        self.budget = MemoryBudget(self.config.memory_bytes)
        self.records: list[OpStats] = []
        self._ids = itertools.count(1)

    def spill(self, op_id: int) -> SpillConfig:
        c = self.config
        return SpillConfig(c.temp_dir, f"op{op_id}", c.simulate_external, c.keep_runs)

    def open(self, name: str, bounds: dict[str, dict[str, int]], nodes_in: int):
        """Start an operation; ``bounds`` maps structure -> granularity -> bound."""
        op_id = next(self._ids)
        gran = self.config.prediction_granularity
        in_force = {s: b[gran] for s, b in bounds.items()}
        modes = self.budget.decide(op_id, in_force, self.config.forced)
        share = self.budget.total // max(1, len(bounds))
        rec = OpStats(op_id, name, self.config.granularity, nodes_in=nodes_in)
        for s, b in bounds.items():
            rec.structures.append(StructStats(
                s, in_force[s], modes[s].value,
                element_bytes=ELEMENT_BYTES[s], budget_bytes=share, bounds=dict(b),
            ))
        return rec, modes

    def close(self, rec: OpStats, structures: Sequence, t0: float, nodes_out: int) -> None:
        for st, obj in zip(rec.structures, structures):
            st.high_water = obj.high_water
            st.setup_s = obj.setup_s
            st.spilled_bytes = obj.spilled_items * st.element_bytes
            obj.close()
        rec.total_s = time.perf_counter() - t0
        rec.nodes_out = nodes_out
        self.records.append(rec)
        if self.config.check_bounds:
            for st in rec.structures:
                if not st.sound:
                    raise BoundViolation(
                        f"{rec.name}#{rec.op_id}: {st.name} reached {st.high_water} "
                        f"over bounds {st.bound} / {st.bounds}"
                    )

    # Convenience wrappers so pipelines read naturally.
    def apply(self, f: DiagramFile, g: DiagramFile, op) -> DiagramFile:
        return reduce(apply(f, g, op, session=self), session=self)

    def count(self, d: DiagramFile, semantics: Optional[str] = None) -> int:
        return count(d, semantics, session=self)


def _info(d: DiagramFile) -> InputInfo:
    return InputInfo(d.kind, d.cuts, d.node_count)


# -- Apply ---------------------------------------------------------------------


def _resolver(kind: str, table: Sequence[int]):
    """Return a function mapping an input pair to a terminal value or None."""
    left_const = [table[0] == table[1], table[2] == table[3]]
    right_const = [table[0] == table[2], table[1] == table[3]]
    zdd_left_bot = table[0] == 0 and table[1] == 0
    zdd_right_bot = table[0] == 0 and table[2] == 0

    if kind == BDD:
        def resolve(a: Uid, b: Uid):
            at, bt = a.is_terminal, b.is_terminal
            if at and bt:
                return table[2 * a.index + b.index]
            if at and left_const[a.index]:
                return table[2 * a.index]
            if bt and right_const[b.index]:
                return table[b.index]
            return None
    else:
        def resolve(a: Uid, b: Uid):
            at, bt = a.is_terminal, b.is_terminal
            if at and bt:
                return table[2 * a.index + b.index]
            if (zdd_left_bot and a == FALSE) or (zdd_right_bot and b == FALSE):
                return 0
            return None
    return resolve


def _profile(op, kind: str) -> OperatorProfile:
    prof = op if isinstance(op, OperatorProfile) else OperatorProfile.of(op, kind)
    if kind == ZDD and prof.table[0] != 0:
        raise ValueError(f"operator {prof.name} maps two empty families to a nonempty one")
    return prof


def apply(f: DiagramFile, g: DiagramFile, op, *, session: Optional[Session] = None) -> ArcFiles:
    """Top-down product sweep; returns the unreduced arcs of ``f op g``."""
    if f.kind != g.kind:
        raise DiagramError("apply needs two diagrams of the same kind")
    session = session or Session()
    kind = f.kind
    prof = _profile(op, kind)
    var_count = max(f.var_count, g.var_count)
    resolve = _resolver(kind, prof.table)
    t0 = time.perf_counter()

    predictions = {
        gran: predict_next_op([_info(f), _info(g)], "apply", gran, prof)
        for gran in session.config.granularities
    }
    bounds = {"apply_pq": {gran: p["apply_pq"] for gran, p in predictions.items()}}
    rec, modes = session.open("apply", bounds, f.node_count + g.node_count)
    pq = LevelisedPQ("apply_pq", modes["apply_pq"], spill=session.spill(rec.op_id))

    out = ArcFiles(kind, var_count, predictions=predictions)
    root = (f.root, g.root)
    r = resolve(*root)
    if r is not None:
        out.root_terminal = bool(r)
        session.close(rec, [pq], t0, 0)
        return out

    by_f, by_g = f.by_level, g.by_level
    bdd = kind == BDD
    internal, term, widths = out.internal, out.terminal, out.level_widths
    counts = [0, 0]
    out_c1 = 0
    pq.push(min(root[0].level, root[1].level), (root, _SOURCE_ROOT, 0))
    while (lvl := pq.next_level()) is not None:
        # Every queued request is an internal arc crossing into this level.
        out_c1 = max(out_c1, len(pq))
        idx = 0
        for (uf, ug), reqs in pq.pop_level(lvl):
            node = Uid(lvl, idx)
            idx += 1
            for _, src, which in reqs:
                if src != _SOURCE_ROOT:
                    internal.append((src, which, node))
            if uf.level == lvl:
                n = by_f[lvl][uf.index]
                fl, fh = n.low, n.high
            else:
                fl, fh = (uf, uf) if bdd else (uf, FALSE)
            if ug.level == lvl:
                n = by_g[lvl][ug.index]
                gl, gh = n.low, n.high
            else:
                gl, gh = (ug, ug) if bdd else (ug, FALSE)
            for which, a, b in ((0, fl, gl), (1, fh, gh)):
                v = resolve(a, b)
                if v is None:
                    pq.push(min(a.level, b.level), ((a, b), node, which))
                else:
                    term.append((node, which, bool(v)))
                    counts[v] += 1
        widths.append((lvl, idx))

    out.out_c1_internal = out_c1
    out.terminal_counts = (counts[0], counts[1])
    session.close(rec, [pq], t0, out.node_count)
    return out


# -- Reduce --------------------------------------------------------------------


def _w(u: Uid, B: int) -> int:
    return (B >> u.index) & 1 if u.is_terminal else 1


def reduce(arcs: ArcFiles, *, session: Optional[Session] = None) -> DiagramFile:
    """Bottom-up Reduce; the result carries over-approximated cuts (exact=False)."""
    session = session or Session()
    kind = arcs.kind
    track = session.config.track_cuts
    t0 = time.perf_counter()
    n_in = arcs.node_count

    bounds: dict[str, dict[str, int]] = {"reduce_pq": {}, "reduce_sorter": {}}
    for gran in session.config.granularities:
        pred = (arcs.predictions or {}).get(gran)
        r = refine_reduce_bounds(pred, gran, n_in, arcs.out_c1_internal)
        bounds["reduce_pq"][gran] = r["reduce_pq"]
        bounds["reduce_sorter"][gran] = r["reduce_sorter"]
    rec, modes = session.open("reduce", bounds, n_in)
    spill = session.spill(rec.op_id)
    pq = LevelisedPQ("reduce_pq", modes["reduce_pq"], descending=True, spill=spill)
    sorter = Sorter("reduce_sorter", modes["reduce_sorter"], spill=spill)

    if arcs.root_terminal is not None:
        session.close(rec, [pq, sorter], t0, 0)
        return DiagramFile.constant(arcs.root_terminal, arcs.var_count, kind)

    term, internal = arcs.terminal, arcs.internal
    ti, ii = len(term), len(internal)
    unread = [0, 0]
    for _, _, v in term:
        unread[v] += 1
    # Queue content by class of the forwarded target: internal, F, T.
    queued = [0, 0, 0]
    e1 = [0] * 4
    e2 = [0] * 4
    bypass = [0] * 4
    root = arcs.root
    out_levels: list[list[NodeRecord]] = []
    red: dict[int, tuple[Uid, bool]] = {}

    for lvl, width in reversed(arcs.level_widths):
        slots = [[None, None, False, False] for _ in range(width)]
        for src, items in pq.pop_level(lvl):
            slot = slots[src.index]
            for _, which, tgt, flag in items:
                slot[which] = tgt
                slot[2 + which] = flag
                queued[0 if not tgt.is_terminal else 1 + tgt.index] -= 1
        while ti and term[ti - 1][0].level == lvl:
            src, which, v = term[ti - 1]
            ti -= 1
            slots[src.index][which] = terminal(v)
            unread[v] -= 1

        j = ii
        while j and internal[j - 1][2].level == lvl:
            j -= 1
        in_arcs = internal[j:ii]
        ii = j
        indeg = Counter(t.index for _, _, t in in_arcs)
        if root.level == lvl:
            indeg[root.index] += 1

        red = {}
        for i, (lo, hi, flo, fhi) in enumerate(slots):
            if lo is None or hi is None:
                raise DiagramError(f"node {Uid(lvl, i)!r} is missing an out-arc")
            if (lo == hi) if kind == BDD else (hi == FALSE):
                red[i] = (lo, True)
            else:
                sorter.add(((lo, hi), i, flo, fhi))

        nodes: list[NodeRecord] = []
        reps: list[tuple[bool, bool]] = []
        ins: list[int] = []
        for key, i, flo, fhi in sorter.run(key=lambda t: t[0]):
            if not nodes or (nodes[-1].low, nodes[-1].high) != key:
                nodes.append(NodeRecord(Uid(lvl, len(nodes)), key[0], key[1]))
                reps.append((flo, fhi))
                ins.append(0)
            red[i] = (nodes[-1].uid, False)
            ins[-1] += indeg[i]

        if track:
            for B in B_ALL:
                carry = queued[0] + (B & 1) * queued[1] + (B >> 1) * queued[2]
                carry += (B & 1) * unread[0] + (B >> 1) * unread[1]
                s1 = s2 = 0
                for n, (flo, fhi), k in zip(nodes, reps, ins):
                    o = _w(n.low, B) + _w(n.high, B)
                    s1 += o
                    s2 += max(o, k)
                    bypass[B] += flo * _w(n.low, B) + fhi * _w(n.high, B)
                e1[B] = max(e1[B], carry + s1)
                e2[B] = max(e2[B], carry + s2)

        for src, which, tgt in in_arcs:
            r, flag = red[tgt.index]
            pq.push(src.level, (src, which, r, flag))
            queued[0 if not r.is_terminal else 1 + r.index] += 1
        out_levels.append(nodes)

    new_root, root_bypassed = red[root.index]
    nodes_out = [n for level in reversed(out_levels) for n in level]
    session.close(rec, [pq, sorter], t0, len(nodes_out))
    if new_root.is_terminal:
        return DiagramFile.constant(new_root.value, arcs.var_count, kind)

    n = len(nodes_out)
    if track:
        def row(e):
            out = []
            for B in B_ALL:
                g = bypass[B] + root_bypassed * _w(new_root, B)
                out.append(min(n + 1, max(_w(new_root, B), e[B] + g)))
            return tuple(out)
        cuts = CutSet(row(e1), row(e2), False)  # type: ignore[arg-type]
    else:
        cuts = CutSet.uniform(n + 1)
    return DiagramFile.create(kind, arcs.var_count, nodes_out, cuts)


def apply_reduce(f: DiagramFile, g: DiagramFile, op, *, session: Optional[Session] = None) -> DiagramFile:
    session = session or Session()
    return session.apply(f, g, op)


# -- Count / Evaluate / equality -----------------------------------------------

SATCOUNT = "satcount"
PATHCOUNT = "pathcount"


def count(d: DiagramFile, semantics: Optional[str] = None, *, session: Optional[Session] = None) -> int:
    """Number of satisfying assignments (BDD) or ⊤-paths / family members.

    For ZDDs both semantics coincide: skipped variables are fixed to 0.
    """
    session = session or Session()
    semantics = semantics or (SATCOUNT if d.kind == BDD else PATHCOUNT)
    if semantics not in (SATCOUNT, PATHCOUNT):
        raise ValueError(f"unknown count semantics {semantics!r}")
    scale = semantics == SATCOUNT and d.kind == BDD
    t0 = time.perf_counter()

    bounds = {"count_pq": {
        gran: predict_next_op([_info(d)], "count", gran)["count_pq"]
        for gran in session.config.granularities
    }}
    rec, modes = session.open("count", bounds, d.node_count)
    pq = LevelisedPQ("count_pq", modes["count_pq"], spill=session.spill(rec.op_id))

    if d.is_constant:
        session.close(rec, [pq], t0, 0)
        if not d.terminal_value:
            return 0
        return 2 ** d.var_count if scale else 1

    nv = d.var_count
    by_level = d.by_level
    total = 0
    root = d.root
    pq.push(root.level, (root, 2 ** root.level if scale else 1))
    while (lvl := pq.next_level()) is not None:
        for uid, items in pq.pop_level(lvl):
            c = sum(x[1] for x in items)
            n = by_level[lvl][uid.index]
            for child in (n.low, n.high):
                w = c
                if scale:
                    w <<= (nv if child.is_terminal else child.level) - lvl - 1
                if child.is_terminal:
                    total += w * child.index
                else:
                    pq.push(child.level, (child, w))
    session.close(rec, [pq], t0, 0)
    return total


def evaluate(d: DiagramFile, assignment: Sequence) -> bool:
    bits = [bool(b) for b in assignment]
    if len(bits) < d.var_count:
        raise ValueError(f"assignment covers {len(bits)} of {d.var_count} variables")
    zdd = d.kind == ZDD
    u = d.root
    prev = -1
    while True:
        stop = d.var_count if u.is_terminal else u.level
        if zdd and any(bits[prev + 1:stop]):
            return False
        if u.is_terminal:
            return u.value
        n = d.node(u)
        if n.uid != u:
            raise DiagramError(f"node table does not match uid {u!r}")
        prev = u.level
        u = n.high if bits[u.level] else n.low


def equal(f: DiagramFile, g: DiagramFile) -> bool:
    """Canonicity makes function equality a structural comparison."""
    if f.kind != g.kind:
        raise DiagramError("cannot compare a BDD with a ZDD")
    if f.is_constant or g.is_constant:
        return f.is_constant and g.is_constant and f.terminal_value == g.terminal_value
    return f.nodes == g.nodes
