"""Diagram identifiers, node records, cut metadata and the text file format.

A diagram is stored the way a levelised package keeps it on disk: a sequence of
node triples sorted by ``(level, index)``.  Terminals get a level larger than
any variable label so that plain tuple comparison yields the levelised order.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Optional, Sequence

TERMINAL_LEVEL = sys.maxsize

BDD = "bdd"
ZDD = "zdd"
KINDS = (BDD, ZDD)

# Terminal subsets B are bitmasks: bit 0 is the false terminal, bit 1 the true one.
B_NONE = 0
B_FALSE = 1
B_TRUE = 2
B_BOTH = 3
B_ALL = (B_NONE, B_FALSE, B_TRUE, B_BOTH)
B_NAMES = {B_NONE: "{}", B_FALSE: "{F}", B_TRUE: "{T}", B_BOTH: "{F,T}"}

LOW = 0
HIGH = 1


class DiagramError(ValueError):
    pass


class DiagramFormatError(DiagramError):
    pass


class Uid(NamedTuple):
    """Node identifier; terminals are ``Uid(TERMINAL_LEVEL, value)``."""

    level: int
    index: int

    @property
    def is_terminal(self) -> bool:
        return self.level == TERMINAL_LEVEL

    @property
    def value(self) -> bool:
        if self.level != TERMINAL_LEVEL:
            raise DiagramError(f"{self} is not a terminal")
        return bool(self.index)

    def __repr__(self) -> str:
        if self.level == TERMINAL_LEVEL:
            return "T" if self.index else "F"
        return f"{self.level}.{self.index}"


FALSE = Uid(TERMINAL_LEVEL, 0)
TRUE = Uid(TERMINAL_LEVEL, 1)


def terminal(value: bool) -> Uid:
    return TRUE if value else FALSE


def uid_compare(a: Uid, b: Uid) -> int:
    """Three-way comparison in levelised order (-1, 0 or 1)."""
    return (a > b) - (a < b)


def weight(target: Uid, B: int) -> int:
    """Arc weight w_B: internal targets always count, terminals only if in B."""
    if target.level != TERMINAL_LEVEL:
        return 1
    return (B >> target.index) & 1


class NodeRecord(NamedTuple):
    uid: Uid
    low: Uid
    high: Uid


@dataclass(frozen=True)
class CutSet:
    """Maximum 1- and 2-level cut sizes for every terminal subset B.

    ``c1[B]`` and ``c2[B]`` are indexed by the B bitmask.  ``exact`` is true
    when the values were computed exactly rather than over-approximated by a
    Reduce sweep.
    """

    c1: tuple[int, int, int, int]
    c2: tuple[int, int, int, int]
    exact: bool = False

    def get(self, i: int, B: int) -> int:
        if i == 1:
            return self.c1[B]
        if i == 2:
            return self.c2[B]
        raise ValueError(f"only 1- and 2-level cuts are tracked, not {i}")

    def violations(self, node_count: Optional[int] = None) -> list[str]:
        out = []
        for i, row in ((1, self.c1), (2, self.c2)):
            if any(v < 0 for v in row):
                out.append(f"c{i} has a negative entry")
            for lo, hi in ((B_NONE, B_FALSE), (B_NONE, B_TRUE), (B_FALSE, B_BOTH), (B_TRUE, B_BOTH)):
                if row[lo] > row[hi]:
                    out.append(f"c{i} not monotone in B: {B_NAMES[lo]} > {B_NAMES[hi]}")
            if node_count is not None and max(row) > node_count + 1:
                out.append(f"c{i} exceeds node count + 1 = {node_count + 1}")
        for B in B_ALL:
            if self.c1[B] > self.c2[B]:
                out.append(f"c1{B_NAMES[B]} > c2{B_NAMES[B]}")
        return out

    @classmethod
    def constant(cls, value: bool) -> "CutSet":
        # Only the synthetic root arc exists and it points at the terminal.
        row = tuple(weight(terminal(value), B) for B in B_ALL)
        return cls(row, row, True)

    @classmethod
    def uniform(cls, size: int, exact: bool = False) -> "CutSet":
        row = (size,) * 4
        return cls(row, row, exact)


@dataclass(frozen=True)
class DiagramFile:
    """A reduced decision diagram as a sorted node sequence plus metadata.

    Constant functions have no nodes and carry ``terminal_value`` instead.
    """

    kind: str
    var_count: int
    nodes: tuple[NodeRecord, ...]
    cuts: CutSet
    level_widths: tuple[tuple[int, int], ...] = ()
    terminal_value: Optional[bool] = None

    @classmethod
    def create(
        cls,
        kind: str,
        var_count: int,
        nodes: Sequence[NodeRecord],
        cuts: CutSet,
        terminal_value: Optional[bool] = None,
    ) -> "DiagramFile":
        nodes = tuple(NodeRecord(*n) for n in nodes)
        if nodes:
            terminal_value = None
        elif terminal_value is None:
            raise DiagramError("a diagram without nodes needs a terminal value")
        return cls(kind, var_count, nodes, cuts, widths_of(nodes), terminal_value)

    @classmethod
    def constant(cls, value: bool, var_count: int = 0, kind: str = BDD) -> "DiagramFile":
        return cls(kind, var_count, (), CutSet.constant(value), (), bool(value))

    @property
    def root(self) -> Uid:
        if self.nodes:
            return self.nodes[0].uid
        return terminal(bool(self.terminal_value))

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def is_constant(self) -> bool:
        return not self.nodes

    @property
    def width(self) -> int:
        return max((w for _, w in self.level_widths), default=0)

    @cached_property
    def by_level(self) -> dict[int, tuple[NodeRecord, ...]]:
        """Nodes grouped per level; a uid ``(l, i)`` is ``by_level[l][i]``."""
        out: dict[int, list[NodeRecord]] = {}
        for n in self.nodes:
            out.setdefault(n.uid.level, []).append(n)
        return {lvl: tuple(ns) for lvl, ns in out.items()}

    def node(self, uid: Uid) -> NodeRecord:
        return self.by_level[uid.level][uid.index]

    def levels(self) -> list[int]:
        return [lvl for lvl, _ in self.level_widths]


def widths_of(nodes: Iterable[NodeRecord]) -> tuple[tuple[int, int], ...]:
    widths: dict[int, int] = {}
    for n in nodes:
        widths[n.uid.level] = widths.get(n.uid.level, 0) + 1
    return tuple(sorted(widths.items()))


@dataclass
class ArcFiles:
    """Unreduced output of a top-down sweep.

    ``internal`` holds ``(source, which, target)`` grouped by target with the
    targets in ascending order; ``terminal`` holds ``(source, which, value)``
    sorted by source.  ``root_terminal`` is set when the whole result
    collapsed to a terminal before any node was created.
    """

    kind: str
    var_count: int
    internal: list[tuple[Uid, int, Uid]] = field(default_factory=list)
    terminal: list[tuple[Uid, int, bool]] = field(default_factory=list)
    level_widths: list[tuple[int, int]] = field(default_factory=list)
    out_c1_internal: Optional[int] = None
    terminal_counts: tuple[int, int] = (0, 0)
    root_terminal: Optional[bool] = None
    # Reduce bounds predicted before the top-down sweep, per granularity.
    predictions: Optional[dict] = None

    @property
    def node_count(self) -> int:
        return sum(w for _, w in self.level_widths)

    @property
    def root(self) -> Uid:
        if self.root_terminal is not None:
            return terminal(self.root_terminal)
        return Uid(self.level_widths[0][0], 0)

    def unreduced_nodes(self) -> list[NodeRecord]:
        """Node records of the unreduced product, in uid order."""
        kids: dict[Uid, list] = {}
        for s, which, t in self.internal:
            kids.setdefault(s, [None, None])[which] = t
        for s, which, v in self.terminal:
            kids.setdefault(s, [None, None])[which] = terminal(v)
        return [NodeRecord(u, lo, hi) for u, (lo, hi) in sorted(kids.items())]

    def violations(self) -> list[str]:
        out = []
        emitted: dict[Uid, int] = {}
        for s, _, _ in self.internal:
            emitted[s] = emitted.get(s, 0) + 1
        for s, _, _ in self.terminal:
            emitted[s] = emitted.get(s, 0) + 1
        sources = {Uid(lvl, i) for lvl, w in self.level_widths for i in range(w)}
        for s, k in emitted.items():
            if k != 2:
                out.append(f"source {s!r} emits {k} arcs")
            if s not in sources:
                out.append(f"source {s!r} is not a declared node")
        for s in sources - set(emitted):
            out.append(f"node {s!r} has no out-arcs")
        targets = [t for _, _, t in self.internal]
        if targets != sorted(targets):
            out.append("internal arcs are not grouped by ascending target")
        for s, _, t in self.internal:
            if t not in sources:
                out.append(f"arc {s!r} -> {t!r} is dangling")
            if t.level <= s.level:
                out.append(f"arc {s!r} -> {t!r} violates the level order")
        tsrc = [s for s, _, _ in self.terminal]
        if tsrc != sorted(tsrc):
            out.append("terminal arcs are not sorted by source")
        return out


def arcs_of(
    kind: str,
    var_count: int,
    nodes: Sequence[NodeRecord],
    root_terminal: Optional[bool] = None,
) -> ArcFiles:
    """Arc form of an arbitrary (possibly unreduced) node list.

    Uids must already be dense per level and the first node is the root.
    """
    nodes = sorted(NodeRecord(*n) for n in nodes)
    if not nodes:
        return ArcFiles(kind, var_count, root_terminal=bool(root_terminal))
    internal = []
    term = []
    for n in nodes:
        for which, child in ((LOW, n.low), (HIGH, n.high)):
            if child.is_terminal:
                term.append((n.uid, which, child.value))
            else:
                internal.append((n.uid, which, child))
    internal.sort(key=lambda a: (a[2], a[0], a[1]))
    counts = (
        sum(1 for a in term if not a[2]),
        sum(1 for a in term if a[2]),
    )
    return ArcFiles(
        kind,
        var_count,
        internal,
        term,
        list(widths_of(nodes)),
        None,
        counts,
    )


def validate_diagram(d: DiagramFile) -> list[str]:
    """Every violated structural invariant of ``d``; empty when valid."""
    report: list[str] = []
    if d.kind not in KINDS:
        report.append(f"unknown kind {d.kind!r}")
    if not d.nodes:
        if d.terminal_value is None:
            report.append("constant diagram without terminal value")
        if d.level_widths:
            report.append("level_widths given for a constant diagram")
        report.extend(d.cuts.violations(0))
        return report

    uids = [n.uid for n in d.nodes]
    for a, b in zip(uids, uids[1:]):
        if not a < b:
            report.append(f"nodes out of order: {a!r} before {b!r}")
    present = set(uids)
    if len(present) != len(uids):
        report.append("duplicate uids")

    per_level: dict[int, list[int]] = {}
    for u in uids:
        if u.is_terminal or u.level < 0:
            report.append(f"node uid {u!r} is not internal")
            continue
        per_level.setdefault(u.level, []).append(u.index)
        if u.level >= d.var_count:
            report.append(f"node {u!r} is beyond var_count {d.var_count}")
    for lvl, idx in per_level.items():
        if sorted(idx) != list(range(len(idx))):
            report.append(f"level {lvl} indices are not dense")

    parents: dict[Uid, int] = {}
    seen: set[tuple[int, Uid, Uid]] = set()
    for n in d.nodes:
        for child in (n.low, n.high):
            if not child.is_terminal:
                if child not in present:
                    report.append(f"{n.uid!r} has dangling child {child!r}")
                if child.level <= n.uid.level:
                    report.append(f"{n.uid!r} -> {child!r} violates the level order")
                parents[child] = parents.get(child, 0) + 1
            elif child.index not in (0, 1):
                report.append(f"{n.uid!r} has malformed terminal child")
        if d.kind == BDD and n.low == n.high:
            report.append(f"{n.uid!r} is a don't care node (low = high)")
        if d.kind == ZDD and n.high == FALSE:
            report.append(f"{n.uid!r} violates zero-suppression (high = F)")
        key = (n.uid.level, n.low, n.high)
        if key in seen:
            report.append(f"{n.uid!r} duplicates another node on its level")
        seen.add(key)
    for u in uids[1:]:
        if u not in parents:
            report.append(f"{u!r} is unreachable")

    if tuple(d.level_widths) != widths_of(d.nodes):
        report.append("level_widths inconsistent with nodes")
    report.extend(d.cuts.violations(len(d.nodes)))
    return report


# -- text format ---------------------------------------------------------------


def _uid_token(u: Uid) -> str:
    if u.is_terminal:
        return "T" if u.index else "F"
    return f"{u.level}.{u.index}"


def _parse_uid(tok: str) -> Uid:
    if tok == "F":
        return FALSE
    if tok == "T":
        return TRUE
    try:
        lvl, idx = tok.split(".")
        return Uid(int(lvl), int(idx))
    except ValueError:
        raise DiagramFormatError(f"bad uid token {tok!r}") from None


def serialize(d: DiagramFile, include_cuts: bool = True) -> str:
    head = f"dd {d.kind} vars={d.var_count} nodes={len(d.nodes)}"
    if not d.nodes:
        head += f" terminal={int(bool(d.terminal_value))}"
    lines = [head]
    if include_cuts:
        c = d.cuts
        lines.append(
            f"cuts exact={int(c.exact)} "
            f"c1:{','.join(map(str, c.c1))} c2:{','.join(map(str, c.c2))}"
        )
    for n in d.nodes:
        lines.append(f"{_uid_token(n.uid)} {_uid_token(n.low)} {_uid_token(n.high)}")
    return "\n".join(lines) + "\n"


def _parse_kv(tokens: list[str]) -> dict[str, str]:
    out = {}
    for tok in tokens:
        k, sep, v = tok.partition("=")
        if not sep:
            raise DiagramFormatError(f"expected key=value, got {tok!r}")
        out[k] = v
    return out


def _parse_row(tok: str, prefix: str) -> tuple[int, int, int, int]:
    if not tok.startswith(prefix):
        raise DiagramFormatError(f"expected {prefix!r} field, got {tok!r}")
    try:
        vals = tuple(int(v) for v in tok[len(prefix):].split(","))
    except ValueError:
        raise DiagramFormatError(f"bad cut values in {tok!r}") from None
    if len(vals) != 4:
        raise DiagramFormatError(f"{prefix} needs four values")
    return vals  # type: ignore[return-value]


def deserialize(text: str | bytes) -> DiagramFile:
    if isinstance(text, bytes):
        text = text.decode()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise DiagramFormatError("empty input")
    head = lines[0].split()
    if len(head) < 4 or head[0] != "dd":
        raise DiagramFormatError("malformed header")
    kind = head[1]
    if kind not in KINDS:
        raise DiagramFormatError(f"unknown kind token {kind!r}")
    kv = _parse_kv(head[2:])
    try:
        var_count = int(kv["vars"])
        k = int(kv["nodes"])
        term = kv.get("terminal")
    except (KeyError, ValueError):
        raise DiagramFormatError("malformed header") from None

    body = lines[1:]
    cuts: Optional[CutSet] = None
    if body and body[0].startswith("cuts"):
        parts = body[0].split()
        if len(parts) != 4:
            raise DiagramFormatError("malformed cuts line")
        ex = _parse_kv([parts[1]]).get("exact")
        if ex not in ("0", "1"):
            raise DiagramFormatError("malformed cuts line")
        cuts = CutSet(_parse_row(parts[2], "c1:"), _parse_row(parts[3], "c2:"), ex == "1")
        body = body[1:]
    if len(body) != k:
        raise DiagramFormatError(f"expected {k} node lines, found {len(body)}")

    nodes = []
    for ln in body:
        toks = ln.split()
        if len(toks) != 3:
            raise DiagramFormatError(f"bad node line {ln!r}")
        u, lo, hi = (_parse_uid(t) for t in toks)
        if u.is_terminal:
            raise DiagramFormatError(f"node line with terminal uid {ln!r}")
        if nodes and not nodes[-1].uid < u:
            raise DiagramFormatError(f"node {u!r} out of order")
        nodes.append(NodeRecord(u, lo, hi))

    if k == 0:
        if term not in ("0", "1"):
            raise DiagramFormatError("constant diagram needs terminal=<0|1>")
        value = term == "1"
        return DiagramFile(kind, var_count, (), cuts or CutSet.constant(value), (), value)
    if cuts is None:
        cuts = CutSet.uniform(k + 1)
    return DiagramFile.create(kind, var_count, nodes, cuts)
