"""Direct construction of small diagrams.

Base cases for the benchmarks are described as layered automata: one state
per reachable (level, state) pair, a transition per bit, and an acceptance
test after the last variable.  The layered graph is then reduced in memory
with the same canonical numbering Reduce uses, so the results compare equal
to pipeline output node for node.
"""

from __future__ import annotations

import dataclasses
from typing import Callable, Hashable, Optional, Sequence

from .core import BDD, FALSE, ZDD, CutSet, DiagramFile, NodeRecord, Uid, terminal
from .cuts import cutset_of

State = Hashable
# delta(level, state, bit) -> next state, or None for rejection.
Delta = Callable[[int, State, int], Optional[State]]


def canonical_form(
    kind: str,
    var_count: int,
    root,
    table: dict,
) -> DiagramFile:
    """Reduce an in-memory DAG to canonical form.

    ``table`` maps a key to ``(level, low, high)`` where children are keys or
    Python booleans; ``root`` is a key or a boolean.
    """
    if isinstance(root, bool):
        return constant_leaf(root, var_count, kind)

    by_level: dict[int, list] = {}
    for key, (lvl, _, _) in table.items():
        by_level.setdefault(lvl, []).append(key)
    red: dict = {}

    def look(c):
        return terminal(c) if isinstance(c, bool) else red[c]

    nodes: list[NodeRecord] = []
    for lvl in sorted(by_level, reverse=True):
        keep = []
        for key in by_level[lvl]:
            _, lo, hi = table[key]
            lo, hi = look(lo), look(hi)
            if (lo == hi) if kind == BDD else (hi == FALSE):
                red[key] = lo
            else:
                keep.append(((lo, hi), key))
        keep.sort(key=lambda t: t[0])
        level_nodes: list[NodeRecord] = []
        for pair, key in keep:
            if not level_nodes or (level_nodes[-1].low, level_nodes[-1].high) != pair:
                level_nodes.append(NodeRecord(Uid(lvl, len(level_nodes)), *pair))
            red[key] = level_nodes[-1].uid
        nodes[:0] = level_nodes

    r = red[root]
    if r.is_terminal:
        return constant_leaf(r.value, var_count, kind)
    # The table may hold keys the root cannot reach.
    reach = {r}
    keep_nodes = []
    for n in nodes:
        if n.uid in reach:
            keep_nodes.append(n)
            reach.update((n.low, n.high))
    d = DiagramFile.create(kind, var_count, keep_nodes, CutSet.uniform(len(keep_nodes) + 1))
    return dataclasses.replace(d, cuts=cutset_of(d))


def constant_leaf(value: bool, var_count: int, kind: str = BDD) -> DiagramFile:
    """Terminal-only diagram.  For a ZDD this is the family {{}} or {}, not the constant function."""
    return DiagramFile.constant(bool(value), var_count, kind)


def from_automaton(
    var_count: int,
    kind: str,
    start: State,
    delta: Delta,
    accept: Callable[[State], bool],
) -> DiagramFile:
    """Diagram of the assignments a layered automaton accepts over ``var_count`` bits."""
    table: dict = {}
    layer = {start}
    for lvl in range(var_count):
        nxt = set()
        for s in layer:
            kids = []
            for bit in (0, 1):
                t = delta(lvl, s, bit)
                if t is None:
                    kids.append(False)
                elif lvl + 1 == var_count:
                    kids.append(bool(accept(t)))
                else:
                    kids.append((lvl + 1, t))
                    nxt.add(t)
            table[(lvl, s)] = (lvl, kids[0], kids[1])
        layer = nxt
    if var_count == 0:
        return constant_leaf(bool(accept(start)), 0, kind)
    return canonical_form(kind, var_count, (0, start), table)


def constant(value: bool, var_count: int, kind: str = BDD) -> DiagramFile:
    """The constant Boolean function over ``var_count`` variables, in either encoding."""
    if kind == BDD or not value:
        return constant_leaf(value, var_count, kind)
    return from_automaton(var_count, kind, 0, lambda l, s, b: 0, lambda s: True)


def variable(i: int, var_count: int, kind: str = BDD) -> DiagramFile:
    if not 0 <= i < var_count:
        raise ValueError(f"variable {i} outside 0..{var_count - 1}")
    return from_automaton(
        var_count, kind, 0,
        lambda l, s, b: None if (l == i and not b) else 0,
        lambda s: True,
    )


def from_truth_table(bits: Sequence, kind: str = BDD, var_count: Optional[int] = None) -> DiagramFile:
    """Variable ``i`` is bit ``i`` of the row index."""
    bits = [bool(b) for b in bits]
    n = var_count if var_count is not None else max(0, len(bits).bit_length() - 1)
    if len(bits) != 1 << n:
        raise ValueError(f"truth table of length {len(bits)} does not match {n} variables")
    return from_automaton(n, kind, 0, lambda l, s, b: s | (b << l), lambda s: bits[s])


def from_sets(family, var_count: int) -> DiagramFile:
    """ZDD of an explicit family of sets of variable indices."""
    members = {frozenset(s) for s in family}
    return from_automaton(
        var_count, ZDD, frozenset(),
        lambda l, s, b: (s | {l}) if b else s,
        lambda s: s in members,
    )


def exactly(k: int, variables: Sequence[int], var_count: int, kind: str = BDD) -> DiagramFile:
    """Assignments with exactly ``k`` of ``variables`` set; others unconstrained."""
    vs = set(variables)

    def delta(l, s, b):
        if l not in vs:
            return s
        s += b
        return None if s > k else s

    return from_automaton(var_count, kind, 0, delta, lambda s: s == k)
