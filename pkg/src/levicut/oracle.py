"""Brute-force references used to cross-check the sweeps, cut algorithms and bounds.

Nothing here imports the sweep, cut or bound modules; the only shared code is
the plain diagram data types.  Everything is exponential on purpose.
"""

from __future__ import annotations

import itertools
import math
from typing import Hashable, Iterable, Sequence

import numpy as np

from .core import ZDD, DiagramFile

MAX_TABLE_VARS = 20
MAX_FREE_VERTICES = 12
MAX_CUT_VERTICES = 16

# Independent operator semantics, deliberately not shared with the bounds module.
_OPS = {
    "and": lambda a, b: a & b,
    "nand": lambda a, b: ~(a & b),
    "or": lambda a, b: a | b,
    "nor": lambda a, b: ~(a | b),
    "xor": lambda a, b: a ^ b,
    "xnor": lambda a, b: ~(a ^ b),
    "imp": lambda a, b: ~a | b,
    "invimp": lambda a, b: a | ~b,
    "diff": lambda a, b: a & ~b,
    "less": lambda a, b: ~a & b,
}
OPERATOR_NAMES = tuple(_OPS)


class OracleLimit(ValueError):
    pass


def _assignment_bits(n: int) -> np.ndarray:
    """Row r, column i holds bit i of r."""
    rows = np.arange(1 << n, dtype=np.int64)
    return ((rows[:, None] >> np.arange(n)) & 1).astype(bool)


def truth_table(d: DiagramFile) -> np.ndarray:
    n = d.var_count
    if n > MAX_TABLE_VARS:
        raise OracleLimit(f"{n} variables exceed the truth-table cap of {MAX_TABLE_VARS}")
    bits = _assignment_bits(n)
    size = 1 << n
    zdd = d.kind == ZDD

    def zero_between(lo: int, hi: int) -> np.ndarray:
        # For ZDDs a skipped variable must be 0.
        if not zdd or hi <= lo:
            return np.ones(size, dtype=bool)
        return ~bits[:, lo:hi].any(axis=1)

    def level_of(u) -> int:
        return n if u.is_terminal else u.level

    val: dict = {}

    def value(u) -> np.ndarray:
        if u.is_terminal:
            return np.full(size, u.value, dtype=bool)
        return val[u]

    for node in reversed(d.nodes):
        lvl = node.uid.level
        lo = value(node.low) & zero_between(lvl + 1, level_of(node.low))
        hi = value(node.high) & zero_between(lvl + 1, level_of(node.high))
        val[node.uid] = np.where(bits[:, lvl], hi, lo)
    root = d.root
    return value(root) & zero_between(0, level_of(root))


def table_from_bits(bits: Iterable) -> np.ndarray:
    return np.array([bool(b) for b in bits], dtype=bool)


def recursive_apply(tf: np.ndarray, tg: np.ndarray, op) -> np.ndarray:
    """Pointwise ``tf op tg``; ``op`` is an operator name or a 4-entry table."""
    tf, tg = np.asarray(tf, dtype=bool), np.asarray(tg, dtype=bool)
    if tf.shape != tg.shape:
        raise ValueError("truth tables differ in size")
    if isinstance(op, str):
        return _OPS[op](tf, tg).astype(bool)
    table = np.asarray(op, dtype=bool)
    return table[2 * tf.astype(int) + tg.astype(int)]


# -- cuts ----------------------------------------------------------------------


def _weight(g, target, B: int) -> int:
    if target in g.terminals:
        return (B >> int(g.terminals[target])) & 1
    return 1


def _cut_value(g, S: set, B: int) -> int:
    return sum(_weight(g, t, B) for s, t in g.arcs if s in S and t not in S)


def brute_force_ilevel_cut(g, i: int, B: int) -> int:
    """Maximum i-level cut by enumerating every window and every free subset.

    ``g`` needs ``levels`` (vertex -> level, ``math.inf`` for terminals),
    ``arcs`` and ``terminals`` attributes.
    """
    if i < 1:
        raise ValueError("i must be positive")
    finite = sorted({l for l in g.levels.values() if l != math.inf})
    if not finite:
        return 0
    best = 0
    for j in range(int(finite[0]) - i, int(finite[-1]) + 1):
        fixed_s = {v for v, l in g.levels.items() if l <= j}
        free = [v for v, l in g.levels.items() if j < l < j + i]
        if len(free) > MAX_FREE_VERTICES:
            raise OracleLimit(f"{len(free)} free vertices exceed the cap")
        for mask in range(1 << len(free)):
            S = fixed_s | {v for k, v in enumerate(free) if mask >> k & 1}
            best = max(best, _cut_value(g, S, B))
    return best


def brute_force_max_cut(g, B: int) -> int:
    """Maximum directed cut with no level restriction at all."""
    verts = list(g.levels)
    if len(verts) > MAX_CUT_VERTICES:
        raise OracleLimit("too many vertices for an unrestricted max cut")
    best = 0
    for mask in range(1 << len(verts)):
        S = {v for k, v in enumerate(verts) if mask >> k & 1}
        best = max(best, _cut_value(g, S, B))
    return best


def longest_path_levels(vertices: Iterable[Hashable], arcs: Sequence[tuple]) -> dict:
    """Level = longest path overall minus longest path from the vertex, by memoised DFS."""
    succ: dict = {v: [] for v in vertices}
    for s, t in arcs:
        succ.setdefault(s, []).append(t)
        succ.setdefault(t, [])
    memo: dict = {}

    def down(v, stack=()):
        if v in stack:
            raise ValueError("cycle")
        if v not in memo:
            memo[v] = max((1 + down(t, stack + (v,)) for t in succ[v]), default=0)
        return memo[v]

    top = max((down(v) for v in succ), default=0)
    return {v: top - down(v) for v in succ}


# -- combinatorial counters ----------------------------------------------------


def solve_queens_backtracking(n: int) -> int:
    if n < 0:
        raise ValueError("board size must be non-negative")
    if n == 0:
        return 1
    cols: set[int] = set()
    d1: set[int] = set()
    d2: set[int] = set()

    def place(row: int) -> int:
        if row == n:
            return 1
        total = 0
        for c in range(n):
            if c in cols or row + c in d1 or row - c in d2:
                continue
            cols.add(c); d1.add(row + c); d2.add(row - c)
            total += place(row + 1)
            cols.remove(c); d1.remove(row + c); d2.remove(row - c)
        return total

    return place(0)


def knight_moves(rows: int, cols: int) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for r, c in itertools.product(range(rows), range(cols)):
        out[r * cols + c] = [
            (r + dr) * cols + (c + dc)
            for dr, dc in itertools.product((-2, -1, 1, 2), repeat=2)
            if abs(dr) != abs(dc) and 0 <= r + dr < rows and 0 <= c + dc < cols
        ]
    return out


def count_knight_paths(rows: int, cols: int, closed: bool = False) -> int:
    """Directed Hamiltonian knight paths (any start cell); closed tours if asked."""
    cells = rows * cols
    moves = knight_moves(rows, cols)
    visited = [False] * cells

    def dfs(start: int, cur: int, depth: int) -> int:
        if depth == cells:
            return int(not closed or start in moves[cur])
        total = 0
        for nxt in moves[cur]:
            if not visited[nxt]:
                visited[nxt] = True
                total += dfs(start, nxt, depth + 1)
                visited[nxt] = False
        return total

    total = 0
    for s in range(cells):
        visited[s] = True
        total += dfs(s, s, 1)
        visited[s] = False
    return total


def cube_lines(side: int) -> list[tuple[int, ...]]:
    """Every straight line through a side^3 cube, each listed once."""
    cells = list(itertools.product(range(side), repeat=3))
    lines = set()
    for d in itertools.product((-1, 0, 1), repeat=3):
        if d == (0, 0, 0):
            continue
        for p in cells:
            pts = [tuple(p[k] + t * d[k] for k in range(3)) for t in range(side)]
            if all(0 <= x < side for q in pts for x in q):
                idx = tuple(sorted(q[0] * side * side + q[1] * side + q[2] for q in pts))
                lines.add(idx)
    return sorted(lines)


def count_tictactoe(side: int, crosses: int, lines: int | None = None) -> int:
    """Placements of ``crosses`` crosses where none of the first ``lines`` lines
    is all crosses or all noughts."""
    active = cube_lines(side)[:lines]
    total = 0
    for chosen in itertools.combinations(range(side ** 3), crosses):
        s = set(chosen)
        if all(0 < sum(c in s for c in line) < side for line in active):
            total += 1
    return total


def eval_netlist(inputs: Sequence[str], gates: Sequence[tuple], outputs: Sequence[str], assignment) -> list[bool]:
    """Evaluate ``(id, op, args)`` gates; ``op`` is and/or/xor/not/const."""
    env = dict(zip(inputs, (bool(b) for b in assignment)))
    for gid, op, args in gates:
        vals = [env[a] for a in args] if op != "const" else []
        if op == "and":
            env[gid] = all(vals)
        elif op == "or":
            env[gid] = any(vals)
        elif op == "xor":
            env[gid] = sum(vals) % 2 == 1
        elif op == "not":
            env[gid] = not vals[0]
        elif op == "const":
            env[gid] = args[0] in ("1", 1, True)
        else:
            raise ValueError(f"unknown gate op {op!r}")
    return [env[o] for o in outputs]
