"""Closed-form upper bounds on the cuts, and hence the memory, of the next sweep."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence

from .core import B_BOTH, B_FALSE, B_NONE, B_TRUE, BDD, ZDD, CutSet

NODES = "nodes"
ONE_LEVEL = "1level"
TWO_LEVEL = "2level"
GRANULARITIES = (NODES, ONE_LEVEL, TWO_LEVEL)


class MissingMetadataError(ValueError):
    pass


def _ceil_half(x: int) -> int:
    return -(-x // 2)


# -- operators -----------------------------------------------------------------

# Truth tables as (op(0,0), op(0,1), op(1,0), op(1,1)).
OPERATORS: dict[str, tuple[int, int, int, int]] = {
    "and": (0, 0, 0, 1),
    "nand": (1, 1, 1, 0),
    "or": (0, 1, 1, 1),
    "nor": (1, 0, 0, 0),
    "xor": (0, 1, 1, 0),
    "xnor": (1, 0, 0, 1),
    "imp": (1, 1, 0, 1),
    "invimp": (1, 0, 1, 1),
    "diff": (0, 0, 1, 0),
    "less": (0, 1, 0, 0),
}
# For ZDDs, Apply is a family operation; it only makes sense when op(0,0) = 0.
ZDD_OPERATORS = tuple(name for name, t in OPERATORS.items() if t[0] == 0)


def op_eval(table: Sequence[int], a: int, b: int) -> int:
    return table[2 * a + b]


def shortcut_sets(table: Sequence[int], kind: str = BDD) -> tuple[int, int]:
    """Terminal subsets (B_left, B_right) that do NOT shortcut the operator.

    For ZDDs only the false terminal (the empty family) can shortcut: the true
    terminal is the family {{}} and never fixes the result on its own.
    """
    left = right = 0
    for b in (0, 1):
        if op_eval(table, b, 0) != op_eval(table, b, 1):
            left |= 1 << b
        if op_eval(table, 0, b) != op_eval(table, 1, b):
            right |= 1 << b
    if kind == ZDD:
        left |= B_TRUE
        right |= B_TRUE
        if op_eval(table, 0, 1) != 0:
            left |= B_FALSE
        if op_eval(table, 1, 0) != 0:
            right |= B_FALSE
    return left, right


@dataclass(frozen=True)
class OperatorProfile:
    name: str
    table: tuple[int, int, int, int]
    B_left: int
    B_right: int
    commutes: bool
    idempotent: bool

    @classmethod
    def of(cls, op: str | Sequence[int], kind: str = BDD) -> "OperatorProfile":
        if isinstance(op, str):
            name, table = op, OPERATORS[op]
        else:
            table = tuple(int(bool(x)) for x in op)
            if len(table) != 4:
                raise ValueError("operator table needs four entries")
            name = next((n for n, t in OPERATORS.items() if t == table), "custom")
        left, right = shortcut_sets(table, kind)
        return cls(
            name,
            table,  # type: ignore[arg-type]
            left,
            right,
            table[1] == table[2],
            table[0] == 0 and table[3] == 1,
        )

    def __call__(self, a: int, b: int) -> int:
        return self.table[2 * a + b]


# -- bounds --------------------------------------------------------------------


def node_count_bound(n: int) -> int:
    if n < 0:
        raise ValueError("node count must be non-negative")
    return n + 1


def multi_root_bound(n: int, r: int) -> int:
    if r < 1 or n < 0 or (n == 0 and r != 1):
        raise ValueError(f"invalid node/root count ({n}, {r})")
    return n + r


def apply_product_bound(cf: CutSet, cg: CutSet, i: int) -> int:
    return cf.get(i, B_BOTH) * cg.get(i, B_BOTH)


def width_bound(c1f: int, c1g: int) -> int:
    return _ceil_half(c1f * c1g)


def two_level_from_one_level(c1_empty: int) -> int:
    return -(-3 * c1_empty // 2)


def two_level_from_one_level_with_terminals(c1_empty: int, c1_B: int) -> int:
    if c1_empty > c1_B:
        raise ValueError("the internal-only cut cannot exceed the weighted cut")
    return _ceil_half(c1_empty) + c1_B


def apply_internal_bound_shortcut(cf: CutSet, cg: CutSet, prof: OperatorProfile) -> int:
    """2-level bound on the internal arcs of the unreduced product, skipping
    pairs of terminals and pairs involving a shortcutting terminal."""
    f_left, f_none = cf.c2[prof.B_left], cf.c2[B_NONE]
    g_right, g_none = cg.c2[prof.B_right], cg.c2[B_NONE]
    value = f_left * g_none + f_none * g_right - f_none * g_none
    assert value >= 0, "cut sets must be monotone in B"
    return value


def zdd_adjust(c: int, c_without_bot: int, B: int) -> int:
    """Count the extra arc into the false terminal a suppressed node can re-emerge from."""
    if c < c_without_bot:
        raise ValueError("cut with the false terminal is smaller than without it")
    if B & B_FALSE and c == c_without_bot:
        return c + 1
    return c


def zdd_adjusted(cuts: CutSet) -> CutSet:
    def row(r):
        return tuple(zdd_adjust(r[B], r[B & ~B_FALSE], B) for B in range(4))

    return CutSet(row(cuts.c1), row(cuts.c2), cuts.exact)  # type: ignore[arg-type]


# -- prediction ----------------------------------------------------------------


class InputInfo(NamedTuple):
    kind: str
    cuts: Optional[CutSet]
    node_count: int


def _two_level_view(info: InputInfo, granularity: str) -> CutSet:
    """Best available upper bounds on the 2-level cuts of an input."""
    if info.cuts is None:
        raise MissingMetadataError(f"no cut metadata for {granularity} granularity")
    c1 = info.cuts.c1
    derived = tuple(
        two_level_from_one_level(c1[B_NONE]) if B == B_NONE
        else two_level_from_one_level_with_terminals(c1[B_NONE], c1[B])
        for B in range(4)
    )
    cap = node_count_bound(info.node_count)
    if granularity == TWO_LEVEL:
        c2 = tuple(min(d, s) for d, s in zip(derived, info.cuts.c2))
    else:
        c2 = derived
    c2 = tuple(min(v, cap) for v in c2)
    one = tuple(min(v, cap) for v in c1)
    return CutSet(one, c2, False)  # type: ignore[arg-type]


def predict_next_op(
    inputs: Sequence[InputInfo | tuple],
    op_kind: str,
    granularity: str,
    profile: Optional[OperatorProfile] = None,
) -> dict[str, int]:
    """Upper bounds on the element count of each auxiliary structure.

    ``op_kind`` is ``"apply"`` (bounds for the product's top-down queue and
    the following Reduce's queue and per-level sorter) or ``"count"``.
    """
    if granularity not in GRANULARITIES:
        raise ValueError(f"unknown granularity {granularity!r}")
    infos = [InputInfo(*i) for i in inputs]

    if op_kind == "count":
        (f,) = infos
        bound = node_count_bound(f.node_count)
        if granularity != NODES:
            bound = min(bound, _two_level_view(f, granularity).c2[B_NONE])
        return {"count_pq": bound}

    if op_kind != "apply":
        raise ValueError(f"unknown operation {op_kind!r}")
    f, g = infos
    # A suppressed ZDD node can re-emerge, adding one arc per input.
    nf = node_count_bound(f.node_count) + (f.kind == ZDD)
    ng = node_count_bound(g.node_count) + (g.kind == ZDD)
    product_nodes = (f.node_count + 2) * (g.node_count + 2) - 4
    out = {
        "apply_pq": nf * ng,
        "reduce_pq": nf * ng,
        "reduce_sorter": product_nodes,
    }
    if granularity == NODES:
        return out

    vf, vg = _two_level_view(f, granularity), _two_level_view(g, granularity)
    if f.kind == ZDD:
        vf = zdd_adjusted(vf)
    if g.kind == ZDD:
        vg = zdd_adjusted(vg)

    apply_pq = min(out["apply_pq"], apply_product_bound(vf, vg, 2))
    if profile is not None:
        apply_pq = min(apply_pq, apply_internal_bound_shortcut(vf, vg, profile))
    c1_prod = apply_product_bound(vf, vg, 1)
    out["apply_pq"] = apply_pq
    out["reduce_pq"] = min(out["reduce_pq"], c1_prod)
    out["reduce_sorter"] = min(
        out["reduce_sorter"], width_bound(vf.c1[B_BOTH], vg.c1[B_BOTH])
    )
    return out


def refine_reduce_bounds(
    predicted: Optional[dict[str, int]],
    granularity: str,
    unreduced_nodes: int,
    out_c1_internal: Optional[int],
) -> dict[str, int]:
    """Tighten the Reduce bounds once the top-down sweep has run."""
    pq = node_count_bound(unreduced_nodes)
    sorter = unreduced_nodes
    if granularity != NODES and out_c1_internal is not None:
        pq = min(pq, out_c1_internal)
        sorter = min(sorter, out_c1_internal)
    if predicted:
        pq = min(pq, predicted.get("reduce_pq", pq))
        sorter = min(sorter, predicted.get("reduce_sorter", sorter))
    return {"reduce_pq": pq, "reduce_sorter": sorter}
