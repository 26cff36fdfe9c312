import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import diagram_pairs, x0, xor_diagram
from levicut import build
from levicut.bounds import (
    GRANULARITIES,
    NODES,
    ONE_LEVEL,
    OPERATORS,
    TWO_LEVEL,
    ZDD_OPERATORS,
    InputInfo,
    MissingMetadataError,
    OperatorProfile,
    apply_internal_bound_shortcut,
    apply_product_bound,
    multi_root_bound,
    node_count_bound,
    predict_next_op,
    refine_reduce_bounds,
    shortcut_sets,
    two_level_from_one_level,
    two_level_from_one_level_with_terminals,
    width_bound,
    zdd_adjust,
    zdd_adjusted,
)
from levicut.core import B_BOTH, B_FALSE, B_NONE, B_TRUE, CutSet
from levicut.cuts import cutset_of, dag_of_nodes, max_1level_cut, max_2level_cut
from levicut.sweep import Session, apply


def info(d):
    return InputInfo(d.kind, d.cuts, d.node_count)


def test_node_bounds():
    assert node_count_bound(3) == 4
    assert node_count_bound(0) == 1
    assert multi_root_bound(5, 3) == 8
    with pytest.raises(ValueError):
        node_count_bound(-1)
    with pytest.raises(ValueError):
        multi_root_bound(0, 2)


def test_product_bound_attained_by_xor():
    xor = cutset_of(xor_diagram())
    assert apply_product_bound(cutset_of(x0()), cutset_of(x0()), 1) == 4
    assert xor.c1[B_BOTH] == 4


def test_width_bound_examples():
    assert width_bound(2, 2) == 2
    assert width_bound(3, 3) == 5
    assert xor_diagram().width == 2


def test_width_bound_holds_for_and_or_product():
    f = build.from_truth_table([0, 0, 0, 1])
    g = build.from_truth_table([0, 1, 1, 1])
    c1f, c1g = cutset_of(f).c1[B_BOTH], cutset_of(g).c1[B_BOTH]
    assert (c1f, c1g) == (3, 3)
    arcs = apply(f, g, "xor", session=Session(check_bounds=False))
    assert max(w for _, w in arcs.level_widths) <= width_bound(c1f, c1g)


def test_derived_two_level_bounds():
    assert two_level_from_one_level(2) == 3
    assert two_level_from_one_level(3) == 5
    assert two_level_from_one_level_with_terminals(2, 4) == 5
    with pytest.raises(ValueError):
        two_level_from_one_level_with_terminals(5, 4)


def test_shortcut_sets_bdd():
    assert shortcut_sets(OPERATORS["and"]) == (B_TRUE, B_TRUE)
    assert shortcut_sets(OPERATORS["or"]) == (B_FALSE, B_FALSE)
    assert shortcut_sets(OPERATORS["xor"]) == (B_BOTH, B_BOTH)
    assert shortcut_sets(OPERATORS["imp"]) == (B_TRUE, B_FALSE)


def test_shortcut_sets_zdd():
    # Only the empty family can shortcut, and only when it annihilates.
    assert shortcut_sets(OPERATORS["and"], "zdd") == (B_TRUE, B_TRUE)
    assert shortcut_sets(OPERATORS["or"], "zdd") == (B_BOTH, B_BOTH)
    assert shortcut_sets(OPERATORS["diff"], "zdd") == (B_TRUE, B_BOTH)


def test_operator_profile():
    p = OperatorProfile.of("xor")
    assert p.commutes and not p.idempotent and p(1, 0) == 1
    assert OperatorProfile.of((0, 0, 0, 1)).name == "and"
    assert OperatorProfile.of([1, 0, 1, 0]).name == "custom"
    with pytest.raises(ValueError):
        OperatorProfile.of((0, 1))
    assert set(ZDD_OPERATORS) == {"and", "or", "xor", "diff", "less"}


def test_shortcut_formula_arithmetic():
    two = CutSet((2, 2, 2, 2), (2, 2, 2, 2), False)
    assert apply_internal_bound_shortcut(two, two, OperatorProfile.of("xor")) == 4


def test_shortcut_formula_on_single_variables():
    a, b = cutset_of(build.variable(0, 2)), cutset_of(build.variable(1, 2))
    assert apply_internal_bound_shortcut(a, b, OperatorProfile.of("xor")) == 3
    assert apply_internal_bound_shortcut(a, b, OperatorProfile.of("and")) == 1


def test_and_of_single_variables_is_tight():
    f, g = build.variable(0, 2), build.variable(1, 2)
    s = Session(granularity=TWO_LEVEL)
    apply(f, g, "and", session=s)
    pq = s.records[-1].structure("apply_pq")
    assert pq.bound == 1 and pq.high_water == 1


def test_zdd_adjust():
    assert zdd_adjust(3, 3, B_FALSE) == 4
    assert zdd_adjust(4, 3, B_FALSE) == 4
    assert zdd_adjust(3, 3, B_TRUE) == 3
    with pytest.raises(ValueError):
        zdd_adjust(2, 3, B_BOTH)
    adj = zdd_adjusted(CutSet((1, 1, 2, 2), (1, 1, 2, 2)))
    assert adj.c1 == (1, 2, 2, 3)


def test_predict_xor_apply():
    a = info(build.variable(0, 2))
    b = info(build.variable(1, 2))
    prof = OperatorProfile.of("xor")
    nodes = predict_next_op([a, b], "apply", NODES, prof)
    assert nodes == {"apply_pq": 4, "reduce_pq": 4, "reduce_sorter": 5}
    one = predict_next_op([a, b], "apply", ONE_LEVEL, prof)
    two = predict_next_op([a, b], "apply", TWO_LEVEL, prof)
    assert one["apply_pq"] == 4 and two["apply_pq"] == 3
    assert one["reduce_sorter"] == width_bound(2, 2) == 2


def test_predict_count():
    d = xor_diagram()
    assert predict_next_op([info(d)], "count", NODES) == {"count_pq": 4}
    assert predict_next_op([info(d)], "count", TWO_LEVEL) == {"count_pq": 2}


def test_predict_requires_metadata():
    with pytest.raises(MissingMetadataError):
        predict_next_op([("bdd", None, 3)], "count", ONE_LEVEL)
    assert predict_next_op([("bdd", None, 3)], "count", NODES) == {"count_pq": 4}
    with pytest.raises(ValueError):
        predict_next_op([("bdd", None, 3)], "count", "3level")
    with pytest.raises(ValueError):
        predict_next_op([("bdd", None, 3)], "negate", NODES)


def test_constant_true_under_and_is_bounded_by_internal_cut():
    g = xor_diagram()
    t = build.constant(True, 2)
    pred = predict_next_op([info(t), info(g)], "apply", TWO_LEVEL, OperatorProfile.of("and"))
    assert pred["apply_pq"] <= max(g.cuts.c2[B_NONE], 1)
    s = Session(granularity=TWO_LEVEL)
    apply(t, g, "and", session=s)
    assert s.records[-1].structure("apply_pq").high_water <= pred["apply_pq"]


def test_refine_reduce_bounds():
    assert refine_reduce_bounds(None, NODES, 7, 3) == {"reduce_pq": 8, "reduce_sorter": 7}
    assert refine_reduce_bounds(None, ONE_LEVEL, 7, 3) == {"reduce_pq": 3, "reduce_sorter": 3}
    got = refine_reduce_bounds({"reduce_pq": 2, "reduce_sorter": 9}, TWO_LEVEL, 7, 3)
    assert got == {"reduce_pq": 2, "reduce_sorter": 3}


@settings(max_examples=100, deadline=None)
@given(diagram_pairs(), st.sampled_from(ZDD_OPERATORS))
def test_granularity_dominance(pair, op):
    f, g = pair
    prof = OperatorProfile.of(op, f.kind)
    preds = [predict_next_op([info(f), info(g)], "apply", gr, prof) for gr in GRANULARITIES]
    for key in preds[0]:
        assert preds[0][key] >= preds[1][key] >= preds[2][key]
    counts = [predict_next_op([info(f)], "count", gr)["count_pq"] for gr in GRANULARITIES]
    assert counts[0] >= counts[1] >= counts[2]


@settings(max_examples=100, deadline=None)
@given(diagram_pairs(kind="bdd"))
def test_product_bound_within_node_bound_squared(pair):
    f, g = pair
    for i in (1, 2):
        assert apply_product_bound(f.cuts, g.cuts, i) <= (f.node_count + 1) * (g.node_count + 1)


@settings(max_examples=100, deadline=None)
@given(diagram_pairs(), st.sampled_from(sorted(OPERATORS)))
def test_product_cut_bounds_hold_on_unreduced_output(pair, op):
    f, g = pair
    if f.kind == "zdd" and op not in ZDD_OPERATORS:
        return
    arcs = apply(f, g, op, session=Session(check_bounds=False))
    if arcs.root_terminal is not None:
        return
    dag = dag_of_nodes(arcs.unreduced_nodes(), arcs.root)
    vf, vg = f.cuts, g.cuts
    if f.kind == "zdd":
        vf, vg = zdd_adjusted(vf), zdd_adjusted(vg)
    assert max_1level_cut(dag, B_BOTH) <= apply_product_bound(vf, vg, 1)
    assert max_2level_cut(dag, B_BOTH) <= apply_product_bound(vf, vg, 2)
    assert max(w for _, w in arcs.level_widths) <= width_bound(vf.c1[B_BOTH], vg.c1[B_BOTH])
    prof = OperatorProfile.of(op, f.kind)
    assert max_2level_cut(dag, B_NONE) <= max(apply_internal_bound_shortcut(vf, vg, prof), 1)
