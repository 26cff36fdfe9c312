"""Acceptance criteria, one test per criterion.

Run ``python3 tests/test_acceptance.py`` for a plain pass/fail listing, or
let pytest collect it; the lines are then repeated in the terminal summary.
"""

import functools
import os
import random
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from helpers import chain_unreduced, random_dag, x0, xor_diagram  # noqa: E402
from levicut import build, oracle  # noqa: E402
from levicut.bench import BenchConfig, build_knights, build_queens, build_tictactoe, run_benchmark  # noqa: E402
from levicut.bounds import GRANULARITIES, OPERATORS, ZDD_OPERATORS, apply_product_bound, width_bound  # noqa: E402
from levicut.core import B_ALL, B_BOTH, arcs_of, serialize  # noqa: E402
from levicut.cuts import cutset_of, max_1level_cut, max_2level_cut  # noqa: E402
from levicut.sweep import Session, apply, count, equal, reduce  # noqa: E402
from levicut.stats import strip_timing  # noqa: E402

RESULTS: list[str] = []
SEED = 20240611


def report(n: int, ok: bool, detail: str, soft: bool = False) -> str:
    tag = "PASS" if ok else ("SOFT-FAIL" if soft else "FAIL")
    line = f"criterion {n}: {tag} {detail}"
    RESULTS.append(line)
    print(line)
    return line


# -- shared runs ---------------------------------------------------------------


def _random_table(rng, n):
    density = rng.choice([0.1, 0.3, 0.5, 0.7, 0.9])
    return [rng.random() < density for _ in range(1 << n)]


@functools.lru_cache(maxsize=None)
def semantic_runs():
    """Criterion 4 pairs; returns (pairs, mismatches, sessions, seconds)."""
    rng = random.Random(SEED)
    sessions, mismatches, pairs = [], [], 0
    t0 = time.perf_counter()
    grans = GRANULARITIES + ("internal", "external")
    for kind, ops, total in (("bdd", sorted(OPERATORS), 500), ("zdd", ZDD_OPERATORS, 500)):
        for i in range(total):
            n = rng.randint(0, 8)
            fa, ga = _random_table(rng, n), _random_table(rng, n)
            f = build.from_truth_table(fa, kind, n)
            g = build.from_truth_table(ga, kind, n)
            tf, tg = oracle.truth_table(f), oracle.truth_table(g)
            gran = grans[i % len(grans)]
            memory = 4096 if i % 3 == 0 else 1 << 20
            s = Session(granularity=gran, memory_bytes=memory, simulate_external=True,
                        check_bounds=False)
            for op in ops:
                d = reduce(apply(f, g, op, session=s), session=s)
                if not np.array_equal(oracle.truth_table(d), oracle.recursive_apply(tf, tg, op)):
                    mismatches.append((kind, n, op))
                count(d, session=s)
            sessions.append(s)
            pairs += 1
    return pairs, mismatches, sessions, time.perf_counter() - t0


BENCH_RUNS = [
    ("queens", {"n": 6}, "bdd"),
    ("queens", {"n": 7}, "bdd"),
    ("queens", {"n": 6}, "zdd"),
    ("ttt", {"n": 4, "side": 3, "lines": 8}, "bdd"),
    ("ttt", {"n": 4, "side": 3, "lines": 8}, "zdd"),
    ("knights", {"rows": 3, "cols": 4}, "zdd"),
]


@functools.lru_cache(maxsize=None)
def benchmark_sessions():
    out = []
    for name, params, kind in BENCH_RUNS:
        for gran in GRANULARITIES + ("internal", "external"):
            for memory in (4096, 128 << 20):
                cfg = BenchConfig(name, params, kind, gran, memory, simulate_external=True)
                res = run_benchmark(cfg)
                out.append(((name, kind, gran, memory), res.session))
    return out


# -- criteria ------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    xor = cutset_of(xor_diagram())
    v = cutset_of(x0())
    checks = {
        "xor c1": xor.c1[B_BOTH] == 4,
        "xor c2": xor.c2[B_BOTH] == 4,
        "x0 cuts": v.c1[B_BOTH] == 2 and v.c2[B_BOTH] == 2,
        "product bound attained": apply_product_bound(v, v, 1) == 4 == xor.c1[B_BOTH],
        "xor width": xor_diagram().width == 2 == width_bound(2, 2),
    }
    s = Session()
    d = s.apply(build.variable(0, 2), build.variable(1, 2), "xor")
    checks["pipeline builds xor"] = equal(d, xor_diagram())
    dt = time.perf_counter() - t0
    bad = [k for k, ok in checks.items() if not ok]
    return not bad and dt < 1, f"golden values {len(checks) - len(bad)}/{len(checks)} in {dt:.3f}s"


def criterion_2():
    t0 = time.perf_counter()
    d = reduce(arcs_of("bdd", 5, chain_unreduced()))
    exact = cutset_of(d)
    dt = time.perf_counter() - t0
    ok = d.cuts.c1[B_BOTH] == exact.c1[B_BOTH] and d.cuts.c2[B_BOTH] == exact.c2[B_BOTH]
    return ok and dt < 1, (f"reported c1={d.cuts.c1[B_BOTH]} c2={d.cuts.c2[B_BOTH]} "
                           f"exact c1={exact.c1[B_BOTH]} c2={exact.c2[B_BOTH]} in {dt:.3f}s")


def criterion_3():
    rng = random.Random(SEED)
    t0 = time.perf_counter()
    mismatches = 0
    dags = 600
    for _ in range(dags):
        g = random_dag(rng, 12)
        for B in B_ALL:
            mismatches += max_1level_cut(g, B) != oracle.brute_force_ilevel_cut(g, 1, B)
            mismatches += max_2level_cut(g, B) != oracle.brute_force_ilevel_cut(g, 2, B)
    dt = time.perf_counter() - t0
    return mismatches == 0 and dt < 30, f"{dags} DAGs x 4 selectors, {mismatches} mismatches in {dt:.1f}s"


def criterion_4():
    pairs, mismatches, _, dt = semantic_runs()
    ok = pairs >= 500 and not mismatches and dt < 60
    return ok, f"{pairs} pairs (bdd x10 ops, zdd x5 ops), {len(mismatches)} mismatches in {dt:.1f}s"


def _all_records():
    recs = [r for s in semantic_runs()[2] for r in s.records]
    recs += [r for _, s in benchmark_sessions() for r in s.records]
    return recs


def criterion_5():
    structs = [st for r in _all_records() for st in r.structures]
    unsound = [st for st in structs if not st.sound]
    # Internal was selected because the bound fit the budget (forced runs skip
    # the selection and are excluded); the observed use must fit as well.
    selected = [st for st in structs
                if st.mode == "internal" and st.bound * st.element_bytes <= st.budget_bytes]
    overflow = [st for st in selected if st.high_water * st.element_bytes > st.budget_bytes]
    return (not unsound and not overflow,
            f"{len(structs)} structures, {len(unsound)} bound violations, "
            f"{len(overflow)}/{len(selected)} internal selections over budget")


def criterion_6():
    violations = checked = 0
    for r in _all_records():
        for st in r.structures:
            b = st.bounds
            if all(g in b for g in GRANULARITIES):
                checked += 1
                violations += not (b["nodes"] >= b["1level"] >= b["2level"])
    return checked > 0 and violations == 0, f"{checked} structures with all granularities, {violations} violations"


def criterion_7():
    ratios = {}
    for n in (5, 6, 7):
        s = Session(granularity="1level")
        d = build_queens(n, "bdd", s)
        count(d, session=s)
        st = s.records[-1].structure("count_pq")
        ratios[n] = st.bound / st.high_water
    ok = all(r <= 4 for r in ratios.values())
    return ok, "count PQ bound/observed " + " ".join(f"N={n}:{r:.2f}" for n, r in ratios.items())


def criterion_8():
    t0 = time.perf_counter()
    wrong = []
    for n in range(4, 9):
        got, want = count(build_queens(n)), oracle.solve_queens_backtracking(n)
        if got != want:
            wrong.append(f"queens{n}:{got}!={want}")
    for n in (13, 14):
        b, z = count(build_tictactoe(n, "bdd", 3)), count(build_tictactoe(n, "zdd", 3))
        if b != z:
            wrong.append(f"ttt3 n={n}: bdd {b} zdd {z}")
    for n, lines in ((3, 4), (4, 8)):
        b = count(build_tictactoe(n, "bdd", 3, lines=lines))
        z = count(build_tictactoe(n, "zdd", 3, lines=lines))
        if not b == z == oracle.count_tictactoe(3, n, lines):
            wrong.append(f"ttt3 n={n} lines={lines}")
    k, want = count(build_knights(3, 4)), oracle.count_knight_paths(3, 4)
    if k != want:
        wrong.append(f"knights3x4:{k}!={want}")
    dt = time.perf_counter() - t0
    return not wrong and dt < 120, f"queens 4..8, ttt side 3, knights 3x4: {wrong or 'all match'} in {dt:.1f}s"


def _mode_run(gran):
    res = run_benchmark(BenchConfig("queens", {"n": 6}, "bdd", gran, simulate_external=True))
    marks = [(r.name, st.name, st.high_water) for r in res.session.records for st in r.structures]
    modes = {st.mode for r in res.session.records for st in r.structures}
    return serialize(res.diagram), res.result["count"], marks, modes


def criterion_9():
    di, ci, hi, mi = _mode_run("internal")
    de, ce, he, me = _mode_run("external")
    ok = di == de and ci == ce and hi == he and mi == {"internal"} and me == {"external"}
    return ok, f"diagram equal={di == de} count {ci}/{ce} high-water equal={hi == he} ({len(hi)} structures)"


def _tracking_run(track):
    res = run_benchmark(BenchConfig("queens", {"n": 7}, "bdd", "nodes", track_cuts=track))
    body = serialize(res.diagram, include_cuts=False)
    return body, res.result["count"], strip_timing(res.document).replace(
        f"track_cuts={int(track)}", "track_cuts=?")


def criterion_10():
    on, off = _tracking_run(True), _tracking_run(False)
    same = [a == b for a, b in zip(on, off)]
    return all(same), f"nodes/count/stats identical: {same}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]
SOFT = {7}


@pytest.mark.parametrize("number", range(1, 11))
def test_criterion(number):
    ok, detail = CRITERIA[number - 1]()
    report(number, ok, detail, soft=number in SOFT)
    if number not in SOFT:
        assert ok, detail


if __name__ == "__main__":
    failed = 0
    for i, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        report(i, ok, detail, soft=i in SOFT)
        failed += not ok and i not in SOFT
    sys.exit(1 if failed else 0)
