"""Shared fixtures-as-functions and hypothesis strategies for the test suite."""

import math

from hypothesis import strategies as st

from levicut import build
from levicut.core import FALSE, TRUE, NodeRecord, Uid
from levicut.cuts import LevelisedDag

INF = math.inf


def xor_diagram():
    return build.from_truth_table([0, 1, 1, 0])


def x0():
    return build.variable(0, 1)


def chain_unreduced():
    """The unreduced chain whose reduction raises the cut (five levels, two columns)."""
    u = Uid
    return [
        NodeRecord(u(0, 0), u(1, 0), u(1, 1)),
        NodeRecord(u(1, 0), u(2, 0), u(2, 0)),
        NodeRecord(u(1, 1), u(2, 0), u(2, 1)),
        NodeRecord(u(2, 0), u(3, 0), u(3, 0)),
        NodeRecord(u(2, 1), u(3, 0), u(3, 1)),
        NodeRecord(u(3, 0), u(4, 0), u(4, 0)),
        NodeRecord(u(3, 1), u(4, 0), u(4, 1)),
        NodeRecord(u(4, 0), FALSE, FALSE),
        NodeRecord(u(4, 1), FALSE, TRUE),
    ]


@st.composite
def truth_tables(draw, max_vars=6, min_vars=0):
    n = draw(st.integers(min_vars, max_vars))
    bits = draw(st.lists(st.booleans(), min_size=1 << n, max_size=1 << n))
    return n, bits


@st.composite
def diagram_pairs(draw, kind=None, max_vars=6):
    kind = kind or draw(st.sampled_from(["bdd", "zdd"]))
    n = draw(st.integers(0, max_vars))
    size = 1 << n
    a = draw(st.lists(st.booleans(), min_size=size, max_size=size))
    b = draw(st.lists(st.booleans(), min_size=size, max_size=size))
    return build.from_truth_table(a, kind, n), build.from_truth_table(b, kind, n)


@st.composite
def levelised_dags(draw, max_vertices=12):
    """Random levelised DAGs with optional terminal sinks at infinity."""
    n = draw(st.integers(1, max_vertices))
    levels = {f"v{i}": draw(st.integers(0, 5)) for i in range(n)}
    names = list(levels)
    terminals = {}
    if draw(st.booleans()):
        terminals["F"] = False
    if draw(st.booleans()):
        terminals["T"] = True
    all_levels = dict(levels)
    for t in terminals:
        all_levels[t] = INF
    arcs = []
    targets_pool = names + list(terminals)
    for _ in range(draw(st.integers(0, 3 * n))):
        s = draw(st.sampled_from(names))
        t = draw(st.sampled_from(targets_pool))
        if all_levels[s] < all_levels[t]:
            arcs.append((s, t))
    return LevelisedDag(all_levels, arcs, terminals)


def random_dag(rng, max_vertices=12):
    """Same distribution shape as ``levelised_dags`` from a ``random.Random``."""
    n = rng.randint(1, max_vertices)
    levels = {f"v{i}": rng.randint(0, 5) for i in range(n)}
    terminals = {}
    if rng.random() < 0.5:
        terminals["F"] = False
    if rng.random() < 0.5:
        terminals["T"] = True
    all_levels = dict(levels)
    for t in terminals:
        all_levels[t] = INF
    pool = list(levels) + list(terminals)
    arcs = []
    for _ in range(rng.randint(0, 3 * n)):
        s = rng.choice(list(levels))
        t = rng.choice(pool)
        if all_levels[s] < all_levels[t]:
            arcs.append((s, t))
    return LevelisedDag(all_levels, arcs, terminals)
