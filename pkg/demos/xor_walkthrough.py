"""
XOR, step by step
=================

Build x0 xor x1 from two single-variable diagrams and watch what the
top-down sweep produces before Reduce canonicalises it.
"""

# %%
# Inputs
# ------
# Each single-variable diagram has one node.  Its largest cut is the pair
# of terminal arcs below it.

from levicut import build
from levicut.core import B_NAMES, serialize
from levicut.cuts import cutset_of
from levicut.sweep import Session, apply, count, reduce

x0 = build.variable(0, 2)
x1 = build.variable(1, 2)
print(serialize(x0), end="")
print("x0 cuts c1:", cutset_of(x0).c1)

# %%
# Top-down sweep
# --------------
# The product has a root pair and two pairs on level 1.  Requests to
# terminals are written straight to the terminal-arc list, so the queue only
# ever holds the two internal requests.

s = Session(granularity="2level")
arcs = apply(x0, x1, "xor", session=s)
for src, which, tgt in arcs.internal:
    print(f"  {src} --{which}--> {tgt}")
for src, which, val in arcs.terminal:
    print(f"  {src} --{which}--> {'T' if val else 'F'}")

pq = s.records[-1].structure("apply_pq")
print("queue bounds per granularity:", pq.bounds, "observed:", pq.high_water)

# %%
# Reduce
# ------
# Nothing merges here, so the result keeps three nodes.  The cut estimates
# written by Reduce happen to match the exact values.

xor = reduce(arcs, session=s)
print(serialize(xor), end="")
exact = cutset_of(xor)
for B in range(4):
    print(f"  {B_NAMES[B]:6} reduce={xor.cuts.c1[B]} exact={exact.c1[B]}")

print("satisfying assignments:", count(xor, session=s))
