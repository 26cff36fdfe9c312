"""
How good are the predicted bounds?
==================================

Build the N-Queens BDD and compare each auxiliary structure's predicted
bound with the largest size it actually reached, at every granularity.
"""

# %%
import numpy as np

from levicut.bench import build_queens
from levicut.stats import aggregates
from levicut.sweep import Session

N = 6

for gran in ("nodes", "1level", "2level"):
    s = Session(granularity=gran)
    d = build_queens(N, session=s)
    solutions = s.count(d)
    ratios = np.array([st.ratio for r in s.records for st in r.structures if st.ratio])
    agg = aggregates(s.records)
    print(f"{gran:>6}: {solutions} solutions, {agg['ops']} ops, "
          f"bound/observed median {np.median(ratios):.2f} max {ratios.max():.1f}, "
          f"geomean {agg['geomean_ratio']:.2f}")

# %%
# The Count sweep at 1-level granularity
# --------------------------------------
# Its queue bound comes from the diagram's 2-level cut, derived from the
# 1-level one when only that is tracked.

s = Session(granularity="1level")
s.count(build_queens(N, session=s))
st = s.records[-1].structure("count_pq")
print("count queue: bound", st.bound, "observed", st.high_water)
