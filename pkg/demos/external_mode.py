"""
Running out of (pretend) memory
===============================

With a 4 KiB budget most queues and sorters no longer fit, so they switch to
external mode and write sorted runs to a temporary directory.  The diagram
and the count do not change.
"""

# %%
import os
import tempfile

from levicut.bench import build_queens
from levicut.core import serialize
from levicut.stats import aggregates
from levicut.sweep import Session

with tempfile.TemporaryDirectory() as tmp:
    small = Session(memory_bytes=4096, temp_dir=tmp)
    d_small = build_queens(7, session=small)
    print("runs left behind:", os.listdir(tmp))

big = Session()
d_big = build_queens(7, session=big)

print("same diagram:", serialize(d_small) == serialize(d_big))
print("same count:", small.count(d_small) == big.count(d_big))

for name, s in (("4 KiB", small), ("128 MiB", big)):
    agg = aggregates(s.records)
    print(f"{name:>8}: internal share {agg['internal_share']:.2f}, "
          f"spilled {agg['spilled_bytes']} bytes")

# %%
# Which structures went external first?  The ones with the largest bounds.
ext = sorted({(st.name, st.bound) for r in small.records for st in r.structures
              if st.mode == "external"}, key=lambda t: -t[1])
print(ext[:5])
